#include "mfe/scenario.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>

namespace mfe {

namespace {

struct PlantMatrices {
  Eigen::MatrixXd a, bu, bd, bw, c, du, dd, dw;
};

/// Solves the descriptor out of the fault-perturbed state-space model.
PlantMatrices solved_plant(const StateSpaceModel& ss) {
  PlantMatrices p;
  const Eigen::Index nx = ss.n_x();
  if (nx == 0) {
    p.a = ss.A;
    p.bu = ss.B_u;
    p.bd = ss.B_d;
    p.bw = ss.B_w;
  } else {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(ss.G);
    if (!lu.isInvertible())
      throw SingularDescriptor("simulate_scenario: perturbed descriptor matrix is singular");
    p.a = lu.solve(ss.A);
    p.bu = lu.solve(ss.B_u);
    p.bd = lu.solve(ss.B_d);
    p.bw = lu.solve(ss.B_w);
  }
  p.c = ss.C;
  p.du = ss.D_u;
  p.dd = ss.D_d;
  p.dw = ss.D_w;
  return p;
}

StateSpaceModel perturbed_source(const DaeModel& m, const Eigen::VectorXd& f) {
  if (!m.source)
    throw ConfigError("simulate_scenario: model has no state-space form to simulate");
  DaeModel pm = perturb(m, f);
  return *pm.source;
}

}  // namespace

SignalSpec SignalSpec::zero() { return SignalSpec{}; }

SignalSpec SignalSpec::sinusoid(std::vector<double> amplitude, std::vector<double> omega,
                                std::vector<double> phase) {
  SignalSpec s;
  s.type = Type::kSinusoid;
  s.amplitude = std::move(amplitude);
  s.omega = std::move(omega);
  s.phase = std::move(phase);
  return s;
}

SignalSpec SignalSpec::zoh(Eigen::MatrixXd samples, double sample_h, bool periodic) {
  SignalSpec s;
  s.type = Type::kSamples;
  s.samples = std::move(samples);
  s.sample_h = sample_h;
  s.periodic = periodic;
  return s;
}

Eigen::VectorXd SignalSpec::value(double t, Eigen::Index channels) const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(channels);
  switch (type) {
    case Type::kZero:
      break;
    case Type::kSinusoid: {
      if (static_cast<Eigen::Index>(amplitude.size()) != channels)
        throw ConfigError("signal: sinusoid channel count disagrees");
      for (Eigen::Index i = 0; i < channels; ++i)
        v(i) = amplitude[i] * std::sin(omega[i] * t + phase[i]);
      break;
    }
    case Type::kSamples: {
      if (samples.cols() != channels) throw ConfigError("signal: sample width disagrees");
      if (!(sample_h > 0.0)) throw ConfigError("signal: sample interval must be positive");
      Eigen::Index k = static_cast<Eigen::Index>(std::floor(t / sample_h + 1e-9));
      if (periodic) {
        k %= samples.rows();
        if (k < 0) k += samples.rows();
      } else {
        k = std::clamp<Eigen::Index>(k, 0, samples.rows() - 1);
      }
      v = samples.row(k).transpose();
      break;
    }
  }
  return v;
}

FaultSignal FaultSignal::constants(Eigen::VectorXd f) {
  FaultSignal s;
  s.constant = std::move(f);
  return s;
}

Eigen::VectorXd FaultSignal::value(double t) const {
  if (!time_varying) return constant;
  Eigen::VectorXd f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(components.size()));
  for (size_t i = 0; i < components.size(); ++i)
    for (const auto& [w, idx] : components[i])
      f(static_cast<Eigen::Index>(i)) += w * dict->value(idx, t);
  return f;
}

Eigen::Index FaultSignal::size() const {
  return time_varying ? static_cast<Eigen::Index>(components.size()) : constant.size();
}

ScenarioEngine::ScenarioEngine(const DaeModel& m, const GeneratorSet& gen,
                               const ScenarioConfig& cfg)
    : model_(m), gen_(gen), cfg_(cfg), rng_(cfg.seed) {
  m.validate();
  if (!gen.has_denominator()) throw ConfigError("scenario: denominator polynomial missing");
  if (cfg.fault.size() != m.fault_count())
    throw ConfigError("scenario: fault signal length disagrees with model");
  continuous_ = m.time_domain == TimeDomain::kContinuous;
  oversample_ = continuous_ ? std::max(1, cfg.oversample) : 1;
  fine_h_ = cfg.h / oversample_;

  residual_c_ = realize(gen.denominator, mul(gen.N, m.L), m.time_domain);
  regressor_c_ = realize(gen.denominator, gen.M, m.time_domain);
  n_xr_ = residual_c_.n_states();
  n_xe_ = regressor_c_.n_states();
  n_xp_ = m.partition.n_states;

  rebuild_combined(cfg.fault.value(0.0));
  x_ = Eigen::VectorXd::Zero(n_xp_ + n_xr_ + n_xe_);
  x_clean_ = x_;

  result_.seed = cfg.seed;
  result_.h = cfg.h;
}

void ScenarioEngine::rebuild_combined(const Eigen::VectorXd& f) {
  const PlantMatrices p = solved_plant(perturbed_source(model_, f));
  const Eigen::Index nu = model_.partition.n_inputs, nd = model_.partition.n_disturbances;
  const Eigen::Index ny = model_.partition.n_outputs, nw = model_.n_w();
  const Eigen::Index nz = ny + nu;

  // Filter input z = [y; u] assembled from plant state and exogenous inputs.
  Eigen::MatrixXd cz = Eigen::MatrixXd::Zero(nz, n_xp_);
  cz.topRows(ny) = p.c;
  Eigen::MatrixXd dz_u(nz, nu), dz_d(nz, nd), dz_w(nz, nw);
  dz_u << p.du, Eigen::MatrixXd::Identity(nu, nu);
  dz_d << p.dd, Eigen::MatrixXd::Zero(nu, nd);
  dz_w << p.dw, Eigen::MatrixXd::Zero(nu, nw);

  const Eigen::Index n_total = n_xp_ + n_xr_ + n_xe_;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_total, n_total);
  a.topLeftCorner(n_xp_, n_xp_) = p.a;
  a.block(n_xp_, 0, n_xr_, n_xp_) = residual_c_.B * cz;
  a.block(n_xp_, n_xp_, n_xr_, n_xr_) = residual_c_.A;
  a.block(n_xp_ + n_xr_, 0, n_xe_, n_xp_) = regressor_c_.B * cz;
  a.block(n_xp_ + n_xr_, n_xp_ + n_xr_, n_xe_, n_xe_) = regressor_c_.A;

  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n_total, nu + nd + nw);
  b.topRows(n_xp_) << p.bu, p.bd, p.bw;
  b.middleRows(n_xp_, n_xr_) << residual_c_.B * dz_u, residual_c_.B * dz_d,
      residual_c_.B * dz_w;
  b.bottomRows(n_xe_) << regressor_c_.B * dz_u, regressor_c_.B * dz_d, regressor_c_.B * dz_w;

  if (continuous_) {
    StateSpace tmp;
    tmp.time_domain = TimeDomain::kContinuous;
    tmp.A = a;
    tmp.B = b;
    tmp.C = Eigen::MatrixXd::Zero(0, n_total);
    tmp.D = Eigen::MatrixXd::Zero(0, b.cols());
    const StateSpace d = c2d_exact(tmp, fine_h_);
    ad_ = d.A;
    bd_ = d.B;
  } else {
    ad_ = a;
    bd_ = b;
  }

  // Sample-instant output maps.
  cy_ = Eigen::MatrixXd::Zero(ny, n_total);
  cy_.leftCols(n_xp_) = p.c;
  dy_u_ = p.du;
  dy_d_ = p.dd;
  dy_w_ = p.dw;

  cr_ = Eigen::MatrixXd::Zero(1, n_total);
  cr_.leftCols(n_xp_) = residual_c_.D * cz;
  cr_.middleCols(n_xp_, n_xr_) = residual_c_.C;
  dr_u_ = residual_c_.D * dz_u;
  dr_d_ = residual_c_.D * dz_d;
  dr_w_ = residual_c_.D * dz_w;

  const Eigen::Index mf = regressor_c_.n_outputs();
  ce_ = Eigen::MatrixXd::Zero(mf, n_total);
  ce_.leftCols(n_xp_) = regressor_c_.D * cz;
  ce_.rightCols(n_xe_) = regressor_c_.C;
  de_u_ = regressor_c_.D * dz_u;
  de_d_ = regressor_c_.D * dz_d;
  de_w_ = regressor_c_.D * dz_w;
}

void ScenarioEngine::swap_generators(const DaeModel& m, const GeneratorSet& gen) {
  // The filters may come from a re-linearized model (their L changes), but the
  // plant stays the one this engine was built with.
  StateSpace res = realize(gen.denominator, mul(gen.N, m.L), model_.time_domain);
  StateSpace reg = realize(gen.denominator, gen.M, model_.time_domain);
  if (res.n_states() != n_xr_ || reg.n_states() != n_xe_)
    throw ConfigError("scenario: swapped generators change the filter state dimension");
  gen_ = gen;
  residual_c_ = std::move(res);
  regressor_c_ = std::move(reg);
  rebuild_combined(cfg_.fault.value(step_ * cfg_.h));
}

void ScenarioEngine::run(Eigen::Index steps) {
  const Eigen::Index nu = model_.partition.n_inputs, nd = model_.partition.n_disturbances;
  const Eigen::Index ny = model_.partition.n_outputs, nw = model_.n_w();
  const Eigen::Index mf = ce_.rows();
  const bool ltv = cfg_.fault.time_varying;
  std::normal_distribution<double> gauss(0.0, 1.0);

  const Eigen::Index old = result_.t.size();
  const Eigen::Index total = old + steps;
  result_.t.conservativeResize(total);
  result_.z.conservativeResize(total, ny + nu);
  result_.z_clean.conservativeResize(total, ny + nu);
  result_.r.conservativeResize(total);
  result_.r_clean.conservativeResize(total);
  result_.e.conservativeResize(total, mf);
  result_.e_clean.conservativeResize(total, mf);
  result_.xi.conservativeResize(total, n_xp_ + nd);
  result_.f_applied.conservativeResize(total, model_.fault_count());
  fine_z_.conservativeResize(total * oversample_, ny + nu);
  fine_z_clean_.conservativeResize(total * oversample_, ny + nu);

  for (Eigen::Index i = 0; i < steps; ++i, ++step_) {
    const Eigen::Index k = old + i;
    const double tk = step_ * cfg_.h;
    const Eigen::VectorXd u_k = cfg_.input.value(tk, nu);
    const Eigen::VectorXd d_k = cfg_.disturbance.value(tk, nd);
    Eigen::VectorXd w_k = Eigen::VectorXd::Zero(nw);
    if (cfg_.sigma > 0.0)
      for (Eigen::Index j = 0; j < nw; ++j) w_k(j) = cfg_.sigma * gauss(rng_);

    if (ltv) rebuild_combined(cfg_.fault.value(tk));

    const Eigen::VectorXd y = cy_ * x_ + dy_u_ * u_k + dy_d_ * d_k + dy_w_ * w_k;
    const Eigen::VectorXd y_clean = cy_ * x_clean_ + dy_u_ * u_k + dy_d_ * d_k;
    result_.t(k) = tk;
    result_.z.row(k) << y.transpose(), u_k.transpose();
    result_.z_clean.row(k) << y_clean.transpose(), u_k.transpose();
    result_.r(k) = (cr_ * x_ + dr_u_ * u_k + dr_d_ * d_k + dr_w_ * w_k)(0);
    result_.r_clean(k) = (cr_ * x_clean_ + dr_u_ * u_k + dr_d_ * d_k)(0);
    result_.e.row(k) = (ce_ * x_ + de_u_ * u_k + de_d_ * d_k + de_w_ * w_k).transpose();
    result_.e_clean.row(k) = (ce_ * x_clean_ + de_u_ * u_k + de_d_ * d_k).transpose();
    result_.xi.row(k) << x_clean_.head(n_xp_).transpose(), d_k.transpose();
    result_.f_applied.row(k) = cfg_.fault.value(tk).transpose();

    for (int s = 0; s < oversample_; ++s) {
      const double ts = tk + s * fine_h_;
      const Eigen::VectorXd u_s = cfg_.input.value(ts, nu);
      const Eigen::VectorXd d_s = cfg_.disturbance.value(ts, nd);
      if (ltv && s > 0) rebuild_combined(cfg_.fault.value(ts));
      const Eigen::VectorXd y_s = cy_ * x_ + dy_u_ * u_s + dy_d_ * d_s + dy_w_ * w_k;
      const Eigen::VectorXd y_s_clean = cy_ * x_clean_ + dy_u_ * u_s + dy_d_ * d_s;
      fine_z_.row(k * oversample_ + s) << y_s.transpose(), u_s.transpose();
      fine_z_clean_.row(k * oversample_ + s) << y_s_clean.transpose(), u_s.transpose();
      Eigen::VectorXd in(nu + nd + nw), in_clean(nu + nd + nw);
      in << u_s, d_s, w_k;
      in_clean << u_s, d_s, Eigen::VectorXd::Zero(nw);
      x_ = ad_ * x_ + bd_ * in;
      x_clean_ = ad_ * x_clean_ + bd_ * in_clean;
    }
  }
}

ScenarioResult simulate_scenario(const DaeModel& m, const GeneratorSet& gen,
                                 const ScenarioConfig& cfg) {
  ScenarioEngine engine(m, gen, cfg);
  const Eigen::Index n_t = static_cast<Eigen::Index>(std::llround(cfg.t_end / cfg.h)) + 1;
  engine.run(n_t);
  return engine.result();
}

std::vector<TvRegressorColumn> build_tv_regressor_bank(const DaeModel& m,
                                                       const GeneratorSet& gen,
                                                       const FaultSignal& fault, double fine_h) {
  if (!fault.time_varying || !fault.dict)
    throw ConfigError("tv regressor bank: fault signal has no basis dictionary");
  if (!gen.has_denominator()) throw ConfigError("tv regressor bank: denominator missing");
  std::vector<TvRegressorColumn> bank;
  for (size_t i = 0; i < fault.components.size(); ++i) {
    for (size_t j = 0; j < fault.components[i].size(); ++j) {
      TvRegressorColumn col;
      col.fault_index = static_cast<int>(i);
      col.basis_index = static_cast<int>(j);
      const int phi = fault.components[i][j].second;
      const auto terms = tv_rewrite(gen.G[i], *fault.dict, phi);
      for (const auto& term : terms) {
        StateSpace f = realize(gen.denominator, mul(gen.N, term.G), m.time_domain);
        if (m.time_domain == TimeDomain::kContinuous) f = c2d_exact(f, fine_h);
        col.filters.emplace_back(std::move(f), term.phi_index);
      }
      bank.push_back(std::move(col));
    }
  }
  return bank;
}

Eigen::MatrixXd run_tv_regressors(const std::vector<TvRegressorColumn>& bank,
                                  const TvDictionary& dict, double fine_h,
                                  const Eigen::MatrixXd& fine_z, int keep_every) {
  const Eigen::Index n_fine = fine_z.rows();
  const Eigen::Index n_keep = (n_fine + keep_every - 1) / keep_every;
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n_keep, static_cast<Eigen::Index>(bank.size()));
  for (size_t c = 0; c < bank.size(); ++c) {
    for (const auto& [filter, phi_idx] : bank[c].filters) {
      Eigen::MatrixXd weighted = fine_z;
      for (Eigen::Index k = 0; k < n_fine; ++k) weighted.row(k) *= dict.value(phi_idx, k * fine_h);
      const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(filter.n_states());
      const Eigen::MatrixXd out = simulate(filter, weighted, x0);
      for (Eigen::Index k = 0; k < n_keep; ++k)
        e(k, static_cast<Eigen::Index>(c)) += out(k * keep_every, 0);
    }
  }
  return e;
}

}  // namespace mfe
