#include "mfe/input_design.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <random>

namespace mfe {

namespace {

Eigen::VectorXd project_box(const BoxConstraint& b, const Eigen::VectorXd& x) {
  return x.cwiseMax(b.lo).cwiseMin(b.hi);
}

Eigen::VectorXd project_channel_energy(const ChannelEnergyConstraint& c,
                                       const Eigen::VectorXd& x) {
  Eigen::VectorXd out = x;
  for (int i = 0; i < c.n_u; ++i) {
    double norm2 = 0.0;
    for (int k = 0; k < c.N; ++k) norm2 += x(k * c.n_u + i) * x(k * c.n_u + i);
    const double norm = std::sqrt(norm2);
    const double r = c.radius(i);
    if (norm > r && norm > 0.0) {
      const double scale = r / norm;
      for (int k = 0; k < c.N; ++k) out(k * c.n_u + i) *= scale;
    }
  }
  return out;
}

Eigen::VectorXd project_quadratic(const QuadraticConstraint& q, const Eigen::VectorXd& x) {
  // Exact projection onto an ellipsoid requires a scalar root-find; the sets
  // produced by to_quadratic_list are axis-aligned or isotropic, where a pure
  // rescale along S is exact. General S falls back to bisection on the
  // Lagrange multiplier.
  const double val = x.dot(q.S * x);
  if (val <= 1.0) return x;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q.S);
  const Eigen::VectorXd d = es.eigenvalues().cwiseMax(0.0);
  const Eigen::VectorXd y = es.eigenvectors().transpose() * x;
  double lo = 0.0, hi = 1.0;
  auto constraint_at = [&](double mu) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < d.size(); ++i) {
      const double yi = y(i) / (1.0 + mu * d(i));
      acc += d(i) * yi * yi;
    }
    return acc;
  };
  while (constraint_at(hi) > 1.0) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (constraint_at(mid) > 1.0)
      lo = mid;
    else
      hi = mid;
  }
  const double mu = 0.5 * (lo + hi);
  Eigen::VectorXd yp(y.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) yp(i) = y(i) / (1.0 + mu * d(i));
  return es.eigenvectors() * yp;
}

Eigen::VectorXd dykstra(const std::vector<const ConstraintSet*>& sets, const Eigen::VectorXd& x,
                        int max_sweeps = 500, double tol = 1e-10) {
  Eigen::VectorXd z = x;
  std::vector<Eigen::VectorXd> corrections(sets.size(), Eigen::VectorXd::Zero(x.size()));
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    const Eigen::VectorXd z_prev = z;
    for (size_t i = 0; i < sets.size(); ++i) {
      const Eigen::VectorXd y = z + corrections[i];
      const Eigen::VectorXd pz = project(*sets[i], y);
      corrections[i] = y - pz;
      z = pz;
    }
    if ((z - z_prev).norm() < tol * std::max(1.0, z.norm())) break;
  }
  return z;
}

}  // namespace

StateSpace regressor_input_map(const DaeModel& m, const GeneratorSet& gen, double h) {
  if (!m.source) throw ConfigError("regressor_input_map: model has no state-space form");
  if (!gen.has_denominator()) throw ConfigError("regressor_input_map: denominator missing");
  const auto& ss = *m.source;
  if ((ss.G - Eigen::MatrixXd::Identity(ss.n_x(), ss.n_x())).norm() > 0.0)
    throw ConfigError("regressor_input_map: descriptor plants are not supported here");

  StateSpace plant_y;
  plant_y.time_domain = m.time_domain;
  plant_y.A = ss.A;
  plant_y.B = ss.B_u;
  plant_y.C = ss.C;
  plant_y.D = ss.D_u;

  StateSpace passthrough;
  passthrough.time_domain = m.time_domain;
  passthrough.h = m.time_domain == TimeDomain::kDiscrete ? h : 0.0;
  passthrough.A = Eigen::MatrixXd::Zero(0, 0);
  passthrough.B = Eigen::MatrixXd::Zero(0, ss.n_u());
  passthrough.C = Eigen::MatrixXd::Zero(ss.n_u(), 0);
  passthrough.D = Eigen::MatrixXd::Identity(ss.n_u(), ss.n_u());

  const StateSpace t_m = realize(gen.denominator, gen.M, m.time_domain);
  StateSpace t = series(stack_outputs(plant_y, passthrough), t_m);
  if (m.time_domain == TimeDomain::kContinuous) t = c2d_exact(t, h);
  t.h = h;
  return t;
}

Eigen::VectorXd project(const ConstraintSet& c, const Eigen::VectorXd& x) {
  return std::visit(
      [&](const auto& set) -> Eigen::VectorXd {
        using T = std::decay_t<decltype(set)>;
        if constexpr (std::is_same_v<T, BoxConstraint>) {
          return project_box(set, x);
        } else if constexpr (std::is_same_v<T, ChannelEnergyConstraint>) {
          return project_channel_energy(set, x);
        } else if constexpr (std::is_same_v<T, TotalEnergyConstraint>) {
          const double norm = x.norm();
          return norm > set.radius ? Eigen::VectorXd(x * (set.radius / norm)) : x;
        } else if constexpr (std::is_same_v<T, std::vector<QuadraticConstraint>>) {
          if (set.size() == 1) return project_quadratic(set[0], x);
          std::vector<ConstraintSet> parts;
          parts.reserve(set.size());
          for (const auto& q : set) parts.push_back(ConstraintSet{std::vector<QuadraticConstraint>{q}});
          std::vector<const ConstraintSet*> ptrs;
          for (const auto& p : parts) ptrs.push_back(&p);
          return dykstra(ptrs, x);
        } else {
          std::vector<const ConstraintSet*> ptrs;
          for (const auto& p : set.parts) ptrs.push_back(&p);
          return dykstra(ptrs, x);
        }
      },
      c.v);
}

bool is_feasible(const ConstraintSet& c, const Eigen::VectorXd& x, double tol) {
  return std::visit(
      [&](const auto& set) -> bool {
        using T = std::decay_t<decltype(set)>;
        if constexpr (std::is_same_v<T, BoxConstraint>) {
          return ((x - set.lo).minCoeff() >= -tol) && ((set.hi - x).minCoeff() >= -tol);
        } else if constexpr (std::is_same_v<T, ChannelEnergyConstraint>) {
          for (int i = 0; i < set.n_u; ++i) {
            double norm2 = 0.0;
            for (int k = 0; k < set.N; ++k) norm2 += x(k * set.n_u + i) * x(k * set.n_u + i);
            if (std::sqrt(norm2) > set.radius(i) + tol) return false;
          }
          return true;
        } else if constexpr (std::is_same_v<T, TotalEnergyConstraint>) {
          return x.norm() <= set.radius + tol;
        } else if constexpr (std::is_same_v<T, std::vector<QuadraticConstraint>>) {
          for (const auto& q : set)
            if (x.dot(q.S * x) > 1.0 + tol) return false;
          return true;
        } else {
          for (const auto& p : set.parts)
            if (!is_feasible(p, x, tol)) return false;
          return true;
        }
      },
      c.v);
}

std::vector<QuadraticConstraint> to_quadratic_list(const ConstraintSet& c, Eigen::Index dim) {
  return std::visit(
      [&](const auto& set) -> std::vector<QuadraticConstraint> {
        using T = std::decay_t<decltype(set)>;
        std::vector<QuadraticConstraint> out;
        if constexpr (std::is_same_v<T, BoxConstraint>) {
          for (Eigen::Index j = 0; j < dim; ++j) {
            const double bound = std::max(std::abs(set.lo(j)), std::abs(set.hi(j)));
            if (!(bound > 0.0) || !std::isfinite(bound))
              throw ConversionUnsupported("box bound has no quadratic form");
            Eigen::MatrixXd s = Eigen::MatrixXd::Zero(dim, dim);
            s(j, j) = 1.0 / (bound * bound);
            out.push_back({std::move(s)});
          }
        } else if constexpr (std::is_same_v<T, ChannelEnergyConstraint>) {
          for (int i = 0; i < set.n_u; ++i) {
            Eigen::MatrixXd s = Eigen::MatrixXd::Zero(dim, dim);
            for (int k = 0; k < set.N; ++k) {
              const Eigen::Index j = k * set.n_u + i;
              s(j, j) = 1.0 / (set.radius(i) * set.radius(i));
            }
            out.push_back({std::move(s)});
          }
        } else if constexpr (std::is_same_v<T, TotalEnergyConstraint>) {
          out.push_back({Eigen::MatrixXd::Identity(dim, dim) / (set.radius * set.radius)});
        } else if constexpr (std::is_same_v<T, std::vector<QuadraticConstraint>>) {
          out = set;
        } else {
          for (const auto& p : set.parts) {
            auto sub = to_quadratic_list(p, dim);
            out.insert(out.end(), sub.begin(), sub.end());
          }
        }
        return out;
      },
      c.v);
}

DesignProblem build_problem(const StateSpace& t_discrete, int period, ConstraintSet constraints,
                            OptimizeParams params) {
  if (t_discrete.time_domain != TimeDomain::kDiscrete)
    throw ConfigError("build_problem: the regressor map must be discrete");
  if (period < 1) throw ConfigError("build_problem: period must be positive");
  if (!is_stable(t_discrete)) throw UnstableSystem("build_problem: regressor map is unstable");

  DesignProblem p;
  p.ss = minimal_realization(t_discrete);
  p.N = period;
  p.n_u = static_cast<int>(p.ss.n_inputs());
  p.m = static_cast<int>(p.ss.n_outputs());
  p.constraints = std::move(constraints);
  p.params = params;

  const Eigen::Index n = p.ss.n_states();
  const Eigen::Index nu = p.n_u, m = p.m;
  const Eigen::Index dim = p.dim();

  // Powers A^0 .. A^N.
  std::vector<Eigen::MatrixXd> apow(period + 1);
  apow[0] = Eigen::MatrixXd::Identity(n, n);
  for (int i = 1; i <= period; ++i) apow[i] = apow[i - 1] * p.ss.A;

  p.P.assign(period, Eigen::MatrixXd::Zero(m, dim));
  for (int i = 1; i <= period; ++i) {
    Eigen::MatrixXd& pi = p.P[i - 1];
    for (int k = 1; k <= i - 1; ++k)
      pi.middleCols((k - 1) * nu, nu) = p.ss.C * apow[i - 1 - k] * p.ss.B;
    pi.middleCols((i - 1) * nu, nu) = p.ss.D;
  }
  p.P_x.resize(n, dim);
  for (int k = 0; k < period; ++k) p.P_x.middleCols(k * nu, nu) = apow[period - 1 - k] * p.ss.B;

  const Eigen::MatrixXd period_matrix = Eigen::MatrixXd::Identity(n, n) - apow[period];
  Eigen::FullPivLU<Eigen::MatrixXd> lu(period_matrix);
  if (n > 0) {
    if (!lu.isInvertible())
      throw SingularPeriodMatrix("build_problem: I - A^N is singular");
    const double inv_norm = lu.inverse().norm();
    if (inv_norm > 1e12)
      throw SingularPeriodMatrix("build_problem: I - A^N is numerically singular");
  }

  p.Pp.assign(period, Eigen::MatrixXd());
  p.Pp_stacked.resize(period * m, dim);
  const Eigen::MatrixXd correction =
      n > 0 ? Eigen::MatrixXd(lu.solve(p.P_x)) : Eigen::MatrixXd(Eigen::MatrixXd::Zero(n, dim));
  for (int i = 1; i <= period; ++i) {
    p.Pp[i - 1] = p.P[i - 1] + p.ss.C * apow[i - 1] * correction;
    p.Pp_stacked.middleRows((i - 1) * m, m) = p.Pp[i - 1];
  }
  return p;
}

namespace {

struct EigPack {
  double lambda = 0.0;
  Eigen::VectorXd v;
  double gap = 0.0;
};

EigPack min_eig(const DesignProblem& p, const Eigen::VectorXd& u_bar, Eigen::VectorXd* y_out) {
  const Eigen::VectorXd y = p.Pp_stacked * u_bar;  // N blocks of m
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(p.m, p.m);
  for (int i = 0; i < p.N; ++i) {
    const auto yi = y.segment(i * p.m, p.m);
    q.noalias() += yi * yi.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q);
  EigPack out;
  out.lambda = es.eigenvalues()(0);
  out.v = es.eigenvectors().col(0);
  out.gap = p.m > 1 ? es.eigenvalues()(1) - es.eigenvalues()(0) : std::numeric_limits<double>::infinity();
  if (y_out) *y_out = y;
  return out;
}

}  // namespace

std::pair<double, Eigen::VectorXd> objective_subgradient(const DesignProblem& p,
                                                         const Eigen::VectorXd& u_bar) {
  Eigen::VectorXd y;
  const EigPack e = min_eig(p, u_bar, &y);
  // g = 2 sum_i (v^T P'_i u) P'_i^T v, assembled through the stacked map.
  Eigen::VectorXd s(p.N * p.m);
  for (int i = 0; i < p.N; ++i) {
    const double wi = e.v.dot(y.segment(i * p.m, p.m));
    s.segment(i * p.m, p.m) = wi * e.v;
  }
  return {e.lambda, 2.0 * (p.Pp_stacked.transpose() * s)};
}

double objective(const DesignProblem& p, const Eigen::VectorXd& u_bar) {
  return min_eig(p, u_bar, nullptr).lambda;
}

double smallest_eigen_gap(const DesignProblem& p, const Eigen::VectorXd& u_bar) {
  return min_eig(p, u_bar, nullptr).gap;
}

DesignResult optimize(const DesignProblem& p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd u(p.dim());
  for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = gauss(rng);
  u = project(p.constraints, u);
  if (u.norm() == 0.0) {
    // The origin is a stationary global minimum; nudge along the first axis.
    u.setZero();
    u(0) = 1e-6;
    u = project(p.constraints, u);
  }

  DesignResult res;
  res.seed = seed;
  double best_j = -1.0;
  Eigen::VectorXd best_u = u;
  double running_mean = 0.0;

  int k = 0;
  for (; k < p.params.max_iter; ++k) {
    const auto [j, g] = objective_subgradient(p, u);
    res.lambda_history.push_back(j);
    if (j > best_j) {
      best_j = j;
      best_u = u;
    }
    const double prev_mean = running_mean;
    running_mean += (j - running_mean) / (k + 1);

    const double step = p.params.tau * p.params.step_l / (p.params.step_l + k);
    const Eigen::VectorXd u_new = project(p.constraints, u + step * g);
    const double move = (u_new - u).norm();
    u = u_new;
    if (move < p.params.eps_u) {
      ++k;
      break;
    }
    if (k > 10 && std::abs(running_mean - prev_mean) < p.params.eps_lambda) {
      ++k;
      break;
    }
  }
  // Score the final iterate too.
  const double j_final = objective(p, u);
  if (j_final > best_j) {
    best_j = j_final;
    best_u = u;
  }
  res.u_bar = best_u;
  res.J = best_j;
  res.iterations = k;
  res.x0_periodic = periodic_initial_state(p, best_u);
  return res;
}

DesignResult optimize_multistart(const DesignProblem& p, std::uint64_t seed, int starts) {
  DesignResult best;
  best.J = -1.0;
  for (int i = 0; i < starts; ++i) {
    DesignResult r = optimize(p, seed + static_cast<std::uint64_t>(i));
    if (r.J > best.J) best = std::move(r);
  }
  return best;
}

Eigen::VectorXd periodic_initial_state(const DesignProblem& p, const Eigen::VectorXd& u_bar) {
  const Eigen::Index n = p.ss.n_states();
  if (n == 0) return Eigen::VectorXd::Zero(0);
  Eigen::MatrixXd an = Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i < p.N; ++i) an = an * p.ss.A;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(Eigen::MatrixXd::Identity(n, n) - an);
  if (!lu.isInvertible()) throw SingularPeriodMatrix("periodic_initial_state: I - A^N singular");
  return lu.solve(p.P_x * u_bar);
}

double verify_asymptotic(const DesignProblem& p, const Eigen::VectorXd& u_bar, int n_periods,
                         int window_offset) {
  if (n_periods < 0) {
    const double rho = spectral_radius(p.ss.A);
    if (rho >= 1.0) throw UnstableSystem("verify_asymptotic: unstable map");
    n_periods = 4;
    if (rho > 0.0) {
      const double needed = std::log(1e-9) / (p.N * std::log(rho));
      if (std::isfinite(needed)) n_periods = std::max(4, static_cast<int>(std::ceil(needed)) + 1);
    }
    n_periods = std::min(n_periods, 20000);
  }
  const Eigen::Index total = static_cast<Eigen::Index>(n_periods) * p.N + window_offset;
  Eigen::MatrixXd u_time(total, p.n_u);
  for (Eigen::Index k = 0; k < total; ++k)
    u_time.row(k) = u_bar.segment((k % p.N) * p.n_u, p.n_u).transpose();
  const Eigen::MatrixXd e = simulate(p.ss, u_time, Eigen::VectorXd::Zero(p.ss.n_states()));
  const Eigen::MatrixXd window = e.bottomRows(p.N);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(window);
  const double smin = svd.singularValues()(std::min<Eigen::Index>(p.m, p.N) - 1);
  return smin * smin;
}

namespace {

/// Projection onto the PSD cone by eigenvalue clipping.
Eigen::MatrixXd project_psd(const Eigen::MatrixXd& x) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (x + x.transpose()));
  const Eigen::VectorXd d = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

/// Dykstra projection onto {PSD} intersected with {tr(S_i X) <= 1}.
Eigen::MatrixXd project_spectrahedron(const Eigen::MatrixXd& x,
                                      const std::vector<QuadraticConstraint>& traces,
                                      const SdpOptions& opts) {
  const size_t n_sets = traces.size() + 1;
  Eigen::MatrixXd z = x;
  std::vector<Eigen::MatrixXd> corr(n_sets, Eigen::MatrixXd::Zero(x.rows(), x.cols()));
  for (int sweep = 0; sweep < opts.dykstra_max_sweeps; ++sweep) {
    const Eigen::MatrixXd z_prev = z;
    for (size_t i = 0; i < n_sets; ++i) {
      const Eigen::MatrixXd y = z + corr[i];
      Eigen::MatrixXd pz;
      if (i == 0) {
        pz = project_psd(y);
      } else {
        const auto& s = traces[i - 1].S;
        const double excess = (s.array() * y.array()).sum() - 1.0;
        pz = excess > 0.0 ? Eigen::MatrixXd(y - (excess / s.squaredNorm()) * s) : y;
      }
      corr[i] = y - pz;
      z = pz;
    }
    if ((z - z_prev).norm() < opts.dykstra_tol * std::max(1.0, z.norm())) break;
  }
  return z;
}

}  // namespace

SdpResult sdp_bound(const DesignProblem& p, const SdpOptions& opts,
                    const std::optional<Eigen::VectorXd>& warm_u) {
  const Eigen::Index dim = p.dim();
  const auto traces = to_quadratic_list(p.constraints, dim);

  Eigen::MatrixXd u_lift;
  if (warm_u && warm_u->size() == dim) {
    u_lift = (*warm_u) * warm_u->transpose();
  } else {
    // Feasible scaled identity start.
    double worst = 0.0;
    for (const auto& q : traces) worst = std::max(worst, q.S.trace());
    u_lift = worst > 0 ? Eigen::MatrixXd((1.0 / worst) * Eigen::MatrixXd::Identity(dim, dim))
                       : Eigen::MatrixXd::Identity(dim, dim);
  }
  u_lift = project_spectrahedron(u_lift, traces, opts);

  auto lambda_of = [&](const Eigen::MatrixXd& lift) {
    const Eigen::MatrixXd mapped = p.Pp_stacked * lift * p.Pp_stacked.transpose();
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(p.m, p.m);
    for (int i = 0; i < p.N; ++i) q += mapped.block(i * p.m, i * p.m, p.m, p.m);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q);
    return std::make_pair(es.eigenvalues()(0), Eigen::VectorXd(es.eigenvectors().col(0)));
  };

  double best = -1.0;
  Eigen::MatrixXd best_lift = u_lift;
  Eigen::MatrixXd avg_lift = u_lift;
  double running_best_at_check = -1.0;
  SdpResult res;

  int k = 0;
  for (; k < opts.max_iter; ++k) {
    const auto [lambda, v] = lambda_of(u_lift);
    if (lambda > best) {
      best = lambda;
      best_lift = u_lift;
    }

    // Supergradient sum_i P'_i^T v v^T P'_i through the stacked rows.
    Eigen::MatrixXd t(p.N, dim);
    for (int i = 0; i < p.N; ++i)
      t.row(i) = v.transpose() * p.Pp_stacked.middleRows(i * p.m, p.m);
    const Eigen::MatrixXd grad = t.transpose() * t;

    const double gnorm = grad.norm();
    if (gnorm == 0.0) break;
    const double step = opts.tau * opts.step_l / (opts.step_l + k) / gnorm;
    u_lift = project_spectrahedron(u_lift + step * grad, traces, opts);
    avg_lift = (avg_lift * k + u_lift) / (k + 1);

    if ((k + 1) % opts.stall_window == 0) {
      // Ergodic average of the iterates; often ahead of the raw iterate on
      // nonsmooth problems.
      const auto [lambda_avg, v_avg] = lambda_of(avg_lift);
      if (lambda_avg > best) {
        best = lambda_avg;
        best_lift = avg_lift;
      }
      if (best - running_best_at_check < opts.tol * std::max(1.0, best)) {
        ++k;
        break;
      }
      running_best_at_check = best;
    }
  }

  res.lambda_sdp = best;
  res.iterations = k;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(best_lift);
  const Eigen::VectorXd d = es.eigenvalues();
  const double dmax = d.size() > 0 ? d(d.size() - 1) : 0.0;
  int rank = 0;
  for (Eigen::Index i = 0; i < d.size(); ++i)
    if (d(i) > opts.rank_tol * dmax) ++rank;
  res.rank = rank;
  if (rank == 1) {
    res.u_extracted = std::sqrt(dmax) * es.eigenvectors().col(d.size() - 1);
  }
  return res;
}

}  // namespace mfe
