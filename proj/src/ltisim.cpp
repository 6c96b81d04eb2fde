#include "mfe/ltisim.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>

namespace mfe {

namespace {

constexpr double kGolden = 0.6180339887498949;

double response_norm(const StateSpace& ss, double omega) {
  return freq_response_at(ss, omega).norm();
}

}  // namespace

double spectral_radius(const Eigen::MatrixXd& a) {
  if (a.rows() == 0) return 0.0;
  return a.eigenvalues().cwiseAbs().maxCoeff();
}

bool is_stable(const StateSpace& ss) {
  if (ss.n_states() == 0) return true;
  if (ss.time_domain == TimeDomain::kDiscrete) return spectral_radius(ss.A) < 1.0;
  return ss.A.eigenvalues().real().maxCoeff() < 0.0;
}

StateSpace realize(const PolyMatrix& d, const PolyMatrix& p, TimeDomain td) {
  if (d.rows() != 1 || d.cols() != 1) throw DimensionError("realize: d must be 1x1");
  const int n = d.degree();
  if (p.degree() > n)
    throw ImproperFilter("realize: numerator degree " + std::to_string(p.degree()) +
                         " exceeds denominator degree " + std::to_string(n));
  const double lead = d.coeff(n)(0, 0);
  if (lead == 0.0) throw DimensionError("realize: denominator leading coefficient is zero");

  // Monic denominator; scale the numerator to keep d^-1 P unchanged.
  Eigen::VectorXd dc(n + 1);
  for (int k = 0; k <= n; ++k) dc(k) = d.coeff(k)(0, 0) / lead;
  PolyMatrix pn = p * (1.0 / lead);

  const Eigen::Index n_in = p.cols(), n_out = p.rows();
  StateSpace ss;
  ss.time_domain = td;
  ss.A = Eigen::MatrixXd::Zero(n * n_in, n * n_in);
  ss.B = Eigen::MatrixXd::Zero(n * n_in, n_in);
  ss.C = Eigen::MatrixXd::Zero(n_out, n * n_in);
  ss.D = Eigen::MatrixXd::Zero(n_out, n_in);

  for (Eigen::Index j = 0; j < n_in; ++j) {
    Eigen::MatrixXd dcoef = pn.coeff_or_zero(n).col(j);  // feedthrough from the q^n term
    ss.D.col(j) = dcoef;
    if (n == 0) continue;
    // Companion block for input j.
    const Eigen::Index at = j * n;
    for (int i = 0; i + 1 < n; ++i) ss.A(at + i, at + i + 1) = 1.0;
    for (int k = 0; k < n; ++k) ss.A(at + n - 1, at + k) = -dc(k);
    ss.B(at + n - 1, j) = 1.0;
    // Numerator remainder after polynomial division by the monic denominator.
    for (int k = 0; k < n; ++k)
      ss.C.block(0, at + k, n_out, 1) = pn.coeff_or_zero(k).col(j) - dcoef * dc(k);
  }
  return ss;
}

StateSpace c2d_exact(const StateSpace& ss, double h) {
  if (ss.time_domain != TimeDomain::kContinuous)
    throw ConfigError("c2d_exact: system is already discrete");
  if (!(h > 0.0)) throw ConfigError("c2d_exact: sample interval must be positive");
  const Eigen::Index n = ss.n_states(), p = ss.n_inputs();
  StateSpace out = ss;
  out.time_domain = TimeDomain::kDiscrete;
  out.h = h;
  if (n == 0) return out;
  Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n + p, n + p);
  aug.topLeftCorner(n, n) = ss.A;
  aug.topRightCorner(n, p) = ss.B;
  const Eigen::MatrixXd phi = (aug * h).exp();
  out.A = phi.topLeftCorner(n, n);
  out.B = phi.topRightCorner(n, p);
  return out;
}

Eigen::MatrixXd simulate(const StateSpace& ss, const Eigen::MatrixXd& u,
                         const Eigen::VectorXd& x0) {
  Eigen::VectorXd x = x0;
  return simulate_keep_state(ss, u, x);
}

Eigen::MatrixXd simulate_keep_state(const StateSpace& ss, const Eigen::MatrixXd& u,
                                    Eigen::VectorXd& x_inout) {
  if (u.cols() != ss.n_inputs()) throw DimensionError("simulate: input width disagrees");
  if (x_inout.size() != ss.n_states()) throw DimensionError("simulate: bad state size");
  const Eigen::Index nt = u.rows();
  Eigen::MatrixXd y(nt, ss.n_outputs());
  for (Eigen::Index k = 0; k < nt; ++k) {
    y.row(k) = (ss.C * x_inout + ss.D * u.row(k).transpose()).transpose();
    x_inout = ss.A * x_inout + ss.B * u.row(k).transpose();
  }
  return y;
}

Eigen::MatrixXcd freq_response(const StateSpace& ss, std::complex<double> z) {
  const Eigen::Index n = ss.n_states();
  Eigen::MatrixXcd d = ss.D.cast<std::complex<double>>();
  if (n == 0) return d;
  Eigen::MatrixXcd zi = z * Eigen::MatrixXcd::Identity(n, n) - ss.A.cast<std::complex<double>>();
  return ss.C.cast<std::complex<double>>() * zi.lu().solve(ss.B.cast<std::complex<double>>()) + d;
}

Eigen::MatrixXcd freq_response_at(const StateSpace& ss, double omega) {
  if (ss.time_domain == TimeDomain::kContinuous)
    return freq_response(ss, std::complex<double>(0.0, omega));
  const double h = ss.h > 0.0 ? ss.h : 1.0;
  return freq_response(ss, std::exp(std::complex<double>(0.0, omega * h)));
}

double hinfF_norm(const StateSpace& ss, const HinfOptions& opts) {
  if (!is_stable(ss)) throw UnstableSystem("hinfF_norm: system is unstable");
  const double h = ss.h > 0.0 ? ss.h : 1.0;
  const double wmax = ss.time_domain == TimeDomain::kDiscrete ? M_PI / h
                                                               : opts.omega_max_continuous;
  std::vector<double> grid;
  grid.reserve(opts.grid_points + 2);
  grid.push_back(0.0);
  const double lw0 = std::log(opts.omega_min), lw1 = std::log(wmax);
  for (int i = 0; i < opts.grid_points; ++i)
    grid.push_back(std::exp(lw0 + (lw1 - lw0) * i / (opts.grid_points - 1.0)));

  size_t best = 0;
  double best_val = -1.0;
  for (size_t i = 0; i < grid.size(); ++i) {
    const double v = response_norm(ss, grid[i]);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  // Golden-section refinement inside the bracketing interval.
  double lo = grid[best > 0 ? best - 1 : 0];
  double hi = grid[std::min(best + 1, grid.size() - 1)];
  double x1 = hi - kGolden * (hi - lo), x2 = lo + kGolden * (hi - lo);
  double f1 = response_norm(ss, x1), f2 = response_norm(ss, x2);
  for (int it = 0; it < 200 && (hi - lo) > opts.rel_tol * 1e-2 * std::max(1.0, hi); ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kGolden * (hi - lo);
      f2 = response_norm(ss, x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kGolden * (hi - lo);
      f1 = response_norm(ss, x1);
    }
    best_val = std::max({best_val, f1, f2});
  }
  return best_val;
}

Eigen::MatrixXd discrete_gramian(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd x = b * b.transpose();
  Eigen::MatrixXd ak = a;
  for (int it = 0; it < 200; ++it) {
    const Eigen::MatrixXd update = ak * x * ak.transpose();
    x += update;
    if (update.norm() <= 1e-16 * std::max(1.0, x.norm())) break;
    ak = ak * ak;
  }
  return 0.5 * (x + x.transpose());
}

double h2_norm(const StateSpace& ss) {
  if (ss.time_domain != TimeDomain::kDiscrete)
    throw ConfigError("h2_norm: implemented for discrete systems");
  if (!is_stable(ss)) throw UnstableSystem("h2_norm: system is unstable");
  double acc = ss.D.squaredNorm();
  if (ss.n_states() > 0) {
    const Eigen::MatrixXd x = discrete_gramian(ss.A, ss.B);
    acc += (ss.C * x * ss.C.transpose()).trace();
  }
  return std::sqrt(std::max(0.0, acc));
}

double peak_to_peak_bound(const StateSpace& ss, double tail_tol) {
  if (ss.time_domain != TimeDomain::kDiscrete)
    throw ConfigError("peak_to_peak_bound: implemented for discrete systems");
  if (!is_stable(ss)) throw UnstableSystem("peak_to_peak_bound: system is unstable");
  Eigen::VectorXd row_sums = ss.D.cwiseAbs().rowwise().sum();
  if (ss.n_states() == 0) return row_sums.maxCoeff();

  Eigen::MatrixXd cak = ss.C;
  int k = 0;
  const double bnorm = ss.B.norm();
  for (;;) {
    row_sums += (cak * ss.B).cwiseAbs().rowwise().sum();
    cak = cak * ss.A;
    ++k;
    if (k >= 16 && (k & (k - 1)) == 0) {  // check the tail at powers of two
      const Eigen::MatrixXd ak = ss.A.pow(k);
      const double rho = std::pow(ak.norm(), 1.0 / k);
      if (rho < 1.0) {
        const double tail = cak.norm() * bnorm / (1.0 - rho);
        if (tail <= tail_tol * row_sums.maxCoeff()) {
          row_sums.array() += tail;
          break;
        }
      }
    }
    if (k > 2000000) throw UnstableSystem("peak_to_peak_bound: tail did not converge");
  }
  return row_sums.maxCoeff();
}

StateSpace minimal_realization(const StateSpace& ss, double tol) {
  if (ss.time_domain != TimeDomain::kDiscrete)
    throw ConfigError("minimal_realization: implemented for discrete systems");
  if (ss.n_states() == 0) return ss;
  if (!is_stable(ss)) throw UnstableSystem("minimal_realization: system is unstable");

  const Eigen::MatrixXd p = discrete_gramian(ss.A, ss.B);
  const Eigen::MatrixXd q = discrete_gramian(ss.A.transpose(), ss.C.transpose());

  // Symmetric square-root factors.
  auto factor = [](const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
    return Eigen::MatrixXd(es.eigenvectors() * ev.cwiseSqrt().asDiagonal());
  };
  const Eigen::MatrixXd rp = factor(p), rq = factor(q);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(rq.transpose() * rp,
                                        Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd hankel = svd.singularValues();
  const double hmax = hankel.size() > 0 ? hankel(0) : 0.0;
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < hankel.size(); ++i)
    if (hankel(i) > tol * hmax) ++r;
  if (r == 0) {
    StateSpace out = ss;
    out.A = Eigen::MatrixXd::Zero(0, 0);
    out.B = Eigen::MatrixXd::Zero(0, ss.n_inputs());
    out.C = Eigen::MatrixXd::Zero(ss.n_outputs(), 0);
    return out;
  }
  const Eigen::VectorXd s_inv_sqrt = hankel.head(r).cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd t = rp * svd.matrixV().leftCols(r) * s_inv_sqrt.asDiagonal();
  const Eigen::MatrixXd ti = s_inv_sqrt.asDiagonal() * svd.matrixU().leftCols(r).transpose() *
                             rq.transpose();
  StateSpace out = ss;
  out.A = ti * ss.A * t;
  out.B = ti * ss.B;
  out.C = ss.C * t;
  return out;
}

StateSpace stack_outputs(const StateSpace& top, const StateSpace& bottom) {
  if (top.n_inputs() != bottom.n_inputs())
    throw DimensionError("stack_outputs: input counts disagree");
  if (top.time_domain != bottom.time_domain)
    throw ConfigError("stack_outputs: time domains disagree");
  StateSpace out;
  out.time_domain = top.time_domain;
  out.h = top.h;
  const Eigen::Index n1 = top.n_states(), n2 = bottom.n_states();
  out.A = Eigen::MatrixXd::Zero(n1 + n2, n1 + n2);
  out.A.topLeftCorner(n1, n1) = top.A;
  out.A.bottomRightCorner(n2, n2) = bottom.A;
  out.B = Eigen::MatrixXd(n1 + n2, top.n_inputs());
  out.B << top.B, bottom.B;
  out.C = Eigen::MatrixXd::Zero(top.n_outputs() + bottom.n_outputs(), n1 + n2);
  out.C.topLeftCorner(top.n_outputs(), n1) = top.C;
  out.C.bottomRightCorner(bottom.n_outputs(), n2) = bottom.C;
  out.D = Eigen::MatrixXd(top.n_outputs() + bottom.n_outputs(), top.n_inputs());
  out.D << top.D, bottom.D;
  return out;
}

StateSpace series(const StateSpace& first, const StateSpace& second) {
  if (second.n_inputs() != first.n_outputs())
    throw DimensionError("series: interconnection widths disagree");
  if (first.time_domain != second.time_domain)
    throw ConfigError("series: time domains disagree");
  StateSpace out;
  out.time_domain = first.time_domain;
  out.h = first.h;
  const Eigen::Index n1 = first.n_states(), n2 = second.n_states();
  out.A = Eigen::MatrixXd::Zero(n1 + n2, n1 + n2);
  out.A.topLeftCorner(n1, n1) = first.A;
  out.A.bottomLeftCorner(n2, n1) = second.B * first.C;
  out.A.bottomRightCorner(n2, n2) = second.A;
  out.B = Eigen::MatrixXd(n1 + n2, first.n_inputs());
  out.B << first.B, second.B * first.D;
  out.C = Eigen::MatrixXd(second.n_outputs(), n1 + n2);
  out.C << second.D * first.C, second.C;
  out.D = second.D * first.D;
  return out;
}

}  // namespace mfe
