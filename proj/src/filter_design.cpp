#include "mfe/filter_design.hpp"

#include "mfe/threading.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <map>
#include <random>
#include <sstream>

namespace mfe {

namespace {

/// Stream-split hash so candidate draws are independent of draw order.
std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Unit norm with the largest-magnitude entry positive.
void normalize_signed(Eigen::VectorXd& v) {
  const double norm = v.norm();
  if (norm == 0.0) return;
  v /= norm;
  Eigen::Index imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  if (v(imax) < 0.0) v = -v;
}

PolyMatrix pad_degree(const PolyMatrix& p, int degree) {
  std::vector<Eigen::MatrixXd> c;
  c.reserve(degree + 1);
  for (int k = 0; k <= degree; ++k) c.push_back(p.coeff_or_zero(k));
  PolyMatrix out(std::move(c));
  return out;
}

}  // namespace

std::vector<PolyMatrix> compute_G(const DaeModel& m, const PolyMatrix& h_dagger) {
  std::vector<PolyMatrix> g;
  g.reserve(m.faults.size());
  const PolyMatrix hdl = mul(h_dagger, m.L);
  for (const auto& f : m.faults) g.push_back(mul(f.H, hdl) - f.L);
  return g;
}

std::pair<std::vector<std::vector<PolyMatrix>>, std::vector<PolyMatrix>> compute_JF(
    const PolyMatrix& n, const DaeModel& m, const PolyMatrix& h_dagger) {
  const int mf = m.fault_count();
  std::vector<std::vector<PolyMatrix>> j(mf);
  std::vector<PolyMatrix> f(mf, PolyMatrix(1, m.n_w()));
  for (int i = 0; i < mf; ++i) {
    const PolyMatrix nhi = mul(n, m.faults[i].H);
    const PolyMatrix nhih = mul(nhi, h_dagger);
    f[i] = -mul(nhih, m.W);
    j[i].reserve(mf);
    for (int k = 0; k < mf; ++k)
      j[i].push_back(hcat(-mul(nhih, m.faults[k].H), -mul(nhih, m.faults[k].L)));
  }
  return {std::move(j), std::move(f)};
}

Eigen::VectorXd design_candidate_direction(std::uint64_t seed, int index, int dim) {
  std::mt19937_64 rng(splitmix64(seed ^ (0x51ab3c97ULL + static_cast<std::uint64_t>(index))));
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v(i) = gauss(rng);
  const double norm = v.norm();
  if (norm > 0) v /= norm;
  return v;
}

GeneratorSet design(const DaeModel& m, const DesignOptions& opts) {
  m.validate();
  LeftInverseOptions li;
  li.k_max = opts.left_inverse_k_max;
  const PolyMatrix h_dagger = left_inverse(m.H, li);

  int degree = opts.degree;
  Eigen::MatrixXd null_rows;
  if (degree < 0) {
    const int cap = static_cast<int>(m.n_xi()) + m.H.degree() + 1;
    for (int k = 0; k <= cap; ++k) {
      null_rows = left_null_space(m.H, k, opts.tol_rank);
      if (null_rows.rows() > 0) {
        degree = k;
        break;
      }
    }
    if (degree < 0) throw NoAnnihilator("design: no annihilator up to the degree cap");
  } else {
    null_rows = left_null_space(m.H, degree, opts.tol_rank);
    if (null_rows.rows() == 0)
      throw NoAnnihilator("design: left null space is empty at degree " +
                          std::to_string(degree));
  }

  const int b = static_cast<int>(null_rows.rows());
  const std::vector<PolyMatrix> g = compute_G(m, h_dagger);
  const int mf = m.fault_count();

  const int trials = (b == 1) ? 1 : opts.trials;

  struct Candidate {
    double score = -1.0;
    PolyMatrix n, m;
  };
  std::vector<Candidate> candidates(trials);
  parallel_for(trials, [&](int t) {
    Eigen::VectorXd flat;
    if (b == 1) {
      flat = null_rows.row(0).transpose();
    } else {
      flat = null_rows.transpose() * design_candidate_direction(opts.seed, t, b);
    }
    normalize_signed(flat);
    PolyMatrix n = from_blkrow(flat.transpose(), 1, m.n_r());

    std::vector<PolyMatrix> rows;
    rows.reserve(mf);
    int dmax = 0;
    for (int i = 0; i < mf; ++i) {
      rows.push_back(mul(n, g[i]));
      dmax = std::max(dmax, rows.back().degree());
    }
    for (auto& r : rows) r = pad_degree(r, dmax);
    PolyMatrix mmat = vcat(rows);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(blkrow(mmat));
    const Eigen::VectorXd s = svd.singularValues();
    candidates[t].score = s.size() >= mf ? s(mf - 1) : 0.0;
    candidates[t].n = std::move(n);
    candidates[t].m = std::move(mmat);
  });
  // index-ordered reduction keeps ties deterministic under any scheduling
  int winner = 0;
  for (int t = 1; t < trials; ++t)
    if (candidates[t].score > candidates[winner].score) winner = t;
  const double best_score = candidates[winner].score;
  PolyMatrix best_n = std::move(candidates[winner].n);
  PolyMatrix best_m = std::move(candidates[winner].m);

  const Eigen::JacobiSVD<Eigen::MatrixXd> best_svd(blkrow(best_m));
  const double smax = best_svd.singularValues()(0);
  if (!(best_score > opts.tol_rank * smax) || blkrow(best_m).rows() > blkrow(best_m).cols()) {
    std::ostringstream os;
    os << "design: no candidate reaches rank " << mf << " in blkrow(M) (best s_min "
       << best_score << "); faults are not independently sensible at degree " << degree;
    throw RankDeficientM(os.str());
  }

  GeneratorSet out;
  out.N = best_n;
  out.M = best_m;
  out.G = g;
  auto jf = compute_JF(best_n, m, h_dagger);
  out.J = std::move(jf.first);
  out.F = std::move(jf.second);
  out.H_dagger = h_dagger;
  out.s_min_blkrow_M = best_score;
  out.annihilator_dim = b;
  out.degree = degree;
  out.trials_used = trials;
  out.seed = opts.seed;
  return out;
}

PolyMatrix make_denominator(const std::vector<std::complex<double>>& poles, bool normalize_dc,
                            TimeDomain td, int min_degree) {
  if (static_cast<int>(poles.size()) < min_degree)
    throw InsufficientDegree("make_denominator: need at least " + std::to_string(min_degree) +
                             " poles, got " + std::to_string(poles.size()));
  std::vector<std::complex<double>> remaining = poles;
  for (const auto& p : poles) {
    const bool stable = td == TimeDomain::kContinuous ? p.real() < 0.0 : std::abs(p) < 1.0;
    if (!stable) {
      std::ostringstream os;
      os << "make_denominator: pole (" << p.real() << ", " << p.imag() << ") is not stable";
      throw UnstablePole(os.str());
    }
  }
  // Expand the monic product with complex coefficients, then realify.
  std::vector<std::complex<double>> c{1.0};
  for (const auto& p : poles) {
    std::vector<std::complex<double>> next(c.size() + 1, 0.0);
    for (size_t k = 0; k < c.size(); ++k) {
      next[k + 1] += c[k];
      next[k] -= p * c[k];
    }
    c = std::move(next);
  }
  double imag_max = 0.0;
  for (const auto& ck : c) imag_max = std::max(imag_max, std::abs(ck.imag()));
  if (imag_max > 1e-9)
    throw ConfigError("make_denominator: poles are not closed under conjugation");

  std::vector<Eigen::MatrixXd> coeffs;
  coeffs.reserve(c.size());
  for (size_t k = 0; k < c.size(); ++k)
    coeffs.push_back(Eigen::MatrixXd::Constant(1, 1, c[k].real()));
  PolyMatrix d(std::move(coeffs));
  if (normalize_dc) {
    const std::complex<double> z0 = td == TimeDomain::kContinuous ? 0.0 : 1.0;
    const double dc = eval(d, z0)(0, 0).real();
    if (std::abs(dc) < 1e-300)
      throw ConfigError("make_denominator: zero gain at the normalization point");
    d *= 1.0 / dc;
  }
  return d;
}

DaeModel gauss_newton_update(const DaeModel& m, const Eigen::VectorXd& f_hat) {
  return perturb(m, f_hat);
}

TvDictionary::TvDictionary(TimeDomain td, double shift_h) : td_(td), h_(shift_h) {}

int TvDictionary::add_polynomial(int power) {
  if (power < 0) throw ConfigError("TvDictionary: negative power");
  while (static_cast<int>(poly_power_index_.size()) <= power) {
    const int p = static_cast<int>(poly_power_index_.size());
    values_.push_back([p](double t) { return std::pow(t, p); });
    std::vector<std::pair<double, int>> tr;
    if (td_ == TimeDomain::kContinuous) {
      if (p > 0) tr.push_back({static_cast<double>(p), poly_power_index_[p - 1]});
    } else {
      // (t - h)^p expanded by the binomial theorem in the lower powers.
      double binom = 1.0;
      for (int j = p; j >= 0; --j) {
        const double w = binom * std::pow(-h_, p - j);
        tr.push_back({w, j == p ? static_cast<int>(values_.size()) - 1 : poly_power_index_[j]});
        binom = binom * j / (p - j + 1.0);
      }
    }
    transport_.push_back(std::move(tr));
    poly_power_index_.push_back(static_cast<int>(values_.size()) - 1);
  }
  return poly_power_index_[power];
}

int TvDictionary::add_sinusoid(double omega, double phase) {
  const int idx_sin = size();
  const int idx_cos = idx_sin + 1;
  values_.push_back([omega, phase](double t) { return std::sin(omega * t + phase); });
  values_.push_back([omega, phase](double t) { return std::cos(omega * t + phase); });
  if (td_ == TimeDomain::kContinuous) {
    transport_.push_back({{omega, idx_cos}});
    transport_.push_back({{-omega, idx_sin}});
  } else {
    const double c = std::cos(omega * h_), s = std::sin(omega * h_);
    transport_.push_back({{c, idx_sin}, {-s, idx_cos}});
    transport_.push_back({{s, idx_sin}, {c, idx_cos}});
  }
  return idx_sin;
}

int TvDictionary::add_custom(std::function<double(double)> value,
                             std::vector<std::pair<double, int>> transport) {
  values_.push_back(std::move(value));
  transport_.push_back(std::move(transport));
  return size() - 1;
}

const std::vector<std::pair<double, int>>& TvDictionary::transport(int index) const {
  const auto& tr = transport_.at(index);
  for (const auto& [w, idx] : tr) {
    if (idx < 0 || idx >= size())
      throw ClosureIncomplete("TvDictionary: transport leaves the dictionary");
  }
  return tr;
}

std::vector<TvTerm> tv_rewrite(const PolyMatrix& g, const TvDictionary& dict, int phi_index) {
  if (phi_index < 0 || phi_index >= dict.size())
    throw ConfigError("tv_rewrite: basis index out of range");

  // accum[idx] collects coefficient matrices by power of q.
  std::map<int, std::map<int, Eigen::MatrixXd>> accum;
  auto add = [&](int idx, int power, const Eigen::MatrixXd& mat) {
    auto& entry = accum[idx][power];
    if (entry.size() == 0)
      entry = mat;
    else
      entry += mat;
  };

  // Linear combinations of dictionary entries, transported j times.
  using Combo = std::vector<std::pair<double, int>>;
  auto transport_once = [&](const Combo& combo) {
    std::map<int, double> next;
    for (const auto& [w, idx] : combo)
      for (const auto& [tw, tidx] : dict.transport(idx)) next[tidx] += w * tw;
    Combo out;
    for (const auto& [idx, w] : next)
      if (w != 0.0) out.push_back({w, idx});
    return out;
  };

  for (int d = 0; d <= g.degree(); ++d) {
    const Eigen::MatrixXd& gd = g.coeff(d);
    if (gd.cwiseAbs().maxCoeff() == 0.0 && d > 0) continue;
    if (dict.time_domain() == TimeDomain::kContinuous) {
      // phi q^d = sum_j (-1)^j C(d,j) q^(d-j) phi^(j)
      Combo combo{{1.0, phi_index}};
      double binom = 1.0;
      for (int j = 0; j <= d; ++j) {
        const double sign = (j % 2 == 0) ? 1.0 : -1.0;
        for (const auto& [w, idx] : combo) add(idx, d - j, sign * binom * w * gd);
        if (j < d) {
          combo = transport_once(combo);
          if (combo.empty()) break;
          binom = binom * (d - j) / (j + 1.0);
        }
      }
    } else {
      // phi q^d = q^d phi(., -dh)
      Combo combo{{1.0, phi_index}};
      for (int j = 0; j < d; ++j) combo = transport_once(combo);
      for (const auto& [w, idx] : combo) add(idx, d, w * gd);
    }
  }

  std::vector<TvTerm> out;
  for (const auto& [idx, powers] : accum) {
    int dmax = 0;
    for (const auto& [p, mat] : powers) dmax = std::max(dmax, p);
    std::vector<Eigen::MatrixXd> coeffs(dmax + 1, Eigen::MatrixXd::Zero(g.rows(), g.cols()));
    for (const auto& [p, mat] : powers) coeffs[p] = mat;
    PolyMatrix gp(std::move(coeffs));
    if (!gp.is_zero(0.0)) out.push_back({std::move(gp), idx});
  }
  return out;
}

}  // namespace mfe
