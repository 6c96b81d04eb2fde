#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "mfe/model.hpp"
#include "mfe/polymat.hpp"

namespace mfe {

/// Residual generator d^-1 N L, regressor generator d^-1 M, and the auxiliary
/// polynomial matrices entering the error analysis.
struct GeneratorSet {
  PolyMatrix denominator;               // d(q), 1x1; set by make_denominator
  PolyMatrix N;                         // 1 x n_r annihilator row
  PolyMatrix M;                         // m x n_z, rows N*G_i padded to one degree
  std::vector<PolyMatrix> G;            // m of n_r x n_z
  std::vector<std::vector<PolyMatrix>> J;  // m x m of 1 x (n_xi + n_z)
  std::vector<PolyMatrix> F;            // m of 1 x n_w
  PolyMatrix H_dagger;
  double s_min_blkrow_M = 0.0;
  int annihilator_dim = 0;  // dimension of the null space searched
  int degree = 0;           // annihilator degree
  int trials_used = 0;
  std::uint64_t seed = 0;

  bool has_denominator() const { return denominator.rows() == 1; }
};

/// G_i = H'_i Hdag L - L'_i for every fault.
std::vector<PolyMatrix> compute_G(const DaeModel& m, const PolyMatrix& h_dagger);

/// J_ij = [-N H'_i Hdag H'_j, -N H'_i Hdag L'_j] and F_i = -N H'_i Hdag W.
std::pair<std::vector<std::vector<PolyMatrix>>, std::vector<PolyMatrix>> compute_JF(
    const PolyMatrix& n, const DaeModel& m, const PolyMatrix& h_dagger);

struct DesignOptions {
  int degree = -1;           // annihilator degree; -1 searches upward for the first nonempty
  int trials = 200;          // Monte-Carlo candidates when the null space has dimension > 1
  std::uint64_t seed = 1;
  double tol_rank = kTolRank;
  int left_inverse_k_max = 10;
};

/// Designs the annihilator N and regressor map M: null-space candidates are
/// scored by the smallest singular value of blkrow(M) and the best one wins
/// (ties to the lowest index). A one-dimensional null space is used directly.
/// The candidate block-row is scaled to unit norm with its largest-magnitude
/// entry positive. The returned set has no denominator yet.
GeneratorSet design(const DaeModel& m, const DesignOptions& opts = {});

/// Deterministic per-candidate unit direction used by design(); exposed so the
/// Monte-Carlo reduction can be replayed.
Eigen::VectorXd design_candidate_direction(std::uint64_t seed, int index, int dim);

/// Monic product of (q - pole_i), optionally scaled to unit gain at q=0
/// (continuous) or q=1 (discrete). Poles must be strictly stable for the time
/// domain and closed under conjugation, and at least min_degree of them.
PolyMatrix make_denominator(const std::vector<std::complex<double>>& poles, bool normalize_dc,
                            TimeDomain td, int min_degree = 0);

/// One outer-loop relinearization step: identical to perturb(m, f_hat).
DaeModel gauss_newton_update(const DaeModel& m, const Eigen::VectorXd& f_hat);

/// Dictionary of scalar time functions closed under time derivative
/// (continuous) or backward shift by h (discrete).
class TvDictionary {
 public:
  explicit TvDictionary(TimeDomain td, double shift_h = 1.0);

  /// t^power; all lower powers are added too. Returns the index of t^power.
  int add_polynomial(int power);

  /// sin(omega t + phase); the quadrature partner is added too.
  int add_sinusoid(double omega, double phase = 0.0);

  /// User-supplied function with an explicit transport expansion
  /// (derivative for continuous time, backward shift for discrete).
  int add_custom(std::function<double(double)> value,
                 std::vector<std::pair<double, int>> transport);

  int size() const { return static_cast<int>(values_.size()); }
  double value(int index, double t) const { return values_.at(index)(t); }

  /// Expansion of d/dt phi (continuous) or phi(t - h) (discrete) in the
  /// dictionary. Throws ClosureIncomplete for custom entries without a table.
  const std::vector<std::pair<double, int>>& transport(int index) const;

  TimeDomain time_domain() const { return td_; }

 private:
  TimeDomain td_;
  double h_;
  std::vector<std::function<double(double)>> values_;
  std::vector<std::vector<std::pair<double, int>>> transport_;
  std::vector<int> poly_power_index_;  // power -> dictionary index
};

struct TvTerm {
  PolyMatrix G;    // rewritten polynomial factor
  int phi_index;   // dictionary index of the surviving basis signal
};

/// Rewrites phi(t) G(q) as sum_j G'_j(q) phi'_j(t) by commuting the basis
/// signal rightward through the powers of q. Continuous time uses
/// phi q^d = sum_j (-1)^j C(d,j) q^(d-j) phi^(j); discrete time shifts the
/// basis sample index backward once per power.
std::vector<TvTerm> tv_rewrite(const PolyMatrix& g, const TvDictionary& dict, int phi_index);

}  // namespace mfe
