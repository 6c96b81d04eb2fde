#pragma once

#include <complex>
#include <vector>

#include <Eigen/Core>

#include "mfe/errors.hpp"

namespace mfe {

/// Default relative threshold for rank decisions against the largest singular value.
inline constexpr double kTolRank = 1e-9;

/// Relative threshold for trimming trailing coefficient matrices.
inline constexpr double kTrimTol = 1e-12;

/// Real polynomial matrix in the operator q, stored as coefficient matrices by
/// ascending power. Canonical form keeps the degree minimal: trailing
/// coefficients whose largest entry is below kTrimTol times the overall scale
/// are dropped (a degree-0 matrix always keeps one coefficient).
class PolyMatrix {
 public:
  PolyMatrix() = default;

  /// Zero matrix of the given shape, degree 0.
  PolyMatrix(Eigen::Index rows, Eigen::Index cols);

  /// Degree-0 polynomial matrix from a constant matrix.
  explicit PolyMatrix(Eigen::MatrixXd constant);

  /// From coefficients [P0, P1, ..., Pd]; canonicalizes.
  explicit PolyMatrix(std::vector<Eigen::MatrixXd> coeffs);

  static PolyMatrix identity(Eigen::Index n);

  /// The 1x1 polynomial q.
  static PolyMatrix q();

  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }

  const Eigen::MatrixXd& coeff(int k) const { return coeffs_.at(k); }
  Eigen::MatrixXd coeff_or_zero(int k) const;
  const std::vector<Eigen::MatrixXd>& coeffs() const { return coeffs_; }

  /// Single row as a 1 x cols polynomial matrix.
  PolyMatrix row(Eigen::Index i) const;

  bool is_zero(double tol = 0.0) const;

  /// Largest absolute coefficient entry.
  double max_abs() const;

  PolyMatrix& operator+=(const PolyMatrix& other);
  PolyMatrix& operator-=(const PolyMatrix& other);
  PolyMatrix& operator*=(double s);

  friend PolyMatrix operator+(PolyMatrix a, const PolyMatrix& b) { return a += b; }
  friend PolyMatrix operator-(PolyMatrix a, const PolyMatrix& b) { return a -= b; }
  friend PolyMatrix operator*(double s, PolyMatrix p) { return p *= s; }
  friend PolyMatrix operator*(PolyMatrix p, double s) { return p *= s; }
  PolyMatrix operator-() const;

  void canonicalize(double rel_tol = kTrimTol);

 private:
  Eigen::Index rows_ = 0;
  Eigen::Index cols_ = 0;
  std::vector<Eigen::MatrixXd> coeffs_;
};

/// [P0 P1 ... Pd] concatenated horizontally; rows x (d+1)*cols.
Eigen::MatrixXd blkrow(const PolyMatrix& p);

/// Banded block-Toeplitz form with the given number of block rows; the k-th
/// block row carries [P0 ... Pd] shifted k block columns right. Result is
/// (block_rows*rows) x ((block_rows+d)*cols).
Eigen::MatrixXd toeplitz(const PolyMatrix& p, int block_rows);

/// Inverse of blkrow for a known shape: splits a rows x (k+1)*cols matrix into
/// k+1 coefficient blocks.
PolyMatrix from_blkrow(const Eigen::MatrixXd& flat, Eigen::Index rows, Eigen::Index cols);

/// Coefficient-wise convolution product.
PolyMatrix mul(const PolyMatrix& a, const PolyMatrix& b);
inline PolyMatrix operator*(const PolyMatrix& a, const PolyMatrix& b) { return mul(a, b); }

/// Horizontal concatenation [a b].
PolyMatrix hcat(const PolyMatrix& a, const PolyMatrix& b);

/// Vertical concatenation, padding degrees as needed.
PolyMatrix vcat(const std::vector<PolyMatrix>& blocks);

/// Evaluate sum P_k z^k.
Eigen::MatrixXcd eval(const PolyMatrix& p, std::complex<double> z);

struct LeftInverseOptions {
  int k_max = 10;
  double tol_solve = 1e-8;     // residual threshold for the block-row solve
  double tol_identity = 1e-8;  // verification threshold on mul(Hdag, H) - I
};

/// Minimum-degree polynomial left inverse: the smallest k <= k_max such that
/// blkrow(Hdag) * toeplitz(H, k+1) = [I 0 ... 0] has a solution with residual
/// below tol_solve. Ties inside the least-squares solve go to the minimum-norm
/// solution. Throws NoLeftInverse if no degree works.
PolyMatrix left_inverse(const PolyMatrix& h, const LeftInverseOptions& opts = {});

/// Orthonormal rows spanning the left null space of toeplitz(H, k+1); the
/// result is b x (k+1)*rows with b possibly zero. Null directions are singular
/// vectors with singular value below tol_rank times the largest one.
Eigen::MatrixXd left_null_space(const PolyMatrix& h, int degree, double tol_rank = kTolRank);

/// True iff some constant nonzero v satisfies v^T P(q) == 0, i.e. blkrow(P)
/// is row-rank deficient.
bool has_nonzero_left_annihilator(const PolyMatrix& p, double tol_rank = kTolRank);

}  // namespace mfe
