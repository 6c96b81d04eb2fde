#include "mfe/polymat.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <sstream>

namespace mfe {

namespace {

std::string shape_str(const PolyMatrix& p) {
  std::ostringstream os;
  os << p.rows() << "x" << p.cols() << " (deg " << p.degree() << ")";
  return os.str();
}

}  // namespace

PolyMatrix::PolyMatrix(Eigen::Index rows, Eigen::Index cols)
    : rows_(rows), cols_(cols), coeffs_{Eigen::MatrixXd::Zero(rows, cols)} {}

PolyMatrix::PolyMatrix(Eigen::MatrixXd constant)
    : rows_(constant.rows()), cols_(constant.cols()) {
  coeffs_.push_back(std::move(constant));
}

PolyMatrix::PolyMatrix(std::vector<Eigen::MatrixXd> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) throw DimensionError("PolyMatrix needs at least one coefficient");
  rows_ = coeffs_.front().rows();
  cols_ = coeffs_.front().cols();
  for (const auto& c : coeffs_) {
    if (c.rows() != rows_ || c.cols() != cols_)
      throw DimensionError("PolyMatrix coefficients must share one shape");
  }
  canonicalize();
}

PolyMatrix PolyMatrix::identity(Eigen::Index n) {
  return PolyMatrix(Eigen::MatrixXd::Identity(n, n));
}

PolyMatrix PolyMatrix::q() {
  std::vector<Eigen::MatrixXd> c;
  c.push_back(Eigen::MatrixXd::Zero(1, 1));
  c.push_back(Eigen::MatrixXd::Ones(1, 1));
  return PolyMatrix(std::move(c));
}

Eigen::MatrixXd PolyMatrix::coeff_or_zero(int k) const {
  if (k >= 0 && k < static_cast<int>(coeffs_.size())) return coeffs_[k];
  return Eigen::MatrixXd::Zero(rows_, cols_);
}

PolyMatrix PolyMatrix::row(Eigen::Index i) const {
  std::vector<Eigen::MatrixXd> c;
  c.reserve(coeffs_.size());
  for (const auto& m : coeffs_) c.push_back(m.row(i));
  return PolyMatrix(std::move(c));
}

bool PolyMatrix::is_zero(double tol) const { return max_abs() <= tol; }

double PolyMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& c : coeffs_) {
    if (c.size() > 0) m = std::max(m, c.cwiseAbs().maxCoeff());
  }
  return m;
}

PolyMatrix& PolyMatrix::operator+=(const PolyMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    throw DimensionError("PolyMatrix sum: shape mismatch " + shape_str(*this) + " vs " +
                         shape_str(other));
  if (other.coeffs_.size() > coeffs_.size())
    coeffs_.resize(other.coeffs_.size(), Eigen::MatrixXd::Zero(rows_, cols_));
  for (size_t k = 0; k < other.coeffs_.size(); ++k) coeffs_[k] += other.coeffs_[k];
  canonicalize();
  return *this;
}

PolyMatrix& PolyMatrix::operator-=(const PolyMatrix& other) { return *this += -other; }

PolyMatrix& PolyMatrix::operator*=(double s) {
  for (auto& c : coeffs_) c *= s;
  canonicalize();
  return *this;
}

PolyMatrix PolyMatrix::operator-() const {
  PolyMatrix out = *this;
  for (auto& c : out.coeffs_) c = -c;
  return out;
}

void PolyMatrix::canonicalize(double rel_tol) {
  if (coeffs_.empty()) {
    coeffs_.push_back(Eigen::MatrixXd::Zero(rows_, cols_));
    return;
  }
  const double scale = max_abs();
  const double thresh = rel_tol * scale;
  while (coeffs_.size() > 1) {
    const auto& last = coeffs_.back();
    if (last.size() == 0 || last.cwiseAbs().maxCoeff() <= thresh)
      coeffs_.pop_back();
    else
      break;
  }
}

Eigen::MatrixXd blkrow(const PolyMatrix& p) {
  const int d = p.degree();
  Eigen::MatrixXd out(p.rows(), (d + 1) * p.cols());
  for (int k = 0; k <= d; ++k) out.middleCols(k * p.cols(), p.cols()) = p.coeff(k);
  return out;
}

Eigen::MatrixXd toeplitz(const PolyMatrix& p, int block_rows) {
  if (block_rows < 1) throw DimensionError("toeplitz: block_rows must be >= 1");
  const int d = p.degree();
  const Eigen::Index r = p.rows(), c = p.cols();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(block_rows * r, (block_rows + d) * c);
  for (int i = 0; i < block_rows; ++i)
    for (int k = 0; k <= d; ++k) out.block(i * r, (i + k) * c, r, c) = p.coeff(k);
  return out;
}

PolyMatrix from_blkrow(const Eigen::MatrixXd& flat, Eigen::Index rows, Eigen::Index cols) {
  if (flat.rows() != rows || cols <= 0 || flat.cols() % cols != 0)
    throw DimensionError("from_blkrow: flat matrix does not split into blocks");
  const Eigen::Index n = flat.cols() / cols;
  std::vector<Eigen::MatrixXd> c;
  c.reserve(n);
  for (Eigen::Index k = 0; k < n; ++k) c.push_back(flat.middleCols(k * cols, cols));
  return PolyMatrix(std::move(c));
}

PolyMatrix mul(const PolyMatrix& a, const PolyMatrix& b) {
  if (a.cols() != b.rows())
    throw DimensionError("mul: inner dimensions disagree (" + std::to_string(a.cols()) +
                         " vs " + std::to_string(b.rows()) + ")");
  const int da = a.degree(), db = b.degree();
  std::vector<Eigen::MatrixXd> c(da + db + 1, Eigen::MatrixXd::Zero(a.rows(), b.cols()));
  for (int i = 0; i <= da; ++i)
    for (int j = 0; j <= db; ++j) c[i + j] += a.coeff(i) * b.coeff(j);
  return PolyMatrix(std::move(c));
}

PolyMatrix hcat(const PolyMatrix& a, const PolyMatrix& b) {
  if (a.rows() != b.rows()) throw DimensionError("hcat: row counts disagree");
  const int d = std::max(a.degree(), b.degree());
  std::vector<Eigen::MatrixXd> c;
  c.reserve(d + 1);
  for (int k = 0; k <= d; ++k) {
    Eigen::MatrixXd m(a.rows(), a.cols() + b.cols());
    m << a.coeff_or_zero(k), b.coeff_or_zero(k);
    c.push_back(std::move(m));
  }
  return PolyMatrix(std::move(c));
}

PolyMatrix vcat(const std::vector<PolyMatrix>& blocks) {
  if (blocks.empty()) throw DimensionError("vcat: no blocks");
  const Eigen::Index cols = blocks.front().cols();
  Eigen::Index rows = 0;
  int d = 0;
  for (const auto& b : blocks) {
    if (b.cols() != cols) throw DimensionError("vcat: column counts disagree");
    rows += b.rows();
    d = std::max(d, b.degree());
  }
  std::vector<Eigen::MatrixXd> c(d + 1, Eigen::MatrixXd::Zero(rows, cols));
  for (int k = 0; k <= d; ++k) {
    Eigen::Index at = 0;
    for (const auto& b : blocks) {
      c[k].middleRows(at, b.rows()) = b.coeff_or_zero(k);
      at += b.rows();
    }
  }
  return PolyMatrix(std::move(c));
}

Eigen::MatrixXcd eval(const PolyMatrix& p, std::complex<double> z) {
  Eigen::MatrixXcd out = p.coeff(p.degree()).cast<std::complex<double>>();
  for (int k = p.degree() - 1; k >= 0; --k)
    out = (out * z + p.coeff(k).cast<std::complex<double>>()).eval();
  return out;
}

PolyMatrix left_inverse(const PolyMatrix& h, const LeftInverseOptions& opts) {
  if (h.rows() < h.cols())
    throw NoLeftInverse("left_inverse: fewer rows than columns");
  const Eigen::Index nc = h.cols();
  const int d = h.degree();
  double best_residual = -1.0;
  for (int k = 0; k <= opts.k_max; ++k) {
    const Eigen::MatrixXd hbar = toeplitz(h, k + 1);
    // Solve X * hbar = [I 0 ... 0] through the transposed system.
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero((k + 1 + d) * nc, nc);
    rhs.topRows(nc) = Eigen::MatrixXd::Identity(nc, nc);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(hbar.transpose(),
                                       Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::MatrixXd xt = svd.solve(rhs);
    const double residual = (hbar.transpose() * xt - rhs).norm();
    best_residual = (best_residual < 0) ? residual : std::min(best_residual, residual);
    if (residual < opts.tol_solve * std::sqrt(static_cast<double>(nc))) {
      PolyMatrix hdag = from_blkrow(xt.transpose(), nc, h.rows());
      PolyMatrix check = mul(hdag, h) - PolyMatrix::identity(nc);
      const double scale = std::max(1.0, hdag.max_abs() * h.max_abs());
      if (check.max_abs() < opts.tol_identity * scale) return hdag;
    }
  }
  std::ostringstream os;
  os << "left_inverse: no degree <= " << opts.k_max
     << " solves the block-row identity (best residual " << best_residual << ")";
  throw NoLeftInverse(os.str());
}

Eigen::MatrixXd left_null_space(const PolyMatrix& h, int degree, double tol_rank) {
  if (degree < 0) throw DimensionError("left_null_space: degree must be >= 0");
  const Eigen::MatrixXd hbar = toeplitz(h, degree + 1);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(hbar, Eigen::ComputeFullU);
  const Eigen::VectorXd s = svd.singularValues();
  const double smax = s.size() > 0 ? s(0) : 0.0;
  const Eigen::Index nrows = hbar.rows();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol_rank * smax) ++rank;
  if (smax == 0.0) rank = 0;
  const Eigen::Index b = nrows - rank;
  Eigen::MatrixXd out(b, nrows);
  for (Eigen::Index i = 0; i < b; ++i) out.row(i) = svd.matrixU().col(rank + i).transpose();
  return out;
}

bool has_nonzero_left_annihilator(const PolyMatrix& p, double tol_rank) {
  const Eigen::MatrixXd flat = blkrow(p);
  if (flat.rows() == 0) return false;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(flat);
  const Eigen::VectorXd s = svd.singularValues();
  const double smax = s.size() > 0 ? s(0) : 0.0;
  if (smax == 0.0) return true;  // zero matrix: every row direction annihilates
  if (flat.rows() > flat.cols()) return true;
  return s(s.size() - 1) <= tol_rank * smax;
}

}  // namespace mfe
