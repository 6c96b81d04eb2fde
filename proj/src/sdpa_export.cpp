#include "mfe/input_design.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>

namespace mfe {

namespace {

/// Variable numbering: x_1 = lambda, then the upper triangle of the lifted
/// matrix column by column (j <= k), 1-based as SDPA expects.
int var_index(Eigen::Index j, Eigen::Index k) {
  // j <= k; count entries of columns before k, then the offset inside column k.
  return 2 + static_cast<int>(k * (k + 1) / 2 + j);
}

void write_entry(std::ostream& os, int matno, int blkno, Eigen::Index i, Eigen::Index j,
                 double value) {
  if (value == 0.0) return;
  os << matno << " " << blkno << " " << (i + 1) << " " << (j + 1) << " "
     << std::setprecision(17) << value << "\n";
}

}  // namespace

void export_sdpa(const DesignProblem& p, const std::string& path) {
  const Eigen::Index dim = p.dim();
  const auto traces = to_quadratic_list(p.constraints, dim);
  const int n_c = static_cast<int>(traces.size());
  const int n_vars = 1 + static_cast<int>(dim * (dim + 1) / 2);

  std::ofstream os(path);
  if (!os) throw Error("export_sdpa: cannot open " + path);
  os << "* E-optimal input design relaxation: max lambda,\n";
  os << "*   sum_i P'_i U P'_i^T >= lambda I, tr(S_l U) <= 1, U >= 0\n";
  os << "* variables: x1 = lambda, then vech(U) column-major (j <= k)\n";
  os << n_vars << " = mDIM\n";
  os << 3 << " = nBLOCK\n";
  os << p.m << " " << dim << " " << -n_c << " = bLOCKsTRUCT\n";

  // Objective: SDPA minimizes c^T x; maximizing lambda means c = (-1, 0, ...).
  os << -1;
  for (int i = 1; i < n_vars; ++i) os << " 0";
  os << "\n";

  // F_0: only the trace block carries the constant -1 entries.
  for (int l = 0; l < n_c; ++l) write_entry(os, 0, 3, l, l, -1.0);

  // lambda: -I in block 1.
  for (int i = 0; i < p.m; ++i) write_entry(os, 1, 1, i, i, -1.0);

  // Column j of P'_i for all i, stacked: Pp_stacked col slices.
  for (Eigen::Index k = 0; k < dim; ++k) {
    for (Eigen::Index j = 0; j <= k; ++j) {
      const int var = var_index(j, k);
      // Block 1: A_jk = sum_i P'_i E_jk P'_i^T.
      Eigen::MatrixXd a = Eigen::MatrixXd::Zero(p.m, p.m);
      for (int i = 0; i < p.N; ++i) {
        const auto pj = p.Pp[i].col(j);
        const auto pk = p.Pp[i].col(k);
        if (j == k) {
          a.noalias() += pj * pj.transpose();
        } else {
          a.noalias() += pj * pk.transpose();
          a.noalias() += pk * pj.transpose();
        }
      }
      for (Eigen::Index r = 0; r < p.m; ++r)
        for (Eigen::Index c = r; c < p.m; ++c) write_entry(os, var, 1, r, c, a(r, c));
      // Block 2: the lifted matrix itself.
      write_entry(os, var, 2, j, k, 1.0);
      // Block 3: trace slacks.
      for (int l = 0; l < n_c; ++l) {
        const double t = (j == k) ? traces[l].S(j, j) : 2.0 * traces[l].S(j, k);
        write_entry(os, var, 3, l, l, -t);
      }
    }
  }
}

}  // namespace mfe
