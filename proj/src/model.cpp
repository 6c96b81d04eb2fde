#include "mfe/model.hpp"

#include <sstream>

namespace mfe {

namespace {

Eigen::MatrixXd or_zero(const Eigen::MatrixXd& m, Eigen::Index rows, Eigen::Index cols) {
  if (m.size() == 0) return Eigen::MatrixXd::Zero(rows, cols);
  if (m.rows() != rows || m.cols() != cols)
    throw DimensionError("state-space matrix has wrong shape");
  return m;
}

/// H-block [[-qG + A, B_d], [C, D_d]] for the state-space conversion.
PolyMatrix dae_h_block(const Eigen::MatrixXd& g, const Eigen::MatrixXd& a,
                       const Eigen::MatrixXd& bd, const Eigen::MatrixXd& c,
                       const Eigen::MatrixXd& dd) {
  const Eigen::Index nx = a.rows(), nd = bd.cols(), ny = c.rows();
  Eigen::MatrixXd h0(nx + ny, nx + nd), h1 = Eigen::MatrixXd::Zero(nx + ny, nx + nd);
  h0 << a, bd, c, dd;
  h1.topLeftCorner(nx, nx) = -g;
  return PolyMatrix(std::vector<Eigen::MatrixXd>{h0, h1});
}

PolyMatrix dae_l_block(Eigen::Index nx, const Eigen::MatrixXd& bu, const Eigen::MatrixXd& iy,
                       const Eigen::MatrixXd& du) {
  const Eigen::Index ny = iy.rows(), nu = bu.cols();
  Eigen::MatrixXd l0(nx + ny, ny + nu);
  l0 << Eigen::MatrixXd::Zero(nx, ny), bu, -iy, du;
  return PolyMatrix(l0);
}

}  // namespace

void StateSpaceModel::validate() const {
  const Eigen::Index nx = n_x();
  if (G.rows() != nx || G.cols() != nx || A.cols() != nx)
    throw DimensionError("state-space model: G and A must be square and match");
  if (B_u.rows() != nx || B_d.rows() != nx || B_w.rows() != nx)
    throw DimensionError("state-space model: input matrices must have n_x rows");
  if (C.cols() != nx) throw DimensionError("state-space model: C must have n_x cols");
  const Eigen::Index ny = n_y();
  if (D_u.rows() != ny || D_d.rows() != ny || D_w.rows() != ny)
    throw DimensionError("state-space model: feedthrough matrices must have n_y rows");
  if (D_u.cols() != n_u() || D_d.cols() != n_d() || D_w.cols() != n_w())
    throw DimensionError("state-space model: feedthrough column counts disagree");
}

void DaeModel::validate() const {
  if (L.rows() != n_r() || W.rows() != n_r())
    throw DimensionError("DAE model: H, L, W must share the row count");
  if (faults.empty()) throw ConfigError("DAE model: at least one fault direction required");
  for (const auto& f : faults) {
    if (f.H.rows() != n_r() || f.H.cols() != n_xi())
      throw DimensionError("DAE model: fault H' has wrong shape");
    if (f.L.rows() != n_r() || f.L.cols() != n_z())
      throw DimensionError("DAE model: fault L' has wrong shape");
  }
  if (partition.n_states + partition.n_disturbances != n_xi())
    throw ConfigError("DAE model: xi partition does not cover all columns");
  if (partition.n_outputs + partition.n_inputs != n_z())
    throw ConfigError("DAE model: z partition does not cover all columns");
}

DaeModel to_dae(const StateSpaceModel& ss) {
  ss.validate();
  const Eigen::Index nx = ss.n_x(), nu = ss.n_u(), nd = ss.n_d(), ny = ss.n_y(), nw = ss.n_w();

  DaeModel m;
  m.time_domain = ss.time_domain;
  m.H = dae_h_block(ss.G, ss.A, ss.B_d, ss.C, ss.D_d);
  m.L = dae_l_block(nx, ss.B_u, Eigen::MatrixXd::Identity(ny, ny), ss.D_u);
  Eigen::MatrixXd w(nx + ny, nw);
  w << ss.B_w, ss.D_w;
  m.W = PolyMatrix(w);

  for (const auto& f : ss.faults) {
    FaultDirection dir;
    dir.name = f.name;
    dir.H = dae_h_block(or_zero(f.G, nx, nx), or_zero(f.A, nx, nx), or_zero(f.B_d, nx, nd),
                        or_zero(f.C, ny, nx), or_zero(f.D_d, ny, nd));
    Eigen::MatrixXd l0(nx + ny, ny + nu);
    l0 << Eigen::MatrixXd::Zero(nx, ny), or_zero(f.B_u, nx, nu),
        Eigen::MatrixXd::Zero(ny, ny), or_zero(f.D_u, ny, nu);
    dir.L = PolyMatrix(l0);
    m.faults.push_back(std::move(dir));
  }

  m.partition = Partition{nx, nd, ny, nu};
  m.source = ss;
  m.validate();
  return m;
}

ObservabilityReport check_nominal_observability(const DaeModel& m, int k_max) {
  ObservabilityReport rep;
  rep.k_max = k_max;
  try {
    LeftInverseOptions opts;
    opts.k_max = k_max;
    rep.left_inv = left_inverse(m.H, opts);
    rep.observable = true;
    rep.detail = "left inverse of degree " + std::to_string(rep.left_inv->degree());
  } catch (const NoLeftInverse& e) {
    rep.observable = false;
    rep.detail = e.what();
  }
  return rep;
}

DaeModel perturb(const DaeModel& m, const Eigen::VectorXd& f) {
  if (f.size() != m.fault_count())
    throw DimensionError("perturb: fault vector length disagrees with model");
  DaeModel out = m;
  for (int i = 0; i < m.fault_count(); ++i) {
    out.H += f(i) * m.faults[i].H;
    out.L += f(i) * m.faults[i].L;
  }
  if (m.source) {
    StateSpaceModel ss = *m.source;
    const Eigen::Index nx = ss.n_x(), nu = ss.n_u(), nd = ss.n_d(), ny = ss.n_y();
    for (int i = 0; i < m.fault_count(); ++i) {
      const auto& d = ss.faults[static_cast<size_t>(i)];
      ss.G += f(i) * or_zero(d.G, nx, nx);
      ss.A += f(i) * or_zero(d.A, nx, nx);
      ss.B_u += f(i) * or_zero(d.B_u, nx, nu);
      ss.B_d += f(i) * or_zero(d.B_d, nx, nd);
      ss.C += f(i) * or_zero(d.C, ny, nx);
      ss.D_u += f(i) * or_zero(d.D_u, ny, nu);
      ss.D_d += f(i) * or_zero(d.D_d, ny, nd);
    }
    out.source = std::move(ss);
  }
  return out;
}

}  // namespace mfe
