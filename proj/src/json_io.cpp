#include "mfe/json_io.hpp"

#include <fstream>
#include <sstream>

namespace mfe {

namespace {

Eigen::MatrixXd maybe_matrix(const Json& j, const char* key, Eigen::Index rows,
                             Eigen::Index cols) {
  if (!j.contains(key) || j.at(key).is_null()) return Eigen::MatrixXd::Zero(rows, cols);
  return matrix_from_json(j.at(key));
}

TimeDomain time_domain_from_string(const std::string& s) {
  if (s == "continuous") return TimeDomain::kContinuous;
  if (s == "discrete") return TimeDomain::kDiscrete;
  throw ConfigError("unknown time_domain: " + s);
}

std::string to_string(TimeDomain td) {
  return td == TimeDomain::kContinuous ? "continuous" : "discrete";
}

}  // namespace

Json to_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const Json& j) {
  if (!j.is_array()) throw ConfigError("matrix: expected an array of rows");
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) return Eigen::MatrixXd(0, 0);
  const Eigen::Index cols = static_cast<Eigen::Index>(j.at(0).size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j.at(i);
    if (static_cast<Eigen::Index>(row.size()) != cols)
      throw ConfigError("matrix: ragged rows");
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = row.at(c).get<double>();
  }
  return m;
}

Json to_json(const PolyMatrix& p) {
  Json coeffs = Json::array();
  for (int k = 0; k <= p.degree(); ++k) coeffs.push_back(to_json(p.coeff(k)));
  return Json{{"rows", p.rows()}, {"cols", p.cols()}, {"coeffs", std::move(coeffs)}};
}

PolyMatrix polymatrix_from_json(const Json& j) {
  const Eigen::Index rows = j.at("rows").get<Eigen::Index>();
  const Eigen::Index cols = j.at("cols").get<Eigen::Index>();
  std::vector<Eigen::MatrixXd> coeffs;
  for (const auto& c : j.at("coeffs")) {
    Eigen::MatrixXd m = matrix_from_json(c);
    if (m.size() == 0) m = Eigen::MatrixXd::Zero(rows, cols);
    if (m.rows() != rows || m.cols() != cols)
      throw ConfigError("polymatrix: coefficient shape disagrees with rows/cols");
    coeffs.push_back(std::move(m));
  }
  if (coeffs.empty()) coeffs.push_back(Eigen::MatrixXd::Zero(rows, cols));
  return PolyMatrix(std::move(coeffs));
}

Json to_json(const StateSpaceModel& ss) {
  Json faults = Json::array();
  for (const auto& f : ss.faults) {
    Json jf{{"name", f.name}};
    auto put = [&](const char* key, const Eigen::MatrixXd& m) {
      if (m.size() > 0) jf[key] = to_json(m);
    };
    put("G", f.G);
    put("A", f.A);
    put("B_u", f.B_u);
    put("B_d", f.B_d);
    put("C", f.C);
    put("D_u", f.D_u);
    put("D_d", f.D_d);
    faults.push_back(std::move(jf));
  }
  return Json{{"G", to_json(ss.G)},     {"A", to_json(ss.A)},
              {"B_u", to_json(ss.B_u)}, {"B_d", to_json(ss.B_d)},
              {"B_w", to_json(ss.B_w)}, {"C", to_json(ss.C)},
              {"D_u", to_json(ss.D_u)}, {"D_d", to_json(ss.D_d)},
              {"D_w", to_json(ss.D_w)}, {"faults", std::move(faults)}};
}

StateSpaceModel state_space_from_json(const Json& j) {
  StateSpaceModel ss;
  ss.A = matrix_from_json(j.at("A"));
  const Eigen::Index nx = ss.A.rows();
  ss.G = j.contains("G") ? matrix_from_json(j.at("G"))
                         : Eigen::MatrixXd(Eigen::MatrixXd::Identity(nx, nx));
  ss.B_u = matrix_from_json(j.at("B_u"));
  ss.C = matrix_from_json(j.at("C"));
  const Eigen::Index ny = ss.C.rows(), nu = ss.B_u.cols();
  ss.B_d = maybe_matrix(j, "B_d", nx, 0);
  ss.B_w = maybe_matrix(j, "B_w", nx, 0);
  ss.D_u = maybe_matrix(j, "D_u", ny, nu);
  ss.D_d = maybe_matrix(j, "D_d", ny, ss.B_d.cols());
  ss.D_w = maybe_matrix(j, "D_w", ny, ss.B_w.cols());
  if (ss.B_w.cols() == 0 && j.contains("D_w")) {
    ss.D_w = matrix_from_json(j.at("D_w"));
    ss.B_w = Eigen::MatrixXd::Zero(nx, ss.D_w.cols());
  }
  for (const auto& jf : j.value("faults", Json::array())) {
    StateSpaceFault f;
    f.name = jf.value("name", "");
    auto get = [&](const char* key, Eigen::Index r, Eigen::Index c) {
      return jf.contains(key) ? matrix_from_json(jf.at(key)) : Eigen::MatrixXd::Zero(r, c);
    };
    f.G = get("G", nx, nx);
    f.A = get("A", nx, nx);
    f.B_u = get("B_u", nx, nu);
    f.B_d = get("B_d", nx, ss.B_d.cols());
    f.C = get("C", ny, nx);
    f.D_u = get("D_u", ny, nu);
    f.D_d = get("D_d", ny, ss.B_d.cols());
    ss.faults.push_back(std::move(f));
  }
  return ss;
}

Json to_json(const DaeModel& m) {
  Json j;
  j["time_domain"] = to_string(m.time_domain);
  if (m.source) {
    Json ss = to_json(*m.source);
    ss["time_domain"] = to_string(m.time_domain);
    j["state_space"] = std::move(ss);
  } else {
    j["dae"] = Json{{"H", to_json(m.H)}, {"L", to_json(m.L)}, {"W", to_json(m.W)}};
    Json faults = Json::array();
    for (const auto& f : m.faults)
      faults.push_back(Json{{"name", f.name}, {"H", to_json(f.H)}, {"L", to_json(f.L)}});
    j["faults"] = std::move(faults);
    j["partition"] = Json{{"states", m.partition.n_states},
                          {"disturbances", m.partition.n_disturbances},
                          {"outputs", m.partition.n_outputs},
                          {"inputs", m.partition.n_inputs}};
  }
  return j;
}

DaeModel model_from_json(const Json& j) {
  const TimeDomain td = time_domain_from_string(j.value("time_domain", "continuous"));
  if (j.contains("state_space")) {
    StateSpaceModel ss = state_space_from_json(j.at("state_space"));
    ss.time_domain = td;
    return to_dae(ss);
  }
  if (!j.contains("dae")) throw ConfigError("model: needs a state_space or dae section");
  DaeModel m;
  m.time_domain = td;
  m.H = polymatrix_from_json(j.at("dae").at("H"));
  m.L = polymatrix_from_json(j.at("dae").at("L"));
  m.W = polymatrix_from_json(j.at("dae").at("W"));
  for (const auto& jf : j.value("faults", Json::array())) {
    FaultDirection f;
    f.name = jf.value("name", "");
    f.H = jf.contains("H") ? polymatrix_from_json(jf.at("H")) : PolyMatrix(m.n_r(), m.n_xi());
    f.L = jf.contains("L") ? polymatrix_from_json(jf.at("L")) : PolyMatrix(m.n_r(), m.n_z());
    m.faults.push_back(std::move(f));
  }
  const auto& part = j.at("partition");
  m.partition.n_states = part.at("states").get<Eigen::Index>();
  m.partition.n_disturbances = part.at("disturbances").get<Eigen::Index>();
  m.partition.n_outputs = part.at("outputs").get<Eigen::Index>();
  m.partition.n_inputs = part.at("inputs").get<Eigen::Index>();
  m.validate();
  return m;
}

DaeModel load_model(const std::string& path) { return model_from_json(read_json_file(path)); }

Json to_json(const GeneratorSet& gen) {
  Json j;
  if (gen.has_denominator()) j["denominator"] = to_json(gen.denominator);
  j["N"] = to_json(gen.N);
  j["M"] = to_json(gen.M);
  Json g = Json::array(), f = Json::array(), jj = Json::array();
  for (const auto& gi : gen.G) g.push_back(to_json(gi));
  for (const auto& fi : gen.F) f.push_back(to_json(fi));
  for (const auto& row : gen.J) {
    Json jrow = Json::array();
    for (const auto& jij : row) jrow.push_back(to_json(jij));
    jj.push_back(std::move(jrow));
  }
  j["G"] = std::move(g);
  j["F"] = std::move(f);
  j["J"] = std::move(jj);
  j["H_dagger"] = to_json(gen.H_dagger);
  j["s_min_blkrow_M"] = gen.s_min_blkrow_M;
  j["annihilator_dim"] = gen.annihilator_dim;
  j["degree"] = gen.degree;
  j["trials_used"] = gen.trials_used;
  j["seed"] = gen.seed;
  return j;
}

GeneratorSet generators_from_json(const Json& j) {
  GeneratorSet gen;
  if (j.contains("denominator")) gen.denominator = polymatrix_from_json(j.at("denominator"));
  gen.N = polymatrix_from_json(j.at("N"));
  gen.M = polymatrix_from_json(j.at("M"));
  for (const auto& g : j.at("G")) gen.G.push_back(polymatrix_from_json(g));
  for (const auto& f : j.at("F")) gen.F.push_back(polymatrix_from_json(f));
  for (const auto& row : j.at("J")) {
    std::vector<PolyMatrix> r;
    for (const auto& jij : row) r.push_back(polymatrix_from_json(jij));
    gen.J.push_back(std::move(r));
  }
  gen.H_dagger = polymatrix_from_json(j.at("H_dagger"));
  gen.s_min_blkrow_M = j.value("s_min_blkrow_M", 0.0);
  gen.annihilator_dim = j.value("annihilator_dim", 0);
  gen.degree = j.value("degree", 0);
  gen.trials_used = j.value("trials_used", 0);
  gen.seed = j.value("seed", 0ULL);
  return gen;
}

Json to_json(const DesignResult& r) {
  Json u = Json::array();
  for (Eigen::Index i = 0; i < r.u_bar.size(); ++i) u.push_back(r.u_bar(i));
  Json x0 = Json::array();
  for (Eigen::Index i = 0; i < r.x0_periodic.size(); ++i) x0.push_back(r.x0_periodic(i));
  Json j{{"u_bar", std::move(u)},
         {"J", r.J},
         {"iterations", r.iterations},
         {"seed", r.seed},
         {"x0_periodic", std::move(x0)}};
  if (r.sdp_upper) j["sdp_upper"] = *r.sdp_upper;
  if (r.gap) j["gap"] = *r.gap;
  return j;
}

DesignResult design_result_from_json(const Json& j) {
  DesignResult r;
  const auto& u = j.at("u_bar");
  r.u_bar.resize(static_cast<Eigen::Index>(u.size()));
  for (Eigen::Index i = 0; i < r.u_bar.size(); ++i) r.u_bar(i) = u.at(i).get<double>();
  r.J = j.value("J", 0.0);
  r.iterations = j.value("iterations", 0);
  r.seed = j.value("seed", 0ULL);
  if (j.contains("sdp_upper")) r.sdp_upper = j.at("sdp_upper").get<double>();
  if (j.contains("gap")) r.gap = j.at("gap").get<double>();
  if (j.contains("x0_periodic")) {
    const auto& x0 = j.at("x0_periodic");
    r.x0_periodic.resize(static_cast<Eigen::Index>(x0.size()));
    for (Eigen::Index i = 0; i < r.x0_periodic.size(); ++i)
      r.x0_periodic(i) = x0.at(i).get<double>();
  }
  return r;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("bad JSON in " + path + ": " + e.what());
  }
  return j;
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << j.dump(2) << "\n";
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const Eigen::MatrixXd& data) {
  if (static_cast<Eigen::Index>(header.size()) != data.cols())
    throw DimensionError("write_csv: header width disagrees with data");
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  for (size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << "\n";
  out.precision(17);
  for (Eigen::Index r = 0; r < data.rows(); ++r) {
    for (Eigen::Index c = 0; c < data.cols(); ++c) out << (c ? "," : "") << data(r, c);
    out << "\n";
  }
}

Eigen::MatrixXd read_csv(const std::string& path, std::vector<std::string>* header) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty CSV " + path);
  if (header) {
    header->clear();
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) header->push_back(cell);
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) return Eigen::MatrixXd(0, 0);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows[0].size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  return m;
}

void write_scenario_csv(const std::string& path, const ScenarioResult& res) {
  const Eigen::Index n = res.t.size();
  Eigen::MatrixXd data(n, 1 + res.z.cols() + 1 + res.e.cols() + res.f_applied.cols());
  data.col(0) = res.t;
  data.middleCols(1, res.z.cols()) = res.z;
  data.col(1 + res.z.cols()) = res.r;
  data.middleCols(2 + res.z.cols(), res.e.cols()) = res.e;
  data.rightCols(res.f_applied.cols()) = res.f_applied;

  std::vector<std::string> header{"t"};
  for (Eigen::Index i = 0; i < res.z.cols(); ++i) header.push_back("z" + std::to_string(i + 1));
  header.push_back("r");
  for (Eigen::Index i = 0; i < res.e.cols(); ++i) header.push_back("e" + std::to_string(i + 1));
  for (Eigen::Index i = 0; i < res.f_applied.cols(); ++i)
    header.push_back("f" + std::to_string(i + 1));
  write_csv(path, header, data);
}

void write_estimates_csv(const std::string& path, const EstimateTrajectory& est) {
  const Eigen::Index n = est.t.size();
  Eigen::MatrixXd data(n, 2 + est.f_hat.cols());
  data.col(0) = est.t;
  data.middleCols(1, est.f_hat.cols()) = est.f_hat;
  data.col(1 + est.f_hat.cols()) = est.effective_sv;
  std::vector<std::string> header{"t"};
  for (Eigen::Index i = 0; i < est.f_hat.cols(); ++i)
    header.push_back("f_hat" + std::to_string(i + 1));
  header.push_back("effective_sv");
  write_csv(path, header, data);
}

}  // namespace mfe
