// Configuration-driven front end: loads a model file, designs residual and
// regressor generators, designs periodic excitation inputs, runs fault
// scenarios, and writes CSV/JSON artifacts into a run directory.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "mfe/estimator.hpp"
#include "mfe/input_design.hpp"
#include "mfe/json_io.hpp"
#include "mfe/threading.hpp"

namespace fs = std::filesystem;
using namespace mfe;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitObservability = 3;
constexpr int kExitDesign = 4;
constexpr int kExitNumerical = 5;

struct Context {
  Json config;
  fs::path config_dir;
  fs::path out;
  std::optional<std::uint64_t> seed_override;
  Json manifest = Json::array();
};

fs::path resolve(const Context& ctx, const std::string& path) {
  fs::path p(path);
  if (p.is_absolute() || fs::exists(p)) return p;
  return ctx.config_dir / p;
}

void record(Context& ctx, const std::string& command, const fs::path& artifact) {
  ctx.manifest.push_back(Json{{"command", command}, {"artifact", artifact.filename().string()}});
}

void flush_manifest(Context& ctx) {
  write_json_file((ctx.out / "manifest.json").string(), ctx.manifest);
}

DaeModel load_model_from(const Context& ctx) {
  if (!ctx.config.contains("model")) throw ConfigError("config: missing \"model\" path");
  return load_model(resolve(ctx, ctx.config.at("model").get<std::string>()).string());
}

std::vector<std::complex<double>> poles_from(const Json& arr) {
  std::vector<std::complex<double>> poles;
  for (const auto& p : arr) {
    if (p.is_array())
      poles.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    else
      poles.emplace_back(p.get<double>(), 0.0);
  }
  return poles;
}

DesignOptions filter_options(const Json& filter) {
  DesignOptions opts;
  opts.degree = filter.value("degree", -1);
  opts.trials = filter.value("K", 200);
  opts.seed = filter.value("seed", 1ULL);
  return opts;
}

GeneratorSet design_generators(const Context& ctx, const DaeModel& m) {
  const Json filter = ctx.config.value("filter", Json::object());
  GeneratorSet gen = design(m, filter_options(filter));
  if (!filter.contains("poles")) throw ConfigError("config: filter.poles required");
  const int need = std::max(mul(gen.N, m.L).degree(), gen.M.degree());
  gen.denominator = make_denominator(poles_from(filter.at("poles")),
                                     filter.value("normalize_dc", true), m.time_domain, need);
  return gen;
}

GeneratorSet load_or_design_generators(Context& ctx, const DaeModel& m) {
  const fs::path path = ctx.out / "generators.json";
  if (fs::exists(path)) return generators_from_json(read_json_file(path.string()));
  return design_generators(ctx, m);
}

ConstraintSet constraints_from(const Json& j, int n_u, int period) {
  const std::string type = j.value("type", "");
  if (type == "channel_energy") {
    ChannelEnergyConstraint c;
    c.n_u = n_u;
    c.N = period;
    const auto& r = j.at("radius");
    c.radius.resize(n_u);
    for (int i = 0; i < n_u; ++i)
      c.radius(i) = r.is_array() ? r.at(i).get<double>() : r.get<double>();
    return ConstraintSet{c};
  }
  if (type == "total_energy")
    return ConstraintSet{TotalEnergyConstraint{j.at("radius").get<double>()}};
  if (type == "box") {
    BoxConstraint b;
    b.lo = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(period) * n_u,
                                     j.at("lo").get<double>());
    b.hi = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(period) * n_u,
                                     j.at("hi").get<double>());
    return ConstraintSet{b};
  }
  if (type == "intersection") {
    IntersectionConstraint inter;
    for (const auto& part : j.at("parts"))
      inter.parts.push_back(constraints_from(part, n_u, period));
    return ConstraintSet{inter};
  }
  throw ConfigError("config: unknown constraint type \"" + type + "\"");
}

std::shared_ptr<TvDictionary> dictionary_for(
    const Json& tv_faults, TimeDomain td, double h,
    std::vector<std::vector<std::pair<double, int>>>* components) {
  auto dict = std::make_shared<TvDictionary>(td, h);
  for (const auto& fault : tv_faults) {
    std::vector<std::pair<double, int>> comp;
    for (const auto& term : fault.at("terms")) {
      const Json& basis = term.at("basis");
      const std::string kind = basis.value("kind", "constant");
      int idx = 0;
      if (kind == "constant")
        idx = dict->add_polynomial(0);
      else if (kind == "polynomial")
        idx = dict->add_polynomial(basis.at("power").get<int>());
      else if (kind == "sinusoid")
        idx = dict->add_sinusoid(basis.at("omega").get<double>(), basis.value("phase", 0.0));
      else
        throw ConfigError("config: unknown basis kind \"" + kind + "\"");
      comp.push_back({term.at("coeff").get<double>(), idx});
    }
    components->push_back(std::move(comp));
  }
  return dict;
}

SignalSpec signal_from(Context& ctx, const Json& j, double h) {
  const std::string type = j.value("type", "zero");
  if (type == "zero") return SignalSpec::zero();
  if (type == "sinusoid") {
    auto get = [&](const char* key) {
      std::vector<double> v;
      for (const auto& x : j.at(key)) v.push_back(x.get<double>());
      return v;
    };
    std::vector<double> amp = get("amplitude"), omega = get("omega");
    std::vector<double> phase(amp.size(), 0.0);
    if (j.contains("phase")) phase = get("phase");
    return SignalSpec::sinusoid(std::move(amp), std::move(omega), std::move(phase));
  }
  if (type == "samples") {
    Eigen::MatrixXd samples = read_csv(resolve(ctx, j.at("path").get<std::string>()).string());
    return SignalSpec::zoh(std::move(samples), j.value("sample_h", h), j.value("periodic", false));
  }
  if (type == "designed") {
    const fs::path path = j.contains("path") ? resolve(ctx, j.at("path").get<std::string>())
                                             : ctx.out / "u_bar.csv";
    std::vector<std::string> header;
    Eigen::MatrixXd table = read_csv(path.string(), &header);
    // drop the leading sample-index column when present
    Eigen::MatrixXd samples =
        (!header.empty() && header.front() == "k") ? table.rightCols(table.cols() - 1) : table;
    return SignalSpec::zoh(std::move(samples), h, true);
  }
  throw ConfigError("config: unknown signal type \"" + type + "\"");
}

ScenarioConfig scenario_from(Context& ctx, const DaeModel& m) {
  const Json est = ctx.config.value("estimator", Json::object());
  const Json sc = ctx.config.value("scenario", Json::object());
  ScenarioConfig cfg;
  cfg.h = est.value("h", 0.05);
  cfg.t_end = est.value("T_end", 40.0);
  cfg.sigma = est.value("sigma", 0.0);
  cfg.oversample = est.value("oversample", 10);
  cfg.seed = sc.value("seed", 0ULL);
  if (ctx.seed_override) cfg.seed = *ctx.seed_override;

  const Json faults = sc.value("faults", Json::array());
  if (faults.is_array()) {
    Eigen::VectorXd f(static_cast<Eigen::Index>(faults.size()));
    for (Eigen::Index i = 0; i < f.size(); ++i) f(i) = faults.at(i).get<double>();
    cfg.fault = FaultSignal::constants(f);
  } else {
    FaultSignal f;
    f.time_varying = true;
    f.dict = dictionary_for(faults.at("time_varying"), m.time_domain, cfg.h, &f.components);
    cfg.fault = std::move(f);
  }
  cfg.input = signal_from(ctx, sc.value("input", Json{{"type", "zero"}}), cfg.h);
  cfg.disturbance = signal_from(ctx, sc.value("disturbance", Json{{"type", "zero"}}), cfg.h);

  // a designed-input estimation window must cover whole periods
  const Json des = ctx.config.value("design", Json::object());
  if (sc.value("input", Json::object()).value("type", "") == "designed" &&
      des.contains("N_period")) {
    const int nw = est.value("N_window", 400);
    const int np = des.at("N_period").get<int>();
    if (np > 0 && nw % np != 0)
      throw ConfigError(
          "config: N_window must be an integer multiple of N_period for designed inputs");
  }
  return cfg;
}

Json summary_json(const DaeModel& m, const GeneratorSet& gen, const ScenarioResult& res,
                  const EstimateTrajectory& est, const Eigen::VectorXd& f_ref, double sigma,
                  int window) {
  Json j;
  const Eigen::Index last = est.t.size() - 1;
  Eigen::VectorXd f_final = est.f_hat.row(last).transpose();
  j["final_estimate"] = Json::array();
  for (Eigen::Index i = 0; i < f_final.size(); ++i) j["final_estimate"].push_back(f_final(i));
  if (f_ref.size() == f_final.size() && f_ref.norm() > 0)
    j["final_relative_error"] = (f_final - f_ref).norm() / f_ref.norm();

  BoundInputs b = compute_bound_inputs(m, gen, res, window, sigma);
  const double bias = bias_bound(b);
  j["bias_bound"] = bias;
  j["bias_bound_derivation_form"] = bias_bound_derivation_form(b);
  j["variance_bound"] = variance_bound(b, bias);
  j["snr"] = snr_metric(b);
  j["snr_first_order_valid"] = snr_metric(b) < kSnrValidityThreshold;
  j["effective_sv_final"] = est.effective_sv(last);
  j["noise_seed"] = res.seed;
  Json sv = Json::array();
  for (Eigen::Index i = 0; i < est.effective_sv.size(); ++i) sv.push_back(est.effective_sv(i));
  j["effective_sv_series"] = std::move(sv);
  return j;
}

int cmd_design_filter(Context& ctx) {
  DaeModel m = load_model_from(ctx);
  const Json filter = ctx.config.value("filter", Json::object());
  ObservabilityReport rep = check_nominal_observability(m, filter.value("left_inverse_k_max", 10));
  if (!rep.observable) throw NoLeftInverse(rep.detail);
  GeneratorSet gen = design_generators(ctx, m);
  write_json_file((ctx.out / "generators.json").string(), to_json(gen));
  record(ctx, "design-filter", "generators.json");
  Json report{{"s_min_blkrow_M", gen.s_min_blkrow_M},
              {"annihilator_dim", gen.annihilator_dim},
              {"degree", gen.degree},
              {"trials_used", gen.trials_used},
              {"seed", gen.seed},
              {"left_inverse_degree", gen.H_dagger.degree()},
              {"denominator_degree", gen.denominator.degree()}};
  write_json_file((ctx.out / "filter_report.json").string(), report);
  record(ctx, "design-filter", "filter_report.json");
  std::cout << "designed generators: annihilator degree " << gen.degree << ", b = "
            << gen.annihilator_dim << ", s_min(blkrow M) = " << gen.s_min_blkrow_M << "\n";
  return 0;
}

int cmd_design_input(Context& ctx) {
  DaeModel m = load_model_from(ctx);
  GeneratorSet gen = load_or_design_generators(ctx, m);
  const Json des = ctx.config.value("design", Json::object());
  const Json est = ctx.config.value("estimator", Json::object());
  const double h = est.value("h", 0.05);
  const int period = des.value("N_period", 40);
  const int n_u = static_cast<int>(m.partition.n_inputs);

  OptimizeParams params;
  params.tau = des.value("tau", 10.0);
  params.step_l = des.value("L", 50.0);
  params.eps_u = des.value("eps_u", 1e-3);
  params.eps_lambda = des.value("eps_lambda", 1e-5);
  params.max_iter = des.value("max_iter", 20000);

  StateSpace t = regressor_input_map(m, gen, h);
  DesignProblem prob =
      build_problem(t, period, constraints_from(des.at("constraints"), n_u, period), params);
  std::uint64_t seed = des.value("seed", 7ULL);
  if (ctx.seed_override) seed = *ctx.seed_override;
  DesignResult result = optimize_multistart(prob, seed, des.value("starts", 10));
  result.x0_periodic = periodic_initial_state(prob, result.u_bar);

  if (des.value("sdp", false)) {
    SdpResult sdp = sdp_bound(prob, SdpOptions{}, result.u_bar);
    result.sdp_upper = sdp.lambda_sdp;
    result.gap = sdp.lambda_sdp - result.J;
  }

  Eigen::MatrixXd u_table(period, n_u + 1);
  for (int k = 0; k < period; ++k) {
    u_table(k, 0) = k;
    u_table.row(k).tail(n_u) =
        result.u_bar.segment(static_cast<Eigen::Index>(k) * n_u, n_u).transpose();
  }
  std::vector<std::string> header{"k"};
  for (int i = 0; i < n_u; ++i) header.push_back("u" + std::to_string(i + 1));
  write_csv((ctx.out / "u_bar.csv").string(), header, u_table);
  record(ctx, "design-input", "u_bar.csv");
  write_json_file((ctx.out / "design_result.json").string(), to_json(result));
  record(ctx, "design-input", "design_result.json");
  std::cout << "designed input: J = " << result.J;
  if (result.sdp_upper) std::cout << ", relaxation bound " << *result.sdp_upper;
  std::cout << "\n";
  return 0;
}

int cmd_simulate(Context& ctx) {
  DaeModel m = load_model_from(ctx);
  GeneratorSet gen = load_or_design_generators(ctx, m);
  ScenarioConfig cfg = scenario_from(ctx, m);
  const int window = ctx.config.value("estimator", Json::object()).value("N_window", 400);

  ScenarioResult res = simulate_scenario(m, gen, cfg);
  EstimateTrajectory est = run_estimator(res, window);
  write_scenario_csv((ctx.out / "scenario.csv").string(), res);
  record(ctx, "simulate", "scenario.csv");
  write_estimates_csv((ctx.out / "estimates.csv").string(), est);
  record(ctx, "simulate", "estimates.csv");
  write_json_file((ctx.out / "noise_sidecar.json").string(),
                  Json{{"seed", res.seed}, {"sigma", cfg.sigma}});
  record(ctx, "simulate", "noise_sidecar.json");

  const Eigen::VectorXd f_ref = cfg.fault.value(cfg.t_end);
  Json summary = summary_json(m, gen, res, est, f_ref, cfg.sigma, window);
  write_json_file((ctx.out / "summary.json").string(), summary);
  record(ctx, "simulate", "summary.json");
  std::cout << "scenario done";
  if (summary.contains("final_relative_error"))
    std::cout << ": final relative error " << summary["final_relative_error"].get<double>();
  std::cout << "\n";
  return 0;
}

int cmd_large_fault(Context& ctx) {
  DaeModel m = load_model_from(ctx);
  ScenarioConfig cfg = scenario_from(ctx, m);
  const Json gn = ctx.config.value("gauss_newton", Json::object());
  const Json filter = ctx.config.value("filter", Json::object());
  GaussNewtonOptions opts;
  opts.iterations = gn.value("iterations", 3);
  opts.segment_seconds = gn.value("segment_seconds", 40.0);
  opts.window = ctx.config.value("estimator", Json::object()).value("N_window", 400);
  opts.design = filter_options(filter);
  if (!filter.contains("poles")) throw ConfigError("config: filter.poles required");
  opts.poles = poles_from(filter.at("poles"));
  opts.normalize_dc = filter.value("normalize_dc", true);

  auto trace = run_gauss_newton(m, cfg, opts);
  Json jt = Json::array();
  for (const auto& step : trace) {
    Json js;
    js["increment"] = Json::array();
    js["cumulative"] = Json::array();
    for (Eigen::Index i = 0; i < step.increment.size(); ++i) {
      js["increment"].push_back(step.increment(i));
      js["cumulative"].push_back(step.cumulative(i));
    }
    js["residual_rms"] = step.residual_norm;
    js["redesign_failed"] = step.redesign_failed;
    if (!step.message.empty()) js["message"] = step.message;
    jt.push_back(std::move(js));
  }
  write_json_file((ctx.out / "gauss_newton_trace.json").string(), jt);
  record(ctx, "large-fault", "gauss_newton_trace.json");
  const Eigen::VectorXd f_ref = cfg.fault.value(0.0);
  std::cout << "iterations: " << trace.size();
  if (!trace.empty() && f_ref.norm() > 0)
    std::cout << ", final relative error "
              << (trace.back().cumulative - f_ref).norm() / f_ref.norm();
  std::cout << "\n";
  return 0;
}

int cmd_time_varying(Context& ctx) {
  DaeModel m = load_model_from(ctx);
  GeneratorSet gen = load_or_design_generators(ctx, m);
  ScenarioConfig cfg = scenario_from(ctx, m);
  if (!cfg.fault.time_varying)
    throw ConfigError("time-varying: scenario.faults must carry a time_varying section");
  const int window = ctx.config.value("estimator", Json::object()).value("N_window", 400);

  ScenarioEngine engine(m, gen, cfg);
  const Eigen::Index n_t = static_cast<Eigen::Index>(std::llround(cfg.t_end / cfg.h)) + 1;
  engine.run(n_t);
  const ScenarioResult& res = engine.result();

  auto bank = build_tv_regressor_bank(m, gen, cfg.fault, engine.fine_h());
  Eigen::MatrixXd e_tv = run_tv_regressors(bank, *cfg.fault.dict, engine.fine_h(),
                                           engine.fine_z(), std::max(1, cfg.oversample));
  EstimateTrajectory tv_est = run_estimator_columns(res.t, res.r, e_tv, cfg.h, window);
  EstimateTrajectory const_est = run_estimator(res, window);

  // reconstruct fault trajectories from the estimated basis coefficients
  const Eigen::Index steps = tv_est.t.size();
  Eigen::MatrixXd f_tv(steps, m.fault_count()), f_true(steps, m.fault_count());
  for (Eigen::Index k = 0; k < steps; ++k) {
    const double t = tv_est.t(k);
    f_true.row(k) = cfg.fault.value(t).transpose();
    Eigen::VectorXd f = Eigen::VectorXd::Zero(m.fault_count());
    Eigen::Index col = 0;
    for (size_t i = 0; i < cfg.fault.components.size(); ++i)
      for (size_t jj = 0; jj < cfg.fault.components[i].size(); ++jj, ++col)
        f(static_cast<Eigen::Index>(i)) +=
            tv_est.f_hat(k, col) * cfg.fault.dict->value(cfg.fault.components[i][jj].second, t);
    f_tv.row(k) = f.transpose();
  }

  Eigen::MatrixXd table(steps, 1 + 3 * m.fault_count());
  table.col(0) = tv_est.t;
  table.middleCols(1, m.fault_count()) = f_true;
  table.middleCols(1 + m.fault_count(), m.fault_count()) = f_tv;
  table.rightCols(m.fault_count()) = const_est.f_hat;
  std::vector<std::string> header{"t"};
  for (int i = 0; i < m.fault_count(); ++i) header.push_back("f_true" + std::to_string(i + 1));
  for (int i = 0; i < m.fault_count(); ++i) header.push_back("f_tv" + std::to_string(i + 1));
  for (int i = 0; i < m.fault_count(); ++i) header.push_back("f_const" + std::to_string(i + 1));
  write_csv((ctx.out / "time_varying.csv").string(), header, table);
  record(ctx, "time-varying", "time_varying.csv");

  Json report;
  for (int i = 0; i < m.fault_count(); ++i) {
    const double tv_rms = (f_tv.col(i) - f_true.col(i)).norm() / std::sqrt(double(steps));
    const double const_rms =
        (const_est.f_hat.col(i) - f_true.col(i)).norm() / std::sqrt(double(steps));
    report["rms_error_tv"].push_back(tv_rms);
    report["rms_error_const"].push_back(const_rms);
  }
  write_json_file((ctx.out / "time_varying_report.json").string(), report);
  record(ctx, "time-varying", "time_varying_report.json");
  std::cout << "time-varying estimation done\n";
  return 0;
}

int cmd_bounds(Context& ctx) {
  DaeModel m = load_model_from(ctx);
  GeneratorSet gen = load_or_design_generators(ctx, m);
  ScenarioConfig cfg = scenario_from(ctx, m);
  const double sigma = cfg.sigma;
  cfg.sigma = 0.0;  // bound inputs are measured on noise-free trajectories
  const int window = ctx.config.value("estimator", Json::object()).value("N_window", 400);
  ScenarioResult res = simulate_scenario(m, gen, cfg);
  BoundInputs b = compute_bound_inputs(m, gen, res, window, sigma);
  const double bias = bias_bound(b);
  Json report{{"A", b.A},
              {"eta_F", b.eta_F},
              {"eta_W", b.eta_W},
              {"eta", b.eta()},
              {"gamma_F", b.gamma_F},
              {"sigma", sigma},
              {"signal_peak", b.signal_peak},
              {"s_min", b.s_min()},
              {"bias_bound", bias},
              {"bias_bound_derivation_form", bias_bound_derivation_form(b)},
              {"variance_bound", variance_bound(b, bias)},
              {"snr", snr_metric(b)},
              {"snr_first_order_valid", snr_metric(b) < kSnrValidityThreshold}};
  write_json_file((ctx.out / "bounds.json").string(), report);
  record(ctx, "bounds", "bounds.json");
  std::cout << "bounds written\n";
  return 0;
}

int cmd_sdp_export(Context& ctx) {
  DaeModel m = load_model_from(ctx);
  GeneratorSet gen = load_or_design_generators(ctx, m);
  const Json des = ctx.config.value("design", Json::object());
  const double h = ctx.config.value("estimator", Json::object()).value("h", 0.05);
  const int period = des.value("N_period", 40);
  const int n_u = static_cast<int>(m.partition.n_inputs);
  StateSpace t = regressor_input_map(m, gen, h);
  DesignProblem prob =
      build_problem(t, period, constraints_from(des.at("constraints"), n_u, period));
  const fs::path path = ctx.out / "relaxation.dat-s";
  export_sdpa(prob, path.string());
  record(ctx, "sdp-export", "relaxation.dat-s");
  std::cout << "wrote " << path.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multiplicative fault estimation and periodic input design"};
  app.require_subcommand(1);
  app.fallthrough(true);  // global flags may follow the subcommand

  std::string config_path, out_dir = "run";
  std::int64_t seed = -1;
  int threads = 0;
  app.add_option("--config", config_path, "run configuration (JSON)")->required();
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "override the scenario/design seed");
  app.add_option("--threads", threads, "worker cap for internal parallelism");

  std::map<std::string, std::function<int(Context&)>> commands{
      {"design-filter", cmd_design_filter}, {"design-input", cmd_design_input},
      {"simulate", cmd_simulate},           {"large-fault", cmd_large_fault},
      {"time-varying", cmd_time_varying},   {"bounds", cmd_bounds},
      {"sdp-export", cmd_sdp_export}};
  for (auto& [name, fn] : commands) app.add_subcommand(name);

  CLI11_PARSE(app, argc, argv);

  Context ctx;
  try {
    ctx.config = read_json_file(config_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  ctx.config_dir = fs::path(config_path).parent_path();
  if (ctx.config.contains("output") && out_dir == "run")
    out_dir = ctx.config.at("output").get<std::string>();
  ctx.out = out_dir;
  if (seed >= 0) ctx.seed_override = static_cast<std::uint64_t>(seed);
  set_thread_limit(threads);

  std::error_code ec;
  fs::create_directories(ctx.out, ec);

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    const int rc = commands.at(name)(ctx);
    flush_manifest(ctx);
    return rc;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NoLeftInverse& e) {
    std::cerr << "observability error: " << e.what() << "\n";
    return kExitObservability;
  } catch (const NoAnnihilator& e) {
    std::cerr << "design error: " << e.what() << "\n";
    return kExitDesign;
  } catch (const RankDeficientM& e) {
    std::cerr << "design error: " << e.what() << "\n";
    return kExitDesign;
  } catch (const UnstablePole& e) {
    std::cerr << "design error: " << e.what() << "\n";
    return kExitDesign;
  } catch (const InsufficientDegree& e) {
    std::cerr << "design error: " << e.what() << "\n";
    return kExitDesign;
  } catch (const ImproperFilter& e) {
    std::cerr << "design error: " << e.what() << "\n";
    return kExitDesign;
  } catch (const ConversionUnsupported& e) {
    std::cerr << "design error: " << e.what() << "\n";
    return kExitDesign;
  } catch (const ClosureIncomplete& e) {
    std::cerr << "design error: " << e.what() << "\n";
    return kExitDesign;
  } catch (const Error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
