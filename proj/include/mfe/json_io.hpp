#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "mfe/estimator.hpp"
#include "mfe/filter_design.hpp"
#include "mfe/input_design.hpp"
#include "mfe/model.hpp"
#include "mfe/scenario.hpp"

namespace mfe {

using Json = nlohmann::json;

Json to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const Json& j);

/// {"rows": r, "cols": c, "coeffs": [matrix, ...]} by ascending power of q.
Json to_json(const PolyMatrix& p);
PolyMatrix polymatrix_from_json(const Json& j);

Json to_json(const StateSpaceModel& ss);
StateSpaceModel state_space_from_json(const Json& j);

/// Model config: {"time_domain": ..., "state_space": {...}} or
/// {"time_domain": ..., "dae": {...}, "faults": [...], "partition": {...}}.
Json to_json(const DaeModel& m);
DaeModel model_from_json(const Json& j);
DaeModel load_model(const std::string& path);

Json to_json(const GeneratorSet& gen);
GeneratorSet generators_from_json(const Json& j);

Json to_json(const DesignResult& r);
DesignResult design_result_from_json(const Json& j);

Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

/// CSV with one header line; columns joined by commas.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const Eigen::MatrixXd& data);
Eigen::MatrixXd read_csv(const std::string& path, std::vector<std::string>* header = nullptr);

void write_scenario_csv(const std::string& path, const ScenarioResult& res);
void write_estimates_csv(const std::string& path, const EstimateTrajectory& est);

}  // namespace mfe
