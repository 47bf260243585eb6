// Model configuration: named built-ins, JSON files with row-major matrix
// entries or CSV references, and the experiment record the CLI executes.
#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "taskinfo/models.hpp"

namespace taskinfo::config {

using json = nlohmann::json;

using AnyModel = std::variant<models::ScalarModel, models::VectorModel>;

/// Parse a model description.  Unknown fields are rejected.  Matrix-valued
/// fields accept row-major nested arrays or a CSV file path (resolved
/// relative to base_dir).
AnyModel model_from_json(const json& spec, const std::string& base_dir = ".");

/// Built-in model names: scalar-default, scalar-flat-prior,
/// imaging-default, normal, exponential, flat-normal, flat-exponential.
json named_model_spec(const std::string& name);

/// Load by built-in name or by JSON file path.  `overrides` are key=value
/// pairs applied onto the spec before construction.
AnyModel load_model(const std::string& name_or_path,
                    const std::vector<std::string>& overrides = {});

/// The canonical JSON spec the model was built from (post-overrides).
json resolve_model_spec(const std::string& name_or_path,
                        const std::vector<std::string>& overrides = {});

Eigen::MatrixXd load_csv_matrix(const std::string& path);

struct ExperimentConfig {
  std::string command;
  json model_spec;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 1;
  int jobs = 0;
  std::vector<double> steps;
  std::optional<double> theta0, theta1, theta;
  std::string extra;  // command-specific selector (route, estimator, side, ...)

  json to_json() const;
  static ExperimentConfig from_json(const json& j);
  std::uint64_t hash() const;
};

}  // namespace taskinfo::config
