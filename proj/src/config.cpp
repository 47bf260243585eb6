#include "taskinfo/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "taskinfo/report.hpp"

namespace taskinfo::config {

namespace {

void require_fields(const json& spec, const std::set<std::string>& allowed) {
  for (auto it = spec.begin(); it != spec.end(); ++it) {
    if (allowed.find(it.key()) == allowed.end()) {
      throw std::invalid_argument("model config: unknown field '" + it.key() + "'");
    }
  }
}

Eigen::MatrixXd matrix_field(const json& spec, const std::string& key,
                             const std::string& base_dir) {
  const json& v = spec.at(key);
  if (v.is_string()) {
    std::string path = v.get<std::string>();
    if (!path.empty() && path[0] != '/') path = base_dir + "/" + path;
    return load_csv_matrix(path);
  }
  if (!v.is_array() || v.empty()) {
    throw std::invalid_argument("model config: field '" + key +
                                "' must be a row-major matrix or a CSV path");
  }
  // Row-major nested arrays; a flat array is a single row.
  if (!v[0].is_array()) {
    Eigen::MatrixXd m(1, v.size());
    for (std::size_t j = 0; j < v.size(); ++j) m(0, static_cast<Eigen::Index>(j)) = v[j].get<double>();
    return m;
  }
  const std::size_t rows = v.size();
  const std::size_t cols = v[0].size();
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (v[i].size() != cols) {
      throw std::invalid_argument("model config: ragged matrix in field '" + key + "'");
    }
    for (std::size_t j = 0; j < cols; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v[i][j].get<double>();
    }
  }
  return m;
}

Eigen::VectorXd vector_field(const json& spec, const std::string& key) {
  const json& v = spec.at(key);
  if (!v.is_array()) {
    throw std::invalid_argument("model config: field '" + key + "' must be an array");
  }
  Eigen::VectorXd x(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) x[static_cast<Eigen::Index>(i)] = v[i].get<double>();
  return x;
}

}  // namespace

Eigen::MatrixXd load_csv_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("matrix file not found: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::runtime_error("ragged CSV matrix: " + path);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("empty CSV matrix: " + path);
  Eigen::MatrixXd m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows.front().size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

AnyModel model_from_json(const json& spec, const std::string& base_dir) {
  if (!spec.is_object() || !spec.contains("type")) {
    throw std::invalid_argument("model config: missing 'type'");
  }
  const std::string type = spec.at("type").get<std::string>();
  if (type == "gaussian_scalar") {
    require_fields(spec, {"type", "s", "K", "mu", "sigma2", "flat_prior"});
    Eigen::VectorXd s = vector_field(spec, "s");
    Eigen::MatrixXd K = matrix_field(spec, "K", base_dir);
    bool flat = spec.value("flat_prior", false);
    if (flat) return models::make_gaussian_scalar_model_flat_prior(s, K);
    return models::make_gaussian_scalar_model(s, K, spec.value("mu", 0.0),
                                              spec.value("sigma2", 1.0));
  }
  if (type == "gaussian_imaging") {
    require_fields(spec, {"type", "H", "Kn", "Ktheta", "mu_vec"});
    Eigen::MatrixXd H = matrix_field(spec, "H", base_dir);
    Eigen::MatrixXd Kn = matrix_field(spec, "Kn", base_dir);
    Eigen::MatrixXd Kt = matrix_field(spec, "Ktheta", base_dir);
    Eigen::VectorXd mu = spec.contains("mu_vec")
                             ? vector_field(spec, "mu_vec")
                             : Eigen::VectorXd::Zero(H.cols());
    return models::make_gaussian_imaging_model(H, Kn, Kt, mu);
  }
  if (type == "normal_family") {
    require_fields(spec, {"type", "m", "sigma"});
    double sigma = spec.value("sigma", 1.0);
    return models::make_flat_likelihood_normal_prior(spec.value("m", 0.0), sigma * sigma);
  }
  if (type == "exponential_family") {
    require_fields(spec, {"type", "beta"});
    return models::make_flat_likelihood_exponential_prior(spec.value("beta", 1.0));
  }
  throw std::invalid_argument("model config: unknown type '" + type + "'");
}

json named_model_spec(const std::string& name) {
  if (name == "scalar-default") {
    return json{{"type", "gaussian_scalar"},
                {"s", {1.0, 0.0}},
                {"K", {{1.0, 0.0}, {0.0, 1.0}}},
                {"mu", 0.0},
                {"sigma2", 1.0}};
  }
  if (name == "scalar-flat-prior") {
    return json{{"type", "gaussian_scalar"},
                {"s", {1.0, 0.0}},
                {"K", {{4.0, 0.0}, {0.0, 4.0}}},
                {"flat_prior", true}};
  }
  if (name == "imaging-default") {
    return json{{"type", "gaussian_imaging"},
                {"H", {{1.0, 0.0}}},
                {"Kn", {{1.0}}},
                {"Ktheta", {{1.0, 0.0}, {0.0, 1.0}}},
                {"mu_vec", {0.0, 0.0}}};
  }
  if (name == "normal" || name == "flat-normal") {
    return json{{"type", "normal_family"}, {"m", 0.0}, {"sigma", 1.0}};
  }
  if (name == "exponential" || name == "flat-exponential") {
    return json{{"type", "exponential_family"}, {"beta", 1.0}};
  }
  throw std::invalid_argument("unknown model name '" + name + "'");
}

namespace {

json apply_overrides(json spec, const std::vector<std::string>& overrides) {
  for (const std::string& kv : overrides) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("override must be key=value: " + kv);
    }
    std::string key = kv.substr(0, eq);
    std::string value = kv.substr(eq + 1);
    json parsed;
    try {
      parsed = json::parse(value);
    } catch (const json::parse_error&) {
      parsed = value;  // plain string
    }
    spec[key] = parsed;
  }
  return spec;
}

bool looks_like_path(const std::string& s) {
  return s.find('/') != std::string::npos || s.find(".json") != std::string::npos;
}

}  // namespace

json resolve_model_spec(const std::string& name_or_path,
                        const std::vector<std::string>& overrides) {
  json spec;
  if (looks_like_path(name_or_path)) {
    std::ifstream in(name_or_path);
    if (!in) throw std::runtime_error("model file not found: " + name_or_path);
    in >> spec;
    if (spec.contains("model")) spec = spec.at("model");
  } else {
    spec = named_model_spec(name_or_path);
  }
  return apply_overrides(std::move(spec), overrides);
}

AnyModel load_model(const std::string& name_or_path,
                    const std::vector<std::string>& overrides) {
  json spec = resolve_model_spec(name_or_path, overrides);
  std::string base_dir = ".";
  if (looks_like_path(name_or_path)) {
    auto slash = name_or_path.rfind('/');
    if (slash != std::string::npos) base_dir = name_or_path.substr(0, slash);
  }
  return model_from_json(spec, base_dir);
}

json ExperimentConfig::to_json() const {
  json j;
  j["command"] = command;
  j["model"] = model_spec;
  j["samples"] = samples;
  j["seed"] = seed;
  j["jobs"] = jobs;
  if (!steps.empty()) j["steps"] = steps;
  if (theta0) j["theta0"] = *theta0;
  if (theta1) j["theta1"] = *theta1;
  if (theta) j["theta"] = *theta;
  if (!extra.empty()) j["extra"] = extra;
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  static const std::set<std::string> allowed{"command", "model", "samples", "seed",
                                             "jobs",    "steps", "theta0",  "theta1",
                                             "theta",   "extra"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (allowed.find(it.key()) == allowed.end()) {
      throw std::invalid_argument("experiment config: unknown field '" + it.key() + "'");
    }
  }
  ExperimentConfig c;
  c.command = j.value("command", "");
  if (j.contains("model")) c.model_spec = j.at("model");
  c.samples = j.value("samples", std::uint64_t{100000});
  c.seed = j.value("seed", std::uint64_t{1});
  c.jobs = j.value("jobs", 0);
  if (j.contains("steps")) c.steps = j.at("steps").get<std::vector<double>>();
  if (j.contains("theta0")) c.theta0 = j.at("theta0").get<double>();
  if (j.contains("theta1")) c.theta1 = j.at("theta1").get<double>();
  if (j.contains("theta")) c.theta = j.at("theta").get<double>();
  c.extra = j.value("extra", "");
  return c;
}

std::uint64_t ExperimentConfig::hash() const { return report::config_hash(to_json()); }

}  // namespace taskinfo::config
