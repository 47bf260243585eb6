#include "taskinfo/report.hpp"

#include <cstdio>

namespace taskinfo::report {

namespace {

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string sig6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

std::uint64_t config_hash(const json& j) { return fnv1a64(j.dump()); }

json to_json(const fisher::FisherResult& r, const std::string& quantity) {
  json j;
  j["quantity"] = quantity;
  j["method"] = r.method;
  j["value"] = r.value;
  if (r.std_error) j["std_error"] = *r.std_error;
  j["samples"] = r.samples;
  j["seed"] = r.seed;
  if (r.is_matrix()) {
    json m = json::array();
    for (Eigen::Index i = 0; i < r.matrix.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index k = 0; k < r.matrix.cols(); ++k) row.push_back(r.matrix(i, k));
      m.push_back(row);
    }
    j["matrix"] = m;
  }
  if (r.mean_tprime) {
    j["mean_tprime"] = *r.mean_tprime;
    j["mean_tprime_se"] = *r.mean_tprime_se;
  }
  if (r.boundary_prior) j["boundary_prior"] = true;
  return j;
}

json to_json(const observer::RocCurve& c) {
  json j;
  j["quantity"] = "auc";
  j["value"] = c.auc;
  j["std_error"] = c.std_error;
  j["n0"] = c.n0;
  j["n1"] = c.n1;
  if (c.degenerate) j["degenerate"] = true;
  return j;
}

json to_json(const observer::MpeEstimate& e) {
  json j;
  j["quantity"] = "mpe";
  j["value"] = e.value;
  j["std_error"] = e.std_error;
  j["pr0"] = e.pr0;
  j["pr1"] = e.pr1;
  j["threshold"] = e.threshold;
  j["n0"] = e.n0;
  j["n1"] = e.n1;
  return j;
}

json to_json(const tv::TvEstimate& e, const std::string& quantity) {
  json j;
  j["quantity"] = quantity;
  j["method"] = e.method;
  j["value"] = e.value;
  if (e.std_error) j["std_error"] = *e.std_error;
  if (e.grid_nodes) j["grid_nodes"] = *e.grid_nodes;
  if (!e.converged) j["converged"] = false;
  return j;
}

json to_json(const bounds::BoundReport& r) {
  json j;
  j["name"] = r.name;
  j["kind"] = r.kind == bounds::CheckKind::kInequality ? "inequality" : "identity";
  j["lhs"] = r.lhs;
  j["lhs_se"] = r.lhs_se;
  j["rhs"] = r.rhs;
  j["rhs_se"] = r.rhs_se;
  j["slack"] = r.slack;
  j["verdict"] = bounds::verdict_name(r.verdict);
  if (r.ratio) j["ratio"] = *r.ratio;
  j["config_hash"] = r.config_hash;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

json to_json(const bounds::SlopeEstimate& s) {
  json j;
  j["quantity"] = "mpe_slope";
  j["side"] = s.side == bounds::Side::kPlus ? "plus" : "minus";
  j["value"] = s.value;
  j["extrapolated"] = s.extrapolated;
  j["std_error"] = s.std_error;
  j["step_sizes"] = s.step_sizes;
  j["quotients"] = s.quotients;
  if (!s.monotone_ok) j["monotone"] = false;
  return j;
}

std::string roc_csv(const observer::RocCurve& c) {
  std::string out = "threshold,FPF,TPF\n";
  for (const auto& p : c.points) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", p.threshold, p.fpf, p.tpf);
    out += buf;
  }
  return out;
}

std::string refinement_csv(const tv::TvEstimate& e) {
  std::string out = "N,partial_sum\n";
  for (const auto& [n, sum] : e.refinement) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%d,%.17g\n", n, sum);
    out += buf;
  }
  return out;
}

std::string bound_line(const bounds::BoundReport& r) {
  std::string line = r.name + ": lhs=" + sig6(r.lhs) + " rhs=" + sig6(r.rhs) +
                     " slack=" + sig6(r.slack);
  if (r.ratio) line += " ratio=" + sig6(*r.ratio);
  line += std::string(" verdict=") + bounds::verdict_name(r.verdict);
  return line;
}

}  // namespace taskinfo::report
