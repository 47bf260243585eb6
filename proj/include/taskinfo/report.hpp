// JSON/CSV serialization of results and the stable configuration hash.
#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "taskinfo/bounds.hpp"
#include "taskinfo/fisher.hpp"
#include "taskinfo/observer.hpp"
#include "taskinfo/tv.hpp"

namespace taskinfo::report {

using json = nlohmann::json;

/// FNV-1a of a canonical (sorted-key) JSON dump; platform independent.
std::uint64_t config_hash(const json& j);

json to_json(const fisher::FisherResult& r, const std::string& quantity);
json to_json(const observer::RocCurve& c);
json to_json(const observer::MpeEstimate& e);
json to_json(const tv::TvEstimate& e, const std::string& quantity);
json to_json(const bounds::BoundReport& r);
json to_json(const bounds::SlopeEstimate& s);

/// ROC curve as "threshold,FPF,TPF" CSV.
std::string roc_csv(const observer::RocCurve& c);
/// Grid refinement trace as "N,partial_sum" CSV.
std::string refinement_csv(const tv::TvEstimate& e);

/// One human-readable line, 6 significant digits.
std::string bound_line(const bounds::BoundReport& r);

}  // namespace taskinfo::report
