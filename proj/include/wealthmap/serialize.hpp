#pragma once

#include <string>

#include <json.hpp>

#include "wealthmap/ensemble.hpp"

namespace wealthmap {

// {combiner, base_score, learning_rate, trees: [{nodes: [...]}]} with flat
// node arrays carrying child indexes. Doubles survive the round trip
// bit-exactly.
nlohmann::json ensemble_to_json(const TreeEnsemble& ensemble);
TreeEnsemble ensemble_from_json(const nlohmann::json& doc);

void save_ensemble(const std::string& path, const TreeEnsemble& ensemble);
TreeEnsemble load_ensemble(const std::string& path);

}  // namespace wealthmap
