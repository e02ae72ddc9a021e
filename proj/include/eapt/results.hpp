#pragma once

// Serialization of run outputs. Matrices are nested arrays of [re, im] pairs;
// doubles use the shortest representation that parses back to the same value,
// so a reloaded record is bit-exact.

#include "eapt/config.hpp"

#include <json.hpp>

#include <string>

namespace eapt {

nlohmann::ordered_json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);

nlohmann::ordered_json dataset_to_json(const TomographyDataset& data);
TomographyDataset dataset_from_json(const nlohmann::json& j);

nlohmann::ordered_json results_to_json(const ExperimentConfig& config, const EaptResult& result);
/// Columns scale, quantity, value, stderr; every value also appears in the results record.
std::string fidelities_csv(const EaptResult& result);
nlohmann::ordered_json comparison_to_json(const ExperimentConfig& config, const ComparisonReport& report);

/// Formats a double exactly as the JSON writer does.
std::string format_double(double v);

}  // namespace eapt
