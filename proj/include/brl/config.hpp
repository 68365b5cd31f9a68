#pragma once

#include "brl/experiments.hpp"

#include <json.hpp>

#include <string>
#include <string_view>

namespace brl {

using Json = nlohmann::json;

/// Parses and validates an experiment config. Errors name the JSON pointer
/// of the offending field.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig config_from_json(const Json& j);
Json config_to_json(const ExperimentConfig& config);

PriorSpec prior_from_json(const Json& j, const std::string& pointer = "");
Json prior_to_json(const PriorSpec& prior);

/// Structural equality (priors, operator, every scalar and setting).
bool configs_equal(const ExperimentConfig& a, const ExperimentConfig& b);

Json report_to_json(const ExperimentReport& report);

/// Frozen CSV header, without the trailing newline.
std::string_view csv_header();
std::string report_to_csv(const ExperimentReport& report);

Json breakdown_to_json(const BoundBreakdown& b);

/// Fixed-format rendering of a double (round-trip precision).
std::string format_double(double v);

/// Reads a whole file; throws brl::Error when it cannot be opened.
std::string read_file(const std::string& path);

}  // namespace brl
