#ifndef SPARSE_NLMS_CONFIG_HPP
#define SPARSE_NLMS_CONFIG_HPP

// ExperimentConfig ingestion. Two equivalent encodings:
//
//   key-value text             JSON document
//   --------------             -------------
//   n_taps = 60                {"n_taps": 60,
//   sparsity_list = 3, 6        "sparsity_list": [3, 6],
//   stop.max_iterations = 5000  "stop": {"max_iterations": 5000},
//   threshold_c_by_snr.5 = 1e-4 "threshold_c_by_snr": {"5": 1e-4}}
//
// Keys not present keep their defaults. Unknown keys are rejected.

#include <filesystem>
#include <string>
#include <string_view>

#include "sparse_nlms/experiment.hpp"

namespace sparse_nlms {

/// Parses key-value text; throws ConfigError with the line number.
ExperimentConfig parse_config_text(std::string_view text);

/// Parses a JSON document; throws ConfigError.
ExperimentConfig parse_config_json(std::string_view text);

/// Format comes from the extension (.json) or the first non-blank
/// character. The result is validated. Throws ConfigError, including for
/// a missing file (the message carries the path).
ExperimentConfig load_config_file(const std::filesystem::path& path);

/// Canonical key-value rendering; parse_config_text(to_config_text(c)) == c.
std::string to_config_text(const ExperimentConfig& config);

/// Canonical JSON rendering with the same round-trip property.
std::string to_config_json(const ExperimentConfig& config);

}  // namespace sparse_nlms

#endif  // SPARSE_NLMS_CONFIG_HPP
