#ifndef SPARSE_NLMS_REPORT_HPP
#define SPARSE_NLMS_REPORT_HPP

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sparse_nlms/experiment.hpp"

namespace sparse_nlms {

/// Git blob object id (SHA-1 of "blob <len>\0" + content), lowercase hex.
std::string git_blob_hash(std::string_view content);

std::string mse_curves_csv(const AggregateResult& result);
std::string steady_state_csv(const AggregateResult& result);
std::string ber_curves_csv(const AggregateResult& result);
std::string stepsize_trace_csv(const AggregateResult& result);

/// Config echo, per-trial seeds and the hash of the config echo.
std::string run_manifest(const AggregateResult& result, const ExperimentConfig& config,
                         std::string_view command);

/// Writes the CSV tables, the manifest and SVG plots into out_dir (created
/// if needed). CSVs are always written, header-only when empty; plots only
/// when there is data. Returns the written paths. Throws IoError.
std::vector<std::filesystem::path> emit_results(const AggregateResult& result,
                                                const ExperimentConfig& config,
                                                const std::filesystem::path& out_dir,
                                                std::string_view command);

}  // namespace sparse_nlms

#endif  // SPARSE_NLMS_REPORT_HPP
