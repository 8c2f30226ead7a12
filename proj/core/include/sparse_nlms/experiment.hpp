#ifndef SPARSE_NLMS_EXPERIMENT_HPP
#define SPARSE_NLMS_EXPERIMENT_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sparse_nlms/algorithms.hpp"
#include "sparse_nlms/metrics.hpp"
#include "sparse_nlms/signal_model.hpp"

namespace sparse_nlms {

/// Monte-Carlo scenario description. Defaults reproduce the reference
/// simulation table except `runs`, which is reduced to desk scale.
struct ExperimentConfig {
    std::size_t n_taps = 60;
    std::vector<std::size_t> sparsity_list = {3, 6};
    std::vector<double> snr_db_list = {5.0, 10.0, 20.0};
    std::size_t runs = 100;
    std::vector<Variant> algorithms{kAllVariants.begin(), kAllVariants.end()};

    /// Horizon of every trial. The tolerance test is off by default so
    /// learning curves cover the whole horizon; see README.
    StopCriterion stop{1e-5, 5000, false};

    std::map<double, double> threshold_c_by_snr = {{5.0, 1e-4}, {10.0, 1e-5}, {20.0, 1e-5}};
    double mu = 0.2;
    double mu_max = 2.0;
    double rho_za_scale = 0.0002;  // rho_za = scale * sigma_n^2
    double rho_rza_scale = 0.002;  // rho_rza = scale * sigma_n^2
    double eps_rza = 20.0;
    double beta = 0.99;
    double signal_power = 1.0;     // P0; received SNR is P0 / sigma_n^2
    bool unnormalized_iss_rza = false;
    ValidationLevel validation = ValidationLevel::Inclusive;

    double es_n0_min_db = 12.0;
    double es_n0_max_db = 30.0;
    double es_n0_step_db = 1.0;
    std::vector<ModulationScheme> modulations = {
        {ModulationKind::Psk, 8}, {ModulationKind::Psk, 16},
        {ModulationKind::Qam, 16}, {ModulationKind::Qam, 64}};
    /// Scenario whose steady-state MSE feeds the BER sweep.
    double ber_reference_snr_db = 5.0;
    std::size_t ber_reference_sparsity = 3;

    /// Fraction of the iteration axis (from the end) averaged for the
    /// steady-state MSE.
    double steady_state_fraction = 0.1;

    std::uint64_t master_seed = 20140306;

    /// Throws ConfigError naming the offending field.
    void validate() const;

    /// sigma_n^2 for a received SNR in dB (0 for +inf).
    double noise_power(double snr_db) const;
    /// C for the given SNR: exact table entry, else the entry with the
    /// nearest SNR.
    double threshold_c(double snr_db) const;
    /// Fully resolved algorithm parameters for one scenario.
    AlgorithmSpec spec_for(Variant variant, double snr_db) const;
    /// Es/N0 grid from min to max inclusive.
    std::vector<double> es_n0_grid() const;

    bool operator==(const ExperimentConfig&) const = default;
};

struct Scenario {
    std::size_t sparsity = 3;
    double snr_db = 10.0;

    std::string label() const;
    bool operator==(const Scenario&) const = default;
};

/// Seed of trial `trial` within `scenario`. Shared by all algorithms so
/// they are compared on identical random draws.
std::uint64_t trial_seed(std::uint64_t master_seed, const Scenario& scenario,
                         std::size_t trial);

/// One seeded run: fresh channel and sample stream, estimator driven
/// until the stop criterion, squared channel error recorded per iteration.
TrialTrace run_trial(const ExperimentConfig& config, const Scenario& scenario,
                     Variant variant, std::uint64_t seed);

struct AlgorithmCurve {
    Variant variant = Variant::IssNlms;
    std::vector<double> mean_mse;  // per iteration, averaged over trials
    double steady_state_mse = 0.0;
    double mean_trace_length = 0.0;
    std::size_t max_trace_length = 0;
};

struct ScenarioResult {
    Scenario scenario;
    std::vector<AlgorithmCurve> curves;  // config.algorithms order

    const AlgorithmCurve* find(Variant v) const;
};

struct BerPoint {
    double es_n0_db = 0.0;
    std::string modulation;
    Variant variant = Variant::IssNlms;
    double ber = 0.0;
};

struct StepTracePoint {
    std::uint64_t iteration = 0;
    double error = 0.0;
    double step = 0.0;
};

struct AggregateResult {
    std::vector<ScenarioResult> scenarios;
    std::vector<BerPoint> ber;
    std::vector<StepTracePoint> step_trace;
    /// Constant step sizes drawn next to the step trace.
    std::vector<double> reference_steps;

    const ScenarioResult* find(const Scenario& s) const;
};

/// Raised when a Monte-Carlo cell fails; the message names the cell.
class ExperimentError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunOptions {
    /// Worker threads; 0 picks the hardware concurrency. Output does not
    /// depend on this.
    unsigned threads = 0;
    /// Compute the BER table from the reference scenario when present.
    bool with_ber = true;
};

/// Runs every (sparsity, SNR) x algorithm x trial cell and aggregates.
AggregateResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// BER vs Es/N0 for every algorithm and modulation, from the steady-state
/// MSE of the reference scenario.
std::vector<BerPoint> ber_table(const ExperimentConfig& config, const ScenarioResult& reference);

/// Single VSS-ZA-NLMS run with mu_max = 1 on the first scenario, for the
/// step size versus error view; reference steps {0.5, 1}.
AggregateResult run_stepsize_demo(const ExperimentConfig& config);

/// Mean of the last `fraction` of a curve (at least one point).
double steady_state_mean(const std::vector<double>& curve, double fraction);

/// 1-based iteration at which the curve first drops to `level` or below.
std::optional<std::size_t> first_iteration_at_or_below(const std::vector<double>& curve,
                                                      double level);

}  // namespace sparse_nlms

#endif  // SPARSE_NLMS_EXPERIMENT_HPP
