#ifndef SPARSE_NLMS_ALGORITHMS_HPP
#define SPARSE_NLMS_ALGORITHMS_HPP

// Normalized LMS channel estimators: fixed or error-driven step size,
// combined with no penalty, a zero-attracting l1 penalty, or its
// reweighted form.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sparse_nlms {

enum class Variant {
    IssNlms,
    IssZaNlms,
    IssRzaNlms,
    VssNlms,
    VssZaNlms,
    VssRzaNlms,
};

enum class StepPolicy { Fixed, Variable };
enum class Penalty { None, ZeroAttracting, Reweighted };

inline constexpr std::array<Variant, 6> kAllVariants = {
    Variant::IssNlms, Variant::IssZaNlms, Variant::IssRzaNlms,
    Variant::VssNlms, Variant::VssZaNlms, Variant::VssRzaNlms,
};

constexpr StepPolicy step_policy(Variant v) {
    switch (v) {
        case Variant::VssNlms:
        case Variant::VssZaNlms:
        case Variant::VssRzaNlms:
            return StepPolicy::Variable;
        default:
            return StepPolicy::Fixed;
    }
}

constexpr Penalty penalty(Variant v) {
    switch (v) {
        case Variant::IssZaNlms:
        case Variant::VssZaNlms:
            return Penalty::ZeroAttracting;
        case Variant::IssRzaNlms:
        case Variant::VssRzaNlms:
            return Penalty::Reweighted;
        default:
            return Penalty::None;
    }
}

/// Canonical name, e.g. "VSS-RZA-NLMS".
std::string_view to_string(Variant v);

/// Case-insensitive inverse of to_string.
std::optional<Variant> parse_variant(std::string_view name);

/// How strictly AlgorithmSpec::validate reads the step-size limits.
/// Inclusive admits mu_max == 2 and mu == 1 (the values used in the
/// experiments); Strict requires mu_max < 2 and mu < 1.
enum class ValidationLevel { Inclusive, Strict };

struct AlgorithmSpec {
    Variant variant = Variant::VssZaNlms;
    double mu = 0.2;            // fixed step, ISS variants
    double mu_max = 2.0;        // ceiling of the variable step
    double rho_za = 0.0;        // zero-attractor strength
    double rho_rza = 0.0;       // reweighted zero-attractor strength
    double eps_rza = 20.0;      // reweighting factor
    double beta = 0.99;         // projection smoothing factor
    double threshold_c = 1e-5;  // variable-step threshold C
    /// Drop the 1/(x'x) normalization from the ISS-RZA gradient step
    /// (the form printed without a denominator). VSS variants ignore it.
    bool unnormalized_iss_rza = false;

    /// Throws ConfigError on any out-of-range parameter.
    void validate(ValidationLevel level = ValidationLevel::Inclusive) const;
};

/// Running estimator state. Value type: step() returns a new one.
struct FilterState {
    std::vector<double> weights;
    std::vector<double> projection;
    double current_step = 0.0;
    std::uint64_t iteration = 0;

    /// Zero estimate and zero projection of length n (n >= 1).
    static FilterState zeros(std::size_t n);

    std::size_t size() const noexcept { return weights.size(); }

    friend bool operator==(const FilterState&, const FilterState&) = default;
};

struct StopCriterion {
    double delta_tolerance = 1e-5;
    std::uint64_t max_iterations = 5000;
    /// When false only max_iterations ends a run.
    bool tolerance_enabled = true;

    void validate() const;
    bool operator==(const StopCriterion&) const = default;
};

/// Regressors with x'x below this are treated as carrying no information.
inline constexpr double kRegressorEnergyFloor = 1e-12;

/// y - w'x.
double compute_error(const FilterState& state, std::span<const double> regressor,
                     double observation);

/// Componentwise sign with sgn(0) == 0.
std::vector<double> sign_vector(std::span<const double> v);

/// rho * sgn(w).
std::vector<double> za_penalty(std::span<const double> weights, double rho_za);

/// rho * sgn(w_i) / (1 + eps |w_i|).
std::vector<double> rza_penalty(std::span<const double> weights, double rho_rza,
                                double eps_rza);

/// beta p + (1 - beta) x e / (x'x). Throws DomainError if x'x is below
/// the energy floor.
std::vector<double> vss_update_projection(std::span<const double> projection,
                                          std::span<const double> regressor,
                                          double error, double beta);

/// mu_max * |p|^2 / (|p|^2 + C); always in [0, mu_max).
double vss_step_size(std::span<const double> projection, double mu_max,
                     double threshold_c);

struct StepResult {
    FilterState state;
    double error = 0.0;    // a-priori error e(n)
    bool skipped = false;  // regressor energy below the floor
};

/// One full estimator iteration.
StepResult step(const FilterState& state, const AlgorithmSpec& spec,
                std::span<const double> regressor, double observation);

struct Sample {
    std::vector<double> regressor;
    double observation = 0.0;
};

/// Fills `out` with the training sample for time index t; returns false
/// once the source is exhausted.
using SampleFeed = std::function<bool(std::uint64_t t, Sample& out)>;

/// Maps the current estimate to a scalar recorded per iteration
/// (typically the squared distance to the true channel).
using MseProbe = std::function<double(std::span<const double> weights)>;

struct TraceRecord {
    double mse = 0.0;    // probe value after the update, NaN without probe
    double error = 0.0;  // a-priori error
    double step = 0.0;   // step size used for the update
    double delta = 0.0;  // |w(n+1) - w(n)|^2
};

enum class StopReason { Tolerance, MaxIterations };

struct TrialTrace {
    std::vector<TraceRecord> records;
    StopReason reason = StopReason::MaxIterations;
};

struct RunResult {
    FilterState state;
    TrialTrace trace;
};

/// Iterates step() until |w(n+1) - w(n)|^2 <= delta_tolerance or the
/// iteration counter reaches max_iterations. Skipped iterations never
/// satisfy the tolerance test. Throws StreamExhausted when the feed runs
/// dry first.
RunResult run_until_stop(FilterState initial, const AlgorithmSpec& spec,
                         const StopCriterion& stop, const SampleFeed& feed,
                         const MseProbe& probe = {});

}  // namespace sparse_nlms

#endif  // SPARSE_NLMS_ALGORITHMS_HPP
