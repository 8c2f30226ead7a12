#include "sparse_nlms/algorithms.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>

#include "sparse_nlms/errors.hpp"

namespace sparse_nlms {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

void require_same_length(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw DimensionError(std::string(what) + ": length " + std::to_string(a) +
                             " does not match " + std::to_string(b));
    }
}

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) ==
                      std::tolower(static_cast<unsigned char>(y));
           });
}

}  // namespace

std::string_view to_string(Variant v) {
    switch (v) {
        case Variant::IssNlms: return "ISS-NLMS";
        case Variant::IssZaNlms: return "ISS-ZA-NLMS";
        case Variant::IssRzaNlms: return "ISS-RZA-NLMS";
        case Variant::VssNlms: return "VSS-NLMS";
        case Variant::VssZaNlms: return "VSS-ZA-NLMS";
        case Variant::VssRzaNlms: return "VSS-RZA-NLMS";
    }
    return "unknown";
}

std::optional<Variant> parse_variant(std::string_view name) {
    for (Variant v : kAllVariants) {
        if (iequals(name, to_string(v))) return v;
    }
    return std::nullopt;
}

void AlgorithmSpec::validate(ValidationLevel level) const {
    const bool strict = level == ValidationLevel::Strict;
    auto fail = [](const std::string& msg) { throw ConfigError(msg); };
    auto finite = [](double v) { return std::isfinite(v); };

    if (!finite(mu) || mu <= 0.0 || mu > 1.0 || (strict && mu >= 1.0)) {
        fail("mu must lie in (0, 1" + std::string(strict ? ")" : "]") +
             ", got " + std::to_string(mu));
    }
    if (!finite(mu_max) || mu_max <= 0.0 || mu_max > 2.0 || (strict && mu_max >= 2.0)) {
        fail("mu_max must lie in (0, 2" + std::string(strict ? ")" : "]") +
             ", got " + std::to_string(mu_max));
    }
    if (!finite(rho_za) || rho_za < 0.0) fail("rho_za must be >= 0");
    if (!finite(rho_rza) || rho_rza < 0.0) fail("rho_rza must be >= 0");
    if (!finite(eps_rza) || eps_rza <= 0.0) fail("eps_rza must be > 0");
    if (!finite(beta) || beta < 0.0 || beta > 1.0) fail("beta must lie in [0, 1]");
    if (!finite(threshold_c) || threshold_c <= 0.0) fail("threshold_c must be > 0");
}

FilterState FilterState::zeros(std::size_t n) {
    if (n == 0) throw DimensionError("filter length must be at least 1");
    FilterState s;
    s.weights.assign(n, 0.0);
    s.projection.assign(n, 0.0);
    return s;
}

void StopCriterion::validate() const {
    if (!(delta_tolerance > 0.0)) throw ConfigError("stop delta_tolerance must be > 0");
}

double compute_error(const FilterState& state, std::span<const double> regressor,
                     double observation) {
    require_same_length(regressor.size(), state.weights.size(), "regressor");
    return observation - dot(state.weights, regressor);
}

std::vector<double> sign_vector(std::span<const double> v) {
    std::vector<double> out(v.size());
    std::transform(v.begin(), v.end(), out.begin(), sgn);
    return out;
}

std::vector<double> za_penalty(std::span<const double> weights, double rho_za) {
    std::vector<double> out(weights.size());
    std::transform(weights.begin(), weights.end(), out.begin(),
                   [rho_za](double w) { return rho_za * sgn(w); });
    return out;
}

std::vector<double> rza_penalty(std::span<const double> weights, double rho_rza,
                                double eps_rza) {
    std::vector<double> out(weights.size());
    std::transform(weights.begin(), weights.end(), out.begin(), [=](double w) {
        return rho_rza * sgn(w) / (1.0 + eps_rza * std::abs(w));
    });
    return out;
}

std::vector<double> vss_update_projection(std::span<const double> projection,
                                          std::span<const double> regressor,
                                          double error, double beta) {
    require_same_length(regressor.size(), projection.size(), "regressor");
    const double energy = dot(regressor, regressor);
    if (energy < kRegressorEnergyFloor) {
        throw DomainError("regressor energy below floor in projection update");
    }
    const double gain = (1.0 - beta) * error / energy;
    std::vector<double> out(projection.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = beta * projection[i] + gain * regressor[i];
    }
    return out;
}

double vss_step_size(std::span<const double> projection, double mu_max,
                     double threshold_c) {
    const double energy = dot(projection, projection);
    return mu_max * energy / (energy + threshold_c);
}

StepResult step(const FilterState& state, const AlgorithmSpec& spec,
                std::span<const double> regressor, double observation) {
    require_same_length(state.projection.size(), state.weights.size(), "projection");
    StepResult result;
    result.error = compute_error(state, regressor, observation);
    result.state = state;
    ++result.state.iteration;

    const double energy = dot(regressor, regressor);
    if (energy < kRegressorEnergyFloor) {
        result.skipped = true;
        return result;
    }

    double mu = spec.mu;
    if (step_policy(spec.variant) == StepPolicy::Variable) {
        result.state.projection =
            vss_update_projection(state.projection, regressor, result.error, spec.beta);
        mu = vss_step_size(result.state.projection, spec.mu_max, spec.threshold_c);
    }
    result.state.current_step = mu;

    const bool normalized = !(spec.unnormalized_iss_rza && spec.variant == Variant::IssRzaNlms);
    const double gain = normalized ? mu * result.error / energy : mu * result.error;

    auto& w = result.state.weights;
    const auto& old = state.weights;
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = old[i] + gain * regressor[i];
    }
    switch (penalty(spec.variant)) {
        case Penalty::None:
            break;
        case Penalty::ZeroAttracting:
            for (std::size_t i = 0; i < w.size(); ++i) w[i] -= spec.rho_za * sgn(old[i]);
            break;
        case Penalty::Reweighted:
            for (std::size_t i = 0; i < w.size(); ++i) {
                w[i] -= spec.rho_rza * sgn(old[i]) / (1.0 + spec.eps_rza * std::abs(old[i]));
            }
            break;
    }
    return result;
}

RunResult run_until_stop(FilterState initial, const AlgorithmSpec& spec,
                         const StopCriterion& stop, const SampleFeed& feed,
                         const MseProbe& probe) {
    RunResult out{std::move(initial), {}};
    auto& state = out.state;
    auto& trace = out.trace;
    trace.reason = StopReason::MaxIterations;
    if (state.iteration < stop.max_iterations) {
        trace.records.reserve(static_cast<std::size_t>(stop.max_iterations - state.iteration));
    }

    Sample sample;
    while (state.iteration < stop.max_iterations) {
        const std::uint64_t t = state.iteration;
        if (!feed(t, sample)) {
            throw StreamExhausted("sample stream exhausted at iteration " + std::to_string(t));
        }
        StepResult r = step(state, spec, sample.regressor, sample.observation);

        double delta = 0.0;
        for (std::size_t i = 0; i < state.weights.size(); ++i) {
            const double d = r.state.weights[i] - state.weights[i];
            delta += d * d;
        }
        state = std::move(r.state);

        TraceRecord rec;
        rec.mse = probe ? probe(state.weights) : std::numeric_limits<double>::quiet_NaN();
        rec.error = r.error;
        rec.step = state.current_step;
        rec.delta = delta;
        trace.records.push_back(rec);

        if (stop.tolerance_enabled && !r.skipped && delta <= stop.delta_tolerance) {
            trace.reason = StopReason::Tolerance;
            break;
        }
    }
    return out;
}

}  // namespace sparse_nlms
