#include "sparse_nlms/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "sparse_nlms/errors.hpp"

namespace sparse_nlms {

namespace {

// Pairwise summation of column `i` over traces [lo, hi), in trial order.
double pairwise_sum(const std::vector<std::vector<double>>& traces, std::size_t i,
                    std::size_t lo, std::size_t hi) {
    if (hi - lo <= 8) {
        double acc = 0.0;
        for (std::size_t k = lo; k < hi; ++k) acc += traces[k][i];
        return acc;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    return pairwise_sum(traces, i, lo, mid) + pairwise_sum(traces, i, mid, hi);
}

// Holds every trace at its final value up to `length`: a stopped estimator
// keeps its last output.
void extend_frozen(std::vector<double>& trace, std::size_t length) {
    if (trace.empty()) return;
    trace.resize(length, trace.back());
}

unsigned resolve_threads(unsigned requested, std::size_t work) {
    unsigned n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(work, 1)));
}

}  // namespace

void ExperimentConfig::validate() const {
    auto fail = [](const std::string& m) { throw ConfigError(m); };
    if (n_taps == 0) fail("n_taps must be >= 1");
    if (sparsity_list.empty()) fail("sparsity_list must not be empty");
    for (auto k : sparsity_list) {
        if (k == 0 || k > n_taps) {
            fail(fmt::format("sparsity {} outside [1, n_taps={}]", k, n_taps));
        }
    }
    if (snr_db_list.empty()) fail("snr_db_list must not be empty");
    for (double s : snr_db_list) {
        if (std::isnan(s) || s == -std::numeric_limits<double>::infinity()) {
            fail("snr_db values must be finite or +inf");
        }
    }
    if (runs == 0) fail("runs must be >= 1");
    if (algorithms.empty()) fail("algorithms must not be empty");
    if (stop.max_iterations == 0) fail("stop.max_iterations must be >= 1");
    stop.validate();
    if (threshold_c_by_snr.empty()) fail("threshold_c_by_snr must not be empty");
    for (auto [snr, c] : threshold_c_by_snr) {
        if (!(c > 0.0) || !std::isfinite(c)) fail(fmt::format("threshold_c for {} dB must be > 0", snr));
    }
    if (!(rho_za_scale >= 0.0)) fail("rho_za_scale must be >= 0");
    if (!(rho_rza_scale >= 0.0)) fail("rho_rza_scale must be >= 0");
    if (!(signal_power > 0.0) || !std::isfinite(signal_power)) fail("signal_power must be > 0");
    if (!(es_n0_step_db > 0.0)) fail("es_n0_db.step must be > 0");
    if (!(es_n0_max_db >= es_n0_min_db)) fail("es_n0_db.max must be >= es_n0_db.min");
    if (!std::isfinite(es_n0_min_db) || !std::isfinite(es_n0_max_db)) fail("es_n0_db range must be finite");
    if (modulations.empty()) fail("modulations must not be empty");
    for (const auto& m : modulations) {
        try {
            m.validate();
        } catch (const DomainError& e) {
            fail(e.what());
        }
    }
    if (!(steady_state_fraction > 0.0 && steady_state_fraction <= 1.0)) {
        fail("steady_state_fraction must lie in (0, 1]");
    }
    for (Variant v : algorithms) {
        for (double snr : snr_db_list) spec_for(v, snr).validate(validation);
    }
}

double ExperimentConfig::noise_power(double snr_db) const {
    if (snr_db == std::numeric_limits<double>::infinity()) return 0.0;
    return signal_power / std::pow(10.0, snr_db / 10.0);
}

double ExperimentConfig::threshold_c(double snr_db) const {
    if (threshold_c_by_snr.empty()) throw ConfigError("threshold_c_by_snr is empty");
    if (auto it = threshold_c_by_snr.find(snr_db); it != threshold_c_by_snr.end()) {
        return it->second;
    }
    auto best = threshold_c_by_snr.begin();
    for (auto it = threshold_c_by_snr.begin(); it != threshold_c_by_snr.end(); ++it) {
        if (std::abs(it->first - snr_db) < std::abs(best->first - snr_db)) best = it;
    }
    if (std::isinf(snr_db)) best = std::prev(threshold_c_by_snr.end());
    return best->second;
}

AlgorithmSpec ExperimentConfig::spec_for(Variant variant, double snr_db) const {
    const double sigma2 = noise_power(snr_db);
    AlgorithmSpec s;
    s.variant = variant;
    s.mu = mu;
    s.mu_max = mu_max;
    s.rho_za = rho_za_scale * sigma2;
    s.rho_rza = rho_rza_scale * sigma2;
    s.eps_rza = eps_rza;
    s.beta = beta;
    s.threshold_c = threshold_c(snr_db);
    s.unnormalized_iss_rza = unnormalized_iss_rza;
    return s;
}

std::vector<double> ExperimentConfig::es_n0_grid() const {
    std::vector<double> grid;
    const auto count = static_cast<std::size_t>(
        std::floor((es_n0_max_db - es_n0_min_db) / es_n0_step_db + 1e-9)) + 1;
    grid.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        grid.push_back(es_n0_min_db + static_cast<double>(i) * es_n0_step_db);
    }
    return grid;
}

std::string Scenario::label() const { return fmt::format("K={} SNR={}dB", sparsity, snr_db); }

std::uint64_t trial_seed(std::uint64_t master_seed, const Scenario& scenario,
                         std::size_t trial) {
    return derive_seed(master_seed, {static_cast<std::uint64_t>(scenario.sparsity),
                                     std::bit_cast<std::uint64_t>(scenario.snr_db),
                                     static_cast<std::uint64_t>(trial)});
}

TrialTrace run_trial(const ExperimentConfig& config, const Scenario& scenario,
                     Variant variant, std::uint64_t seed) {
    const AlgorithmSpec spec = config.spec_for(variant, scenario.snr_db);
    spec.validate(config.validation);

    const ChannelRealization channel = generate_channel(
        config.n_taps, scenario.sparsity,
        derive_seed(seed, {static_cast<std::uint64_t>(Substream::Channel)}));
    const SampleStream stream(seed, config.n_taps, config.noise_power(scenario.snr_db),
                              config.signal_power,
                              static_cast<std::size_t>(config.stop.max_iterations));

    const SampleFeed feed = [&stream, &channel](std::uint64_t t, Sample& out) {
        if (t >= stream.length()) return false;
        stream.sample_into(channel, static_cast<std::size_t>(t), out);
        return true;
    };
    const MseProbe probe = [&channel](std::span<const double> w) {
        return average_mse(channel.taps, w);
    };
    return run_until_stop(FilterState::zeros(config.n_taps), spec, config.stop, feed, probe)
        .trace;
}

const AlgorithmCurve* ScenarioResult::find(Variant v) const {
    auto it = std::find_if(curves.begin(), curves.end(),
                           [v](const AlgorithmCurve& c) { return c.variant == v; });
    return it == curves.end() ? nullptr : &*it;
}

const ScenarioResult* AggregateResult::find(const Scenario& s) const {
    auto it = std::find_if(scenarios.begin(), scenarios.end(),
                           [&s](const ScenarioResult& r) { return r.scenario == s; });
    return it == scenarios.end() ? nullptr : &*it;
}

double steady_state_mean(const std::vector<double>& curve, double fraction) {
    if (curve.empty()) return 0.0;
    const auto tail = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(curve.size()))), 1,
        curve.size());
    double acc = 0.0;
    for (std::size_t i = curve.size() - tail; i < curve.size(); ++i) acc += curve[i];
    return acc / static_cast<double>(tail);
}

std::optional<std::size_t> first_iteration_at_or_below(const std::vector<double>& curve,
                                                      double level) {
    for (std::size_t i = 0; i < curve.size(); ++i) {
        if (curve[i] <= level) return i + 1;
    }
    return std::nullopt;
}

namespace {

struct CellOutput {
    std::vector<std::vector<double>> traces;  // per trial, mse per iteration
    std::vector<StepTracePoint> first_step_trace;
};

CellOutput run_cell(const ExperimentConfig& config, const Scenario& scenario, Variant variant,
                    unsigned threads) {
    CellOutput out;
    out.traces.resize(config.runs);
    std::vector<TrialTrace> first(1);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::size_t failed_trial = 0;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (;;) {
            const std::size_t trial = next.fetch_add(1);
            if (trial >= config.runs) return;
            try {
                TrialTrace trace =
                    run_trial(config, scenario, variant, trial_seed(config.master_seed, scenario, trial));
                auto& mse = out.traces[trial];
                mse.reserve(trace.records.size());
                for (const auto& r : trace.records) mse.push_back(r.mse);
                if (trial == 0) first[0] = std::move(trace);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure || trial < failed_trial) {
                    failure = std::current_exception();
                    failed_trial = trial;
                }
                next.store(config.runs);
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        const unsigned n = resolve_threads(threads, config.runs);
        for (unsigned i = 1; i < n; ++i) pool.emplace_back(worker);
        worker();
    }
    if (failure) {
        try {
            std::rethrow_exception(failure);
        } catch (const std::exception& e) {
            throw ExperimentError(fmt::format("cell {} {} trial {}: {}", scenario.label(),
                                              to_string(variant), failed_trial, e.what()));
        }
    }
    for (std::size_t i = 0; i < first[0].records.size(); ++i) {
        const auto& r = first[0].records[i];
        out.first_step_trace.push_back({i + 1, r.error, r.step});
    }
    return out;
}

}  // namespace

std::vector<BerPoint> ber_table(const ExperimentConfig& config, const ScenarioResult& reference) {
    std::vector<BerPoint> table;
    const auto grid = config.es_n0_grid();
    for (const auto& m : config.modulations) {
        for (const auto& curve : reference.curves) {
            if (!(curve.steady_state_mse >= 0.0 && curve.steady_state_mse <= 1.0)) {
                throw ExperimentError(fmt::format(
                    "cell {} {}: steady-state MSE {} outside [0, 1], cannot map to BER",
                    reference.scenario.label(), to_string(curve.variant),
                    curve.steady_state_mse));
            }
            for (double es_n0 : grid) {
                const double gamma = effective_snr(es_n0, curve.steady_state_mse);
                table.push_back({es_n0, m.name(), curve.variant, ber(m, gamma)});
            }
        }
    }
    return table;
}

AggregateResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
    config.validate();
    AggregateResult result;

    bool step_trace_taken = false;
    for (std::size_t k : config.sparsity_list) {
        for (double snr : config.snr_db_list) {
            ScenarioResult sr;
            sr.scenario = {k, snr};
            std::vector<CellOutput> cells;
            std::size_t axis = 0;
            for (Variant v : config.algorithms) {
                cells.push_back(run_cell(config, sr.scenario, v, options.threads));
                for (const auto& t : cells.back().traces) axis = std::max(axis, t.size());
            }
            for (std::size_t a = 0; a < config.algorithms.size(); ++a) {
                auto& cell = cells[a];
                AlgorithmCurve curve;
                curve.variant = config.algorithms[a];
                double length_sum = 0.0;
                for (auto& t : cell.traces) {
                    length_sum += static_cast<double>(t.size());
                    curve.max_trace_length = std::max(curve.max_trace_length, t.size());
                    extend_frozen(t, axis);
                }
                curve.mean_trace_length = length_sum / static_cast<double>(config.runs);
                curve.mean_mse.resize(axis);
                for (std::size_t i = 0; i < axis; ++i) {
                    curve.mean_mse[i] = pairwise_sum(cell.traces, i, 0, cell.traces.size()) /
                                        static_cast<double>(config.runs);
                }
                curve.steady_state_mse = steady_state_mean(curve.mean_mse, config.steady_state_fraction);
                if (!step_trace_taken && step_policy(curve.variant) == StepPolicy::Variable) {
                    result.step_trace = std::move(cell.first_step_trace);
                    step_trace_taken = true;
                }
                sr.curves.push_back(std::move(curve));
            }
            result.scenarios.push_back(std::move(sr));
        }
    }
    if (step_trace_taken) result.reference_steps = {config.mu};

    if (options.with_ber) {
        const Scenario ref{config.ber_reference_sparsity, config.ber_reference_snr_db};
        if (const ScenarioResult* r = result.find(ref)) result.ber = ber_table(config, *r);
    }
    return result;
}

AggregateResult run_stepsize_demo(const ExperimentConfig& config) {
    ExperimentConfig demo = config;
    demo.mu_max = 1.0;
    demo.runs = 1;
    demo.algorithms = {Variant::VssZaNlms};
    demo.validate();

    const Scenario scenario{demo.sparsity_list.front(), demo.snr_db_list.front()};
    const TrialTrace trace =
        run_trial(demo, scenario, Variant::VssZaNlms, trial_seed(demo.master_seed, scenario, 0));

    AggregateResult result;
    result.step_trace.reserve(trace.records.size());
    for (std::size_t i = 0; i < trace.records.size(); ++i) {
        result.step_trace.push_back({i + 1, trace.records[i].error, trace.records[i].step});
    }
    result.reference_steps = {0.5, 1.0};
    return result;
}

}  // namespace sparse_nlms
