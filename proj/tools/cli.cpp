#include "cli.hpp"

#include <cmath>
#include <filesystem>
#include <optional>
#include <ostream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "sparse_nlms/config.hpp"
#include "sparse_nlms/errors.hpp"
#include "sparse_nlms/experiment.hpp"
#include "sparse_nlms/metrics.hpp"
#include "sparse_nlms/report.hpp"

namespace sparse_nlms::cli {

namespace {

struct CommonOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> runs;
    std::string out_dir = "results";
    std::string algorithms;
    unsigned threads = 0;
    bool full_scale = false;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--config", o.config_path, "Config file (key-value text or JSON)");
    cmd->add_option("--seed", o.seed, "Master seed (overrides the config)");
    cmd->add_option("--runs", o.runs, "Monte-Carlo runs per cell (overrides the config)");
    cmd->add_option("--out", o.out_dir, "Output directory")->capture_default_str();
    cmd->add_option("--algorithms", o.algorithms, "Comma list, e.g. ISS-ZA-NLMS,VSS-ZA-NLMS");
    cmd->add_option("--threads", o.threads, "Worker threads, 0 = all cores")->capture_default_str();
    cmd->add_flag("--full-scale", o.full_scale, "Use 1000 runs per cell");
}

ExperimentConfig resolve_config(const CommonOptions& o) {
    ExperimentConfig c = o.config_path.empty() ? ExperimentConfig{} : load_config_file(o.config_path);
    if (o.full_scale) c.runs = 1000;
    if (o.runs) c.runs = *o.runs;
    if (o.seed) c.master_seed = *o.seed;
    if (!o.algorithms.empty()) {
        c.algorithms.clear();
        std::string_view rest = o.algorithms;
        while (!rest.empty()) {
            const auto comma = rest.find(',');
            const std::string name(rest.substr(0, comma));
            auto v = parse_variant(name);
            if (!v) throw ConfigError("unknown algorithm '" + name + "'");
            c.algorithms.push_back(*v);
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
    }
    c.validate();
    return c;
}

void print_steady_state(const AggregateResult& r, std::ostream& out) {
    for (const auto& sr : r.scenarios) {
        out << sr.scenario.label() << '\n';
        for (const auto& c : sr.curves) {
            out << fmt::format("  {:<14} steady-state MSE {:.4e} ({:.2f} dB)\n", to_string(c.variant),
                               c.steady_state_mse, 10.0 * std::log10(c.steady_state_mse));
        }
    }
}

void print_written(const std::vector<std::filesystem::path>& files, std::ostream& out) {
    for (const auto& f : files) out << "wrote " << f.string() << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Sparse variable step-size NLMS channel estimation experiments", "sparse_nlms"};
    app.require_subcommand(1);

    CommonOptions mse_opts, ber_opts, demo_opts, validate_opts;
    auto* mse = app.add_subcommand("mse-curves", "Average MSE vs iteration for every scenario");
    add_common(mse, mse_opts);
    auto* ber = app.add_subcommand("ber-sweep", "BER vs Es/N0 from the reference scenario");
    add_common(ber, ber_opts);
    auto* demo = app.add_subcommand("stepsize-demo", "Variable step size vs estimation error");
    add_common(demo, demo_opts);

    auto* validate = app.add_subcommand("validate-config", "Check a config and print it canonically");
    validate->add_option("--config", validate_opts.config_path, "Config file");
    bool as_json = false;
    validate->add_flag("--json", as_json, "Print the canonical JSON form");

    double lambda_max = 1.0, noise_power = 0.01, mu = 0.2;
    std::optional<std::size_t> taps;
    auto* theory = app.add_subcommand("theory-bounds", "Steady-state excess-MSE bound and limit");
    theory->add_option("--lambda-max", lambda_max, "Largest input covariance eigenvalue")->capture_default_str();
    theory->add_option("--noise-power", noise_power, "Noise power sigma_n^2")->capture_default_str();
    theory->add_option("--mu", mu, "Step size")->capture_default_str();
    theory->add_option("--taps", taps, "Also evaluate the trace form for R = lambda_max I of this size");

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        if (code == 0) return kExitOk;
        err << app.help();
        return kExitConfigError;
    }

    try {
        if (*mse) {
            const ExperimentConfig c = resolve_config(mse_opts);
            RunOptions ro;
            ro.threads = mse_opts.threads;
            const AggregateResult r = run_experiment(c, ro);
            print_steady_state(r, out);
            print_written(emit_results(r, c, mse_opts.out_dir, "mse-curves"), out);
        } else if (*ber) {
            ExperimentConfig c = resolve_config(ber_opts);
            c.sparsity_list = {c.ber_reference_sparsity};
            c.snr_db_list = {c.ber_reference_snr_db};
            c.validate();
            RunOptions ro;
            ro.threads = ber_opts.threads;
            const AggregateResult r = run_experiment(c, ro);
            print_steady_state(r, out);
            print_written(emit_results(r, c, ber_opts.out_dir, "ber-sweep"), out);
        } else if (*demo) {
            const ExperimentConfig c = resolve_config(demo_opts);
            const AggregateResult r = run_stepsize_demo(c);
            out << fmt::format("{} iterations, final step {}\n", r.step_trace.size(),
                               r.step_trace.empty() ? 0.0 : r.step_trace.back().step);
            print_written(emit_results(r, c, demo_opts.out_dir, "stepsize-demo"), out);
        } else if (*validate) {
            const ExperimentConfig c = validate_opts.config_path.empty()
                                           ? ExperimentConfig{}
                                           : load_config_file(validate_opts.config_path);
            c.validate();
            const std::string text = to_config_text(c);
            out << "# config OK, hash " << git_blob_hash(text) << '\n';
            out << (as_json ? to_config_json(c) : text);
        } else if (*theory) {
            TheoryInputs in;
            in.lambda_max = lambda_max;
            in.noise_power = noise_power;
            in.step = mu;
            if (taps) {
                if (*taps == 0) throw ConfigError("--taps must be >= 1");
                const auto n = static_cast<Eigen::Index>(*taps);
                in.covariance = lambda_max * Eigen::MatrixXd::Identity(n, n);
            }
            const SteadyStateMse ss = steady_state_mse_nlms(in);
            out << fmt::format("lower_bound = {}\n", ss.lower_bound);
            out << fmt::format("limit = {}\n", steady_state_mse_limit(lambda_max, noise_power));
            if (ss.trace_form) out << fmt::format("trace_form = {}\n", *ss.trace_form);
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntimeError;
    }
    return kExitOk;
}

}  // namespace sparse_nlms::cli
