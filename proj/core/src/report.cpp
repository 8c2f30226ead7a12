#include "sparse_nlms/report.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <system_error>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "sparse_nlms/config.hpp"
#include "sparse_nlms/errors.hpp"
#include "sparse_nlms/svg_plot.hpp"

namespace sparse_nlms {

namespace {

std::string num(double v) { return fmt::format("{}", v); }

double to_db(double v) { return 10.0 * std::log10(v); }

void write_file(const std::filesystem::path& path, const std::string& content,
                std::vector<std::filesystem::path>& written) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << content;
    out.close();
    if (!out) throw IoError("failed writing '" + path.string() + "'");
    written.push_back(path);
}

std::string scenario_stem(const Scenario& s) {
    return fmt::format("mse_K{}_snr{}", s.sparsity, num(s.snr_db));
}

}  // namespace

std::string git_blob_hash(std::string_view content) {
    const std::string header = fmt::format("blob {}", content.size());
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr);
    EVP_DigestUpdate(ctx, header.data(), header.size() + 1);  // includes the NUL
    EVP_DigestUpdate(ctx, content.data(), content.size());
    EVP_DigestFinal_ex(ctx, md, &len);
    EVP_MD_CTX_free(ctx);
    std::string hex;
    for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
    return hex;
}

std::string mse_curves_csv(const AggregateResult& result) {
    std::string out = "iteration,algorithm,mean_mse_db,mean_mse,sparsity,snr_db\n";
    for (const auto& sr : result.scenarios) {
        for (const auto& c : sr.curves) {
            for (std::size_t i = 0; i < c.mean_mse.size(); ++i) {
                out += fmt::format("{},{},{},{},{},{}\n", i + 1, to_string(c.variant),
                                   num(to_db(c.mean_mse[i])), num(c.mean_mse[i]),
                                   sr.scenario.sparsity, num(sr.scenario.snr_db));
            }
        }
    }
    return out;
}

std::string steady_state_csv(const AggregateResult& result) {
    std::string out =
        "sparsity,snr_db,algorithm,steady_state_mse,steady_state_mse_db,mean_iterations\n";
    for (const auto& sr : result.scenarios) {
        for (const auto& c : sr.curves) {
            out += fmt::format("{},{},{},{},{},{}\n", sr.scenario.sparsity, num(sr.scenario.snr_db),
                               to_string(c.variant), num(c.steady_state_mse),
                               num(to_db(c.steady_state_mse)), num(c.mean_trace_length));
        }
    }
    return out;
}

std::string ber_curves_csv(const AggregateResult& result) {
    std::string out = "es_n0_db,modulation,algorithm,ber\n";
    for (const auto& p : result.ber) {
        out += fmt::format("{},{},{},{}\n", num(p.es_n0_db), p.modulation, to_string(p.variant),
                           num(p.ber));
    }
    return out;
}

std::string stepsize_trace_csv(const AggregateResult& result) {
    std::string out = "iteration,error,step\n";
    for (const auto& p : result.step_trace) {
        out += fmt::format("{},{},{}\n", p.iteration, num(p.error), num(p.step));
    }
    return out;
}

std::string run_manifest(const AggregateResult& result, const ExperimentConfig& config,
                         std::string_view command) {
    const std::string echo = to_config_text(config);
    std::string out = "# sparse_nlms run manifest\n";
    out += fmt::format("command = {}\n", command);
    out += fmt::format("config_hash = {}\n", git_blob_hash(echo));
    out += fmt::format("master_seed = {}\n", config.master_seed);
    out += "\n[config]\n" + echo;
    out += "\n[seeds]\n";
    for (const auto& sr : result.scenarios) {
        out += fmt::format("{} =", scenario_stem(sr.scenario));
        for (std::size_t t = 0; t < config.runs; ++t) {
            out += fmt::format(" {:016x}", trial_seed(config.master_seed, sr.scenario, t));
        }
        out += "\n";
    }
    return out;
}

std::vector<std::filesystem::path> emit_results(const AggregateResult& result,
                                                const ExperimentConfig& config,
                                                const std::filesystem::path& out_dir,
                                                std::string_view command) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create '" + out_dir.string() + "': " + ec.message());

    std::vector<std::filesystem::path> written;
    write_file(out_dir / "mse_curves.csv", mse_curves_csv(result), written);
    write_file(out_dir / "steady_state.csv", steady_state_csv(result), written);
    write_file(out_dir / "ber_curves.csv", ber_curves_csv(result), written);
    write_file(out_dir / "stepsize_trace.csv", stepsize_trace_csv(result), written);
    write_file(out_dir / "manifest.txt", run_manifest(result, config, command), written);

    for (const auto& sr : result.scenarios) {
        PlotSpec plot;
        plot.title = fmt::format("Average MSE, N={} {}", config.n_taps, sr.scenario.label());
        plot.x_label = "iteration";
        plot.y_label = "average MSE (dB)";
        for (const auto& c : sr.curves) {
            PlotSeries s;
            s.label = std::string(to_string(c.variant));
            s.dashed = step_policy(c.variant) == StepPolicy::Fixed;
            for (std::size_t i = 0; i < c.mean_mse.size(); ++i) {
                s.x.push_back(static_cast<double>(i + 1));
                s.y.push_back(to_db(c.mean_mse[i]));
            }
            plot.series.push_back(std::move(s));
        }
        write_file(out_dir / (scenario_stem(sr.scenario) + ".svg"), render_svg(plot), written);
    }

    if (!result.ber.empty()) {
        for (auto kind : {ModulationKind::Psk, ModulationKind::Qam}) {
            // Series keyed by (modulation, algorithm) in first-seen order.
            std::vector<PlotSeries> series;
            std::map<std::string, std::size_t> index;
            for (const auto& p : result.ber) {
                if (parse_modulation(p.modulation).kind != kind) continue;
                const std::string key = p.modulation + " " + std::string(to_string(p.variant));
                auto [it, fresh] = index.try_emplace(key, series.size());
                if (fresh) {
                    series.push_back({});
                    series.back().label = key;
                    series.back().dashed = step_policy(p.variant) == StepPolicy::Fixed;
                }
                series[it->second].x.push_back(p.es_n0_db);
                series[it->second].y.push_back(std::log10(p.ber));
            }
            if (series.empty()) continue;
            PlotSpec plot;
            const bool psk = kind == ModulationKind::Psk;
            plot.title = psk ? "Average BER, PSK" : "Average BER, QAM";
            plot.x_label = "Es/N0 (dB)";
            plot.y_label = "log10 BER";
            plot.width = 860;
            plot.right_margin = 290;
            plot.series = std::move(series);
            write_file(out_dir / (psk ? "ber_psk.svg" : "ber_qam.svg"), render_svg(plot), written);
        }
    }

    if (!result.step_trace.empty()) {
        PlotSpec plot;
        plot.title = "Step size vs. estimation error";
        plot.x_label = "|e(n)|";
        plot.y_label = "step size";
        PlotSeries vss;
        vss.label = "variable step";
        vss.markers_only = true;
        double emax = 0.0;
        for (const auto& p : result.step_trace) {
            vss.x.push_back(std::abs(p.error));
            vss.y.push_back(p.step);
            emax = std::max(emax, std::abs(p.error));
        }
        plot.series.push_back(std::move(vss));
        for (double mu : result.reference_steps) {
            plot.series.push_back({fmt::format("fixed step {}", num(mu)), {0.0, emax}, {mu, mu}, true});
        }
        plot.max_points = 5000;
        write_file(out_dir / "stepsize.svg", render_svg(plot), written);
    }
    return written;
}

}  // namespace sparse_nlms
