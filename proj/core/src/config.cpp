#include "sparse_nlms/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "json.hpp"
#include "sparse_nlms/errors.hpp"

namespace sparse_nlms {

namespace {

using Tokens = std::vector<std::string>;
using Setter = std::function<void(ExperimentConfig&, const Tokens&)>;

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

Tokens split_list(std::string_view s) {
    Tokens out;
    s = trim(s);
    if (s.empty()) return out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(',', start);
        out.emplace_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

double to_double(const std::string& tok) {
    std::string_view s = tok;
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
        throw ConfigError("expected a number, got '" + tok + "'");
    }
    return v;
}

std::uint64_t to_uint(const std::string& tok) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size() || tok.empty()) {
        throw ConfigError("expected a non-negative integer, got '" + tok + "'");
    }
    return v;
}

bool to_bool(const std::string& tok) {
    if (tok == "true" || tok == "1" || tok == "yes") return true;
    if (tok == "false" || tok == "0" || tok == "no") return false;
    throw ConfigError("expected true/false, got '" + tok + "'");
}

const std::string& single(const Tokens& t) {
    if (t.size() != 1) throw ConfigError("expected a single value, got " + std::to_string(t.size()));
    return t.front();
}

template <class T, class F>
std::vector<T> map_tokens(const Tokens& t, F f) {
    if (t.empty()) throw ConfigError("expected a non-empty list");
    std::vector<T> out;
    out.reserve(t.size());
    for (const auto& s : t) out.push_back(f(s));
    return out;
}

Variant to_variant(const std::string& s) {
    auto v = parse_variant(s);
    if (!v) throw ConfigError("unknown algorithm '" + s + "'");
    return *v;
}

Setter real(double ExperimentConfig::*field) {
    return [field](ExperimentConfig& c, const Tokens& t) { c.*field = to_double(single(t)); };
}

const std::vector<std::pair<std::string, Setter>>& setters() {
    static const std::vector<std::pair<std::string, Setter>> table = {
        {"n_taps", [](ExperimentConfig& c, const Tokens& t) { c.n_taps = to_uint(single(t)); }},
        {"sparsity_list",
         [](ExperimentConfig& c, const Tokens& t) {
             c.sparsity_list = map_tokens<std::size_t>(t, [](const std::string& s) {
                 return static_cast<std::size_t>(to_uint(s));
             });
         }},
        {"snr_db_list",
         [](ExperimentConfig& c, const Tokens& t) { c.snr_db_list = map_tokens<double>(t, to_double); }},
        {"runs", [](ExperimentConfig& c, const Tokens& t) { c.runs = to_uint(single(t)); }},
        {"algorithms",
         [](ExperimentConfig& c, const Tokens& t) { c.algorithms = map_tokens<Variant>(t, to_variant); }},
        {"stop.delta_tolerance",
         [](ExperimentConfig& c, const Tokens& t) { c.stop.delta_tolerance = to_double(single(t)); }},
        {"stop.max_iterations",
         [](ExperimentConfig& c, const Tokens& t) { c.stop.max_iterations = to_uint(single(t)); }},
        {"stop.apply_tolerance",
         [](ExperimentConfig& c, const Tokens& t) { c.stop.tolerance_enabled = to_bool(single(t)); }},
        {"mu", real(&ExperimentConfig::mu)},
        {"mu_max", real(&ExperimentConfig::mu_max)},
        {"rho_za_scale", real(&ExperimentConfig::rho_za_scale)},
        {"rho_rza_scale", real(&ExperimentConfig::rho_rza_scale)},
        {"eps_rza", real(&ExperimentConfig::eps_rza)},
        {"beta", real(&ExperimentConfig::beta)},
        {"signal_power", real(&ExperimentConfig::signal_power)},
        {"unnormalized_iss_rza",
         [](ExperimentConfig& c, const Tokens& t) { c.unnormalized_iss_rza = to_bool(single(t)); }},
        {"validation",
         [](ExperimentConfig& c, const Tokens& t) {
             const auto& s = single(t);
             if (s == "inclusive") c.validation = ValidationLevel::Inclusive;
             else if (s == "strict") c.validation = ValidationLevel::Strict;
             else throw ConfigError("validation must be 'inclusive' or 'strict', got '" + s + "'");
         }},
        {"es_n0_db.min", real(&ExperimentConfig::es_n0_min_db)},
        {"es_n0_db.max", real(&ExperimentConfig::es_n0_max_db)},
        {"es_n0_db.step", real(&ExperimentConfig::es_n0_step_db)},
        {"modulations",
         [](ExperimentConfig& c, const Tokens& t) {
             c.modulations = map_tokens<ModulationScheme>(
                 t, [](const std::string& s) { return parse_modulation(s); });
         }},
        {"ber_reference.snr_db", real(&ExperimentConfig::ber_reference_snr_db)},
        {"ber_reference.sparsity",
         [](ExperimentConfig& c, const Tokens& t) { c.ber_reference_sparsity = to_uint(single(t)); }},
        {"steady_state_fraction", real(&ExperimentConfig::steady_state_fraction)},
        {"master_seed", [](ExperimentConfig& c, const Tokens& t) { c.master_seed = to_uint(single(t)); }},
    };
    return table;
}

constexpr std::string_view kThresholdPrefix = "threshold_c_by_snr.";

// Applies one key; `explicit_thresholds` tracks whether the file supplied
// its own C table, which then replaces the default table.
void apply(ExperimentConfig& c, const std::string& key, const Tokens& value,
           bool& explicit_thresholds) {
    if (key.starts_with(kThresholdPrefix)) {
        if (!explicit_thresholds) {
            c.threshold_c_by_snr.clear();
            explicit_thresholds = true;
        }
        const double snr = to_double(key.substr(kThresholdPrefix.size()));
        c.threshold_c_by_snr[snr] = to_double(single(value));
        return;
    }
    const auto& table = setters();
    auto it = std::find_if(table.begin(), table.end(),
                           [&key](const auto& e) { return e.first == key; });
    if (it == table.end()) throw ConfigError("unknown config key '" + key + "'");
    it->second(c, value);
}

std::string num(double v) { return fmt::format("{}", v); }

std::string join(const std::vector<std::string>& parts) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += ", ";
        out += parts[i];
    }
    return out;
}

// Ordered (key, value-tokens) view of a config: the single source for both
// renderings.
std::vector<std::pair<std::string, Tokens>> flatten(const ExperimentConfig& c) {
    std::vector<std::pair<std::string, Tokens>> out;
    auto scalar = [&out](std::string k, std::string v) { out.push_back({std::move(k), {std::move(v)}}); };

    scalar("n_taps", std::to_string(c.n_taps));
    Tokens ks;
    for (auto k : c.sparsity_list) ks.push_back(std::to_string(k));
    out.push_back({"sparsity_list", ks});
    Tokens snrs;
    for (double s : c.snr_db_list) snrs.push_back(num(s));
    out.push_back({"snr_db_list", snrs});
    scalar("runs", std::to_string(c.runs));
    Tokens algs;
    for (Variant v : c.algorithms) algs.emplace_back(to_string(v));
    out.push_back({"algorithms", algs});
    scalar("stop.delta_tolerance", num(c.stop.delta_tolerance));
    scalar("stop.max_iterations", std::to_string(c.stop.max_iterations));
    scalar("stop.apply_tolerance", c.stop.tolerance_enabled ? "true" : "false");
    for (auto [snr, cval] : c.threshold_c_by_snr) {
        scalar(std::string(kThresholdPrefix) + num(snr), num(cval));
    }
    scalar("mu", num(c.mu));
    scalar("mu_max", num(c.mu_max));
    scalar("rho_za_scale", num(c.rho_za_scale));
    scalar("rho_rza_scale", num(c.rho_rza_scale));
    scalar("eps_rza", num(c.eps_rza));
    scalar("beta", num(c.beta));
    scalar("signal_power", num(c.signal_power));
    scalar("unnormalized_iss_rza", c.unnormalized_iss_rza ? "true" : "false");
    scalar("validation", c.validation == ValidationLevel::Strict ? "strict" : "inclusive");
    scalar("es_n0_db.min", num(c.es_n0_min_db));
    scalar("es_n0_db.max", num(c.es_n0_max_db));
    scalar("es_n0_db.step", num(c.es_n0_step_db));
    Tokens mods;
    for (const auto& m : c.modulations) mods.push_back(m.name());
    out.push_back({"modulations", mods});
    scalar("ber_reference.snr_db", num(c.ber_reference_snr_db));
    scalar("ber_reference.sparsity", std::to_string(c.ber_reference_sparsity));
    scalar("steady_state_fraction", num(c.steady_state_fraction));
    scalar("master_seed", std::to_string(c.master_seed));
    return out;
}

bool is_list_key(const std::string& key) {
    return key == "sparsity_list" || key == "snr_db_list" || key == "algorithms" ||
           key == "modulations";
}

std::string json_scalar(const nlohmann::json& j, const std::string& key) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_boolean()) return j.get<bool>() ? "true" : "false";
    if (j.is_number_unsigned()) return std::to_string(j.get<std::uint64_t>());
    if (j.is_number_integer()) return std::to_string(j.get<std::int64_t>());
    if (j.is_number_float()) return num(j.get<double>());
    throw ConfigError("unsupported JSON value for '" + key + "'");
}

void flatten_json(const nlohmann::json& j, const std::string& prefix,
                  std::vector<std::pair<std::string, Tokens>>& out) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
        const auto& v = it.value();
        if (v.is_object()) {
            flatten_json(v, key, out);
        } else if (v.is_array()) {
            Tokens t;
            for (const auto& e : v) t.push_back(json_scalar(e, key));
            out.push_back({key, t});
        } else {
            out.push_back({key, {json_scalar(v, key)}});
        }
    }
}

nlohmann::ordered_json json_value(const std::string& tok) {
    if (tok == "true") return true;
    if (tok == "false") return false;
    std::uint64_t u = 0;
    if (auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), u);
        ec == std::errc{} && p == tok.data() + tok.size()) {
        return u;
    }
    double d = 0.0;
    if (auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), d);
        ec == std::errc{} && p == tok.data() + tok.size() && std::isfinite(d)) {
        return d;
    }
    return tok;
}

}  // namespace

ExperimentConfig parse_config_text(std::string_view text) {
    ExperimentConfig c;
    bool explicit_thresholds = false;
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view s = line;
        if (auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
        s = trim(s);
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(fmt::format("line {}: expected 'key = value'", line_no));
        }
        const std::string key(trim(s.substr(0, eq)));
        try {
            apply(c, key, split_list(s.substr(eq + 1)), explicit_thresholds);
        } catch (const ConfigError& e) {
            throw ConfigError(fmt::format("line {} ({}): {}", line_no, key, e.what()));
        }
    }
    return c;
}

ExperimentConfig parse_config_json(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("JSON config must be an object");
    std::vector<std::pair<std::string, Tokens>> entries;
    flatten_json(doc, "", entries);

    ExperimentConfig c;
    bool explicit_thresholds = false;
    for (const auto& [key, value] : entries) {
        try {
            apply(c, key, value, explicit_thresholds);
        } catch (const ConfigError& e) {
            throw ConfigError(fmt::format("{}: {}", key, e.what()));
        }
    }
    return c;
}

ExperimentConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();

    const auto first = text.find_first_not_of(" \t\r\n");
    const bool json = path.extension() == ".json" || (first != std::string::npos && text[first] == '{');
    ExperimentConfig c;
    try {
        c = json ? parse_config_json(text) : parse_config_text(text);
        c.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return c;
}

std::string to_config_text(const ExperimentConfig& config) {
    std::string out;
    for (const auto& [key, value] : flatten(config)) {
        out += key + " = " + join(value) + "\n";
    }
    return out;
}

std::string to_config_json(const ExperimentConfig& config) {
    nlohmann::ordered_json doc = nlohmann::ordered_json::object();
    for (const auto& [key, value] : flatten(config)) {
        nlohmann::ordered_json* node = &doc;
        std::string_view rest = key;
        // threshold_c_by_snr keys may contain dots ("2.5"); split only once.
        const bool threshold = key.starts_with(kThresholdPrefix);
        for (;;) {
            const auto dot = rest.find('.');
            if (dot == std::string_view::npos) break;
            node = &(*node)[std::string(rest.substr(0, dot))];
            rest.remove_prefix(dot + 1);
            if (threshold) break;
        }
        if (is_list_key(key)) {
            auto arr = nlohmann::ordered_json::array();
            for (const auto& t : value) arr.push_back(json_value(t));
            (*node)[std::string(rest)] = arr;
        } else {
            (*node)[std::string(rest)] = json_value(value.front());
        }
    }
    return doc.dump(2) + "\n";
}

}  // namespace sparse_nlms
