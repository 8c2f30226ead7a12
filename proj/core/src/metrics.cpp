#include "sparse_nlms/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <string>

#include "sparse_nlms/errors.hpp"

namespace sparse_nlms {

namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kLambdaMatchTol = 1e-9;

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

void require_gamma(double gamma_s) {
    if (!(gamma_s >= 0.0)) throw DomainError("gamma_s must be >= 0");
}

bool is_perfect_square(int m, int& root) {
    if (m < 0) return false;
    root = static_cast<int>(std::lround(std::sqrt(static_cast<double>(m))));
    return root * root == m;
}

}  // namespace

double average_mse(std::span<const double> truth, std::span<const double> estimate) {
    if (truth.size() != estimate.size()) {
        throw DimensionError("average_mse: length " + std::to_string(truth.size()) +
                             " vs " + std::to_string(estimate.size()));
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const double d = truth[i] - estimate[i];
        acc += d * d;
    }
    return acc;
}

void TheoryInputs::validate() const {
    if (!(lambda_max >= 0.0)) throw DomainError("lambda_max must be >= 0");
    if (!(noise_power >= 0.0)) throw DomainError("noise_power must be >= 0");
    if (!std::isfinite(step)) throw DomainError("step must be finite");
    if (!covariance) return;

    const Eigen::MatrixXd& r = *covariance;
    if (r.rows() != r.cols() || r.rows() == 0) {
        throw DimensionError("covariance must be a non-empty square matrix");
    }
    const double scale = std::max(1.0, r.cwiseAbs().maxCoeff());
    if ((r - r.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol * scale) {
        throw DomainError("covariance is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(r, Eigen::EigenvaluesOnly);
    const auto& ev = eig.eigenvalues();
    if (ev.minCoeff() < -kSymmetryTol * scale) {
        throw DomainError("covariance is not positive semidefinite");
    }
    if (std::abs(ev.maxCoeff() - lambda_max) > kLambdaMatchTol) {
        throw DomainError("lambda_max does not match the largest covariance eigenvalue");
    }
}

double resolvent_trace(const Eigen::MatrixXd& covariance, double step) {
    const auto n = covariance.rows();
    const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - step * covariance;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (!lu.isInvertible()) throw SingularityError("I - mu R is singular");
    return lu.solve(covariance).trace();
}

SteadyStateMse steady_state_mse_nlms(const TheoryInputs& inputs) {
    inputs.validate();
    SteadyStateMse out;

    const double bound_den = 2.0 - 3.0 * inputs.step * inputs.lambda_max;
    if (!(bound_den > 0.0)) {
        throw RegimeError("2 - 3 mu lambda_max must be positive for the lower bound");
    }
    out.lower_bound = inputs.lambda_max * inputs.noise_power / bound_den;

    if (inputs.covariance) {
        const double tr = resolvent_trace(*inputs.covariance, inputs.step);
        if (!(2.0 - tr > 0.0)) {
            throw RegimeError("2 - tr[R (I - mu R)^-1] must be positive, trace is " +
                              std::to_string(tr));
        }
        out.trace_form = tr * inputs.noise_power / (2.0 - tr);
    }
    return out;
}

double steady_state_mse_limit(double lambda_max, double noise_power) {
    return lambda_max * noise_power / 2.0;
}

double effective_snr(double snr_db, double mse) {
    if (!std::isfinite(snr_db)) throw DomainError("snr_db must be finite");
    if (!(mse >= 0.0 && mse <= 1.0)) {
        throw DomainError("mse must lie in [0, 1], got " + std::to_string(mse));
    }
    const double rho = std::pow(10.0, snr_db / 10.0);
    return rho * (1.0 - mse) / (rho * mse + 1.0);
}

void ModulationScheme::validate() const {
    if (kind == ModulationKind::Psk) {
        if (levels < 4) throw DomainError("PSK needs M >= 4");
        return;
    }
    int root = 0;
    if (levels < 4 || !is_perfect_square(levels, root)) {
        throw DomainError("QAM needs M a perfect square >= 4, got " + std::to_string(levels));
    }
}

double ModulationScheme::k_factor() const {
    const double s = std::sqrt(static_cast<double>(levels));
    return (s - 1.0) / s;
}

std::string ModulationScheme::name() const {
    return std::to_string(levels) + (kind == ModulationKind::Psk ? "PSK" : "QAM");
}

ModulationScheme parse_modulation(std::string_view name) {
    std::string upper(name);
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    ModulationScheme m;
    std::string_view rest = upper;
    if (rest.ends_with("PSK")) {
        m.kind = ModulationKind::Psk;
    } else if (rest.ends_with("QAM")) {
        m.kind = ModulationKind::Qam;
    } else {
        throw ConfigError("unknown modulation '" + std::string(name) + "'");
    }
    rest.remove_suffix(3);
    auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), m.levels);
    if (ec != std::errc{} || ptr != rest.data() + rest.size() || rest.empty()) {
        throw ConfigError("bad modulation order in '" + std::string(name) + "'");
    }
    try {
        m.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    return m;
}

double psk_ber_raw(double gamma_s, int levels, const BerConstants& c) {
    ModulationScheme{ModulationKind::Psk, levels}.validate();
    require_gamma(gamma_s);
    const double s = std::sin(std::numbers::pi / levels);
    const double arg = c.b * gamma_s * s * s;
    return c.a1 * std::exp(-arg) + c.a2 * std::exp(-2.0 * arg);
}

double qam_ber_raw(double gamma_s, int levels, const BerConstants& c) {
    const ModulationScheme m{ModulationKind::Qam, levels};
    m.validate();
    require_gamma(gamma_s);
    const double k = m.k_factor();
    const double u = c.b * gamma_s / (levels - 1);
    return 2.0 * k * c.a1 * std::exp(-1.5 * u) +
           (2.0 * k * c.a2 - k * k * c.a1 * c.a1) * std::exp(-3.0 * u) -
           k * k * c.a2 * c.a2 * std::exp(-6.0 * u) -
           2.0 * k * k * c.a1 * c.a2 * std::exp(-4.5 * u);
}

double psk_ber(double gamma_s, int levels, const BerConstants& c) {
    return clamp01(psk_ber_raw(gamma_s, levels, c));
}

double qam_ber(double gamma_s, int levels, const BerConstants& c) {
    return clamp01(qam_ber_raw(gamma_s, levels, c));
}

double ber(const ModulationScheme& scheme, double gamma_s, const BerConstants& c) {
    return scheme.kind == ModulationKind::Psk ? psk_ber(gamma_s, scheme.levels, c)
                                              : qam_ber(gamma_s, scheme.levels, c);
}

}  // namespace sparse_nlms
