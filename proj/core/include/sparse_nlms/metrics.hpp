#ifndef SPARSE_NLMS_METRICS_HPP
#define SPARSE_NLMS_METRICS_HPP

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace sparse_nlms {

/// |truth - estimate|^2 for a single run.
double average_mse(std::span<const double> truth, std::span<const double> estimate);

/// Inputs to the steady-state excess-MSE expressions for plain NLMS.
struct TheoryInputs {
    double lambda_max = 1.0;   // largest eigenvalue of the input covariance R
    double noise_power = 0.0;  // sigma_n^2
    double step = 0.2;         // mu
    std::optional<Eigen::MatrixXd> covariance;  // R, for the trace form

    /// Throws DomainError if lambda_max or noise_power is negative, or if
    /// covariance is not symmetric PSD with largest eigenvalue lambda_max.
    void validate() const;
};

struct SteadyStateMse {
    std::optional<double> trace_form;  // present iff covariance was supplied
    double lower_bound = 0.0;          // lambda_max sigma^2 / (2 - 3 mu lambda_max)
};

/// tr[R (I - mu R)^-1] sigma^2 / (2 - tr[...]) and its closed-form lower
/// bound. Throws SingularityError if I - mu R is singular and RegimeError
/// if either denominator is not positive.
SteadyStateMse steady_state_mse_nlms(const TheoryInputs& inputs);

/// tr[R (I - mu R)^-1] alone.
double resolvent_trace(const Eigen::MatrixXd& covariance, double step);

/// The mu -> 0 limit lambda_max sigma^2 / 2.
double steady_state_mse_limit(double lambda_max, double noise_power);

/// Effective post-estimation SNR rho (1 - mse) / (rho mse + 1), rho the
/// linear received SNR. Throws DomainError unless mse is in [0, 1].
double effective_snr(double snr_db, double mse);

/// Curve-fitting coefficients of the exponential BER approximation.
struct BerConstants {
    double a1 = 0.3017;
    double a2 = 0.438;
    double b = 1.0510;
};

enum class ModulationKind { Psk, Qam };

struct ModulationScheme {
    ModulationKind kind = ModulationKind::Psk;
    int levels = 8;

    /// Throws DomainError: PSK needs M >= 4, QAM a perfect square >= 4.
    void validate() const;
    /// (sqrt(M) - 1) / sqrt(M).
    double k_factor() const;
    /// "8PSK", "16QAM", ...
    std::string name() const;

    friend bool operator==(const ModulationScheme&, const ModulationScheme&) = default;
};

/// Parses "8PSK" / "64qam" style names; throws ConfigError.
ModulationScheme parse_modulation(std::string_view name);

double psk_ber_raw(double gamma_s, int levels, const BerConstants& c = {});
double qam_ber_raw(double gamma_s, int levels, const BerConstants& c = {});

/// Clamped to [0, 1].
double psk_ber(double gamma_s, int levels, const BerConstants& c = {});
double qam_ber(double gamma_s, int levels, const BerConstants& c = {});

double ber(const ModulationScheme& scheme, double gamma_s, const BerConstants& c = {});

}  // namespace sparse_nlms

#endif  // SPARSE_NLMS_METRICS_HPP
