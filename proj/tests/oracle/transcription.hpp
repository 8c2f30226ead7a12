// Straight-line transcription of the six estimator update rules, written
// without any library code so it can serve as an independent reference.
#ifndef SPARSE_NLMS_TESTS_ORACLE_TRANSCRIPTION_HPP
#define SPARSE_NLMS_TESTS_ORACLE_TRANSCRIPTION_HPP

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace oracle {

struct Params {
    std::string name;  // "ISS-NLMS", ..., "VSS-RZA-NLMS"
    double mu = 0.2;
    double mu_max = 2.0;
    double rho_za = 0.0;
    double rho_rza = 0.0;
    double eps_rza = 20.0;
    double beta = 0.99;
    double c = 1e-5;
    bool unnormalized_eq3 = false;
};

struct Iterate {
    std::vector<double> h;
    std::vector<double> p;
    double mu = 0.0;
    double e = 0.0;
};

inline double sgn(double v) {
    if (v > 0) return 1.0;
    if (v < 0) return -1.0;
    return 0.0;
}

// xs[n], ys[n] are the training pairs; returns the state after each update.
inline std::vector<Iterate> run(const Params& P, const std::vector<std::vector<double>>& xs,
                                const std::vector<double>& ys) {
    const std::size_t N = xs.at(0).size();
    std::vector<double> h(N, 0.0), p(N, 0.0);
    double mu_n = 0.0;
    std::vector<Iterate> out;

    const bool vss = P.name.rfind("VSS", 0) == 0;
    const bool za = P.name == "ISS-ZA-NLMS" || P.name == "VSS-ZA-NLMS";
    const bool rza = P.name == "ISS-RZA-NLMS" || P.name == "VSS-RZA-NLMS";

    for (std::size_t n = 0; n < xs.size(); ++n) {
        const std::vector<double>& x = xs[n];
        double xx = 0.0, hx = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            xx += x[i] * x[i];
            hx += h[i] * x[i];
        }
        const double e = ys[n] - hx;

        std::vector<double> h_next(N);
        if (xx < 1e-12) {
            out.push_back({h, p, mu_n, e});
            continue;
        }
        double step;
        if (vss) {
            double pp = 0.0;
            for (std::size_t i = 0; i < N; ++i) {
                p[i] = P.beta * p[i] + (1.0 - P.beta) * x[i] * e / xx;
                pp += p[i] * p[i];
            }
            step = P.mu_max * pp / (pp + P.c);
        } else {
            step = P.mu;
        }
        mu_n = step;

        for (std::size_t i = 0; i < N; ++i) {
            double grad;
            if (P.name == "ISS-RZA-NLMS" && P.unnormalized_eq3) {
                grad = step * e * x[i];
            } else {
                grad = step * e * x[i] / xx;
            }
            double pen = 0.0;
            if (za) pen = P.rho_za * sgn(h[i]);
            if (rza) pen = P.rho_rza * sgn(h[i]) / (1.0 + P.eps_rza * std::fabs(h[i]));
            h_next[i] = h[i] + grad - pen;
        }
        h = h_next;
        out.push_back({h, p, mu_n, e});
    }
    return out;
}

}  // namespace oracle

#endif  // SPARSE_NLMS_TESTS_ORACLE_TRANSCRIPTION_HPP
