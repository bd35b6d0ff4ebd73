#ifndef FOPID_FRAC_OPS_HPP
#define FOPID_FRAC_OPS_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include "json.hpp"

#include "fopid/transfer_function.hpp"

namespace fopid {

/// Band-limited recursive (Oustaloup-style) approximation settings for s^α.
/// The rational filter carries 2N+1 pole/zero pairs spread geometrically over
/// [omega_low, omega_high].
struct BandApproxConfig {
    double omega_low = 1e-2;
    double omega_high = 1e2;
    int order_n = 5;

    void validate() const {
        if (!(omega_low > 0.0 && omega_low < omega_high))
            throw std::invalid_argument("BandApproxConfig: need 0 < omega_low < omega_high");
        if (order_n < 1) throw std::invalid_argument("BandApproxConfig: order_n must be >= 1");
    }
};

inline nlohmann::json to_json(const BandApproxConfig& cfg) {
    return nlohmann::json{{"omega_low", cfg.omega_low}, {"omega_high", cfg.omega_high}, {"order_n", cfg.order_n}};
}

inline BandApproxConfig band_cfg_from_json(const nlohmann::json& j) {
    BandApproxConfig cfg;
    cfg.omega_low = j.at("omega_low").get<double>();
    cfg.omega_high = j.at("omega_high").get<double>();
    cfg.order_n = j.at("order_n").get<int>();
    cfg.validate();
    return cfg;
}

namespace detail {

/// The recursive filter itself, with no integer shortcut. Gain is normalized
/// so |H(j w_g)| = w_g^alpha at the geometric band center w_g.
inline RationalTf band_approx_fractional(double alpha, const BandApproxConfig& cfg) {
    const int N = cfg.order_n;
    const double ratio = cfg.omega_high / cfg.omega_low;
    const int count = 2 * N + 1;
    std::vector<double> num{1.0};
    std::vector<double> den{1.0};
    for (int k = -N; k <= N; ++k) {
        const double ez = (k + N + 0.5 * (1.0 - alpha)) / count;
        const double ep = (k + N + 0.5 * (1.0 + alpha)) / count;
        const double wz = cfg.omega_low * std::pow(ratio, ez);
        const double wp = cfg.omega_low * std::pow(ratio, ep);
        num = poly::multiply(num, {wz, 1.0});  // (s + wz)
        den = poly::multiply(den, {wp, 1.0});
    }
    RationalTf raw(std::move(num), std::move(den));
    const double wg = std::sqrt(cfg.omega_low * cfg.omega_high);
    const double gain = std::pow(wg, alpha) / std::abs(raw.at(wg));
    return scaled(raw, gain);
}

}  // namespace detail

/// Rational approximation of s^alpha over the configured band. Orders within
/// 1e-9 of an integer in {-2,...,2} return the exact integer-order transfer
/// function, which makes the lambda = mu = 1 FOPID -> PID reduction exact.
inline RationalTf band_approx(double alpha, const BandApproxConfig& cfg) {
    cfg.validate();
    if (std::abs(alpha) > 2.0) throw std::domain_error("band_approx: |alpha| must be <= 2");
    const double nearest = std::round(alpha);
    if (std::abs(alpha - nearest) <= 1e-9) {
        const int m = static_cast<int>(nearest);
        std::vector<double> s_pow(static_cast<std::size_t>(std::abs(m)) + 1, 0.0);
        s_pow.back() = 1.0;
        if (m >= 0) return RationalTf(s_pow, {1.0});
        return RationalTf({1.0}, s_pow);
    }
    return detail::band_approx_fractional(alpha, cfg);
}

/// Grünwald-Letnikov discretization settings.
struct GlConfig {
    double step_h;
    std::size_t memory_len;

    void validate() const {
        if (!(step_h > 0.0)) throw std::invalid_argument("GlConfig: step_h must be positive");
        if (memory_len < 1) throw std::invalid_argument("GlConfig: memory_len must be >= 1");
    }
};

/// GL fractional differ-integral of a uniformly sampled signal:
///   y[k] = h^{-alpha} * sum_{j=0}^{min(k, memory)} c_j x[k-j]
/// with c_0 = 1 and c_j = c_{j-1} (1 - (1+alpha)/j). Negative alpha gives the
/// fractional integral through the same recurrence.
inline std::vector<double> gl_derivative(const std::vector<double>& samples, double alpha, const GlConfig& cfg) {
    cfg.validate();
    if (std::abs(alpha) > 2.0) throw std::domain_error("gl_derivative: |alpha| must be <= 2");
    const std::size_t n = samples.size();
    const std::size_t mem = std::min(cfg.memory_len, n == 0 ? std::size_t{0} : n - 1);
    std::vector<double> coeff(mem + 1);
    coeff[0] = 1.0;
    for (std::size_t j = 1; j <= mem; ++j)
        coeff[j] = coeff[j - 1] * (1.0 - (1.0 + alpha) / static_cast<double>(j));
    const double scale = std::pow(cfg.step_h, -alpha);
    std::vector<double> out(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t jmax = std::min(k, mem);
        double acc = 0.0;
        for (std::size_t j = 0; j <= jmax; ++j) acc += coeff[j] * samples[k - j];
        out[k] = scale * acc;
    }
    return out;
}

}  // namespace fopid

#endif  // FOPID_FRAC_OPS_HPP
