#ifndef FOPID_TRANSFER_FUNCTION_HPP
#define FOPID_TRANSFER_FUNCTION_HPP

#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "json.hpp"

#include "fopid/poly.hpp"

namespace fopid {

/// Continuous-time SISO rational transfer function with output dead time:
///   G(s) = num(s)/den(s) * exp(-delay_s * s)
/// Coefficients are stored in ascending powers of s, so num[0]/den[0] is the
/// dc gain. Most of the library works with proper functions; impropriety is
/// tolerated here (an exact differentiator is a legitimate factor) and
/// rejected where a state-space realization is required.
struct RationalTf {
    std::vector<double> num;
    std::vector<double> den;
    double delay_s = 0.0;

    RationalTf() : num{1.0}, den{1.0} {}

    RationalTf(std::vector<double> numerator, std::vector<double> denominator, double delay = 0.0)
        : num(poly::trimmed(std::move(numerator))), den(poly::trimmed(std::move(denominator))), delay_s(delay) {
        if (poly::degree(den) < 0) throw std::invalid_argument("RationalTf: denominator is the zero polynomial");
        if (delay_s < 0.0) throw std::invalid_argument("RationalTf: negative dead time");
        for (double c : num)
            if (!std::isfinite(c)) throw std::invalid_argument("RationalTf: non-finite numerator coefficient");
        for (double c : den)
            if (!std::isfinite(c)) throw std::invalid_argument("RationalTf: non-finite denominator coefficient");
    }

    int num_degree() const { return poly::degree(num); }
    int den_degree() const { return poly::degree(den); }
    bool proper() const { return num_degree() <= den_degree(); }
    bool strictly_proper() const { return num_degree() < den_degree(); }

    double dc_gain() const {
        if (den[0] == 0.0) throw std::domain_error("RationalTf: pole at s=0, dc gain undefined");
        return num[0] / den[0];
    }

    /// Frequency response at a single angular frequency (rad/s).
    std::complex<double> at(double omega) const {
        const std::complex<double> jw{0.0, omega};
        const std::complex<double> d = poly::eval(den, jw);
        if (std::abs(d) == 0.0) {
            std::ostringstream msg;
            msg << "RationalTf: pole on the imaginary axis at omega=" << omega;
            throw std::domain_error(msg.str());
        }
        std::complex<double> v = poly::eval(num, jw) / d;
        if (delay_s > 0.0) v *= std::exp(std::complex<double>{0.0, -omega * delay_s});
        return v;
    }
};

inline std::vector<std::complex<double>> freq_response(const RationalTf& tf, const std::vector<double>& omega) {
    std::vector<std::complex<double>> out;
    out.reserve(omega.size());
    for (double w : omega) {
        if (w < 0.0) throw std::invalid_argument("freq_response: negative frequency");
        out.push_back(tf.at(w));
    }
    return out;
}

/// Series connection; dead times add.
inline RationalTf series(const RationalTf& a, const RationalTf& b) {
    return RationalTf(poly::multiply(a.num, b.num), poly::multiply(a.den, b.den), a.delay_s + b.delay_s);
}

/// Parallel sum over a common denominator. Only defined for equal dead times
/// (the delay cannot be factored out of a sum otherwise).
inline RationalTf parallel(const RationalTf& a, const RationalTf& b) {
    if (a.delay_s != b.delay_s) throw std::invalid_argument("parallel: mismatched dead times");
    auto n = poly::add(poly::multiply(a.num, b.den), poly::multiply(b.num, a.den));
    return RationalTf(std::move(n), poly::multiply(a.den, b.den), a.delay_s);
}

inline RationalTf scaled(const RationalTf& a, double k) {
    return RationalTf(poly::scale(a.num, k), a.den, a.delay_s);
}

/// Routh-Hurwitz test: true iff all denominator roots lie in the open left
/// half-plane. Degree-0 denominators count as stable.
inline bool is_stable(const RationalTf& tf) {
    std::vector<double> p = poly::trimmed(tf.den);
    const int n = poly::degree(p);
    if (n <= 0) return true;
    if (p[static_cast<std::size_t>(n)] < 0.0)
        for (double& c : p) c = -c;
    // Necessary condition: all coefficients strictly positive.
    for (int i = 0; i <= n; ++i)
        if (p[static_cast<std::size_t>(i)] <= 0.0) return false;
    // Routh array, rows stored highest-power-first.
    std::vector<double> row0, row1;
    for (int i = n; i >= 0; i -= 2) row0.push_back(p[static_cast<std::size_t>(i)]);
    for (int i = n - 1; i >= 0; i -= 2) row1.push_back(p[static_cast<std::size_t>(i)]);
    row1.resize(row0.size(), 0.0);
    for (int r = 2; r <= n; ++r) {
        if (row1[0] == 0.0) return false;  // zero first column: not strictly Hurwitz
        std::vector<double> next(row0.size(), 0.0);
        for (std::size_t i = 0; i + 1 < row0.size(); ++i)
            next[i] = (row1[0] * row0[i + 1] - row0[0] * row1[i + 1]) / row1[0];
        row0 = row1;
        row1 = next;
        if (row1[0] <= 0.0) return false;
    }
    return true;
}

inline nlohmann::json to_json(const RationalTf& tf) {
    return nlohmann::json{{"num", tf.num}, {"den", tf.den}, {"delay_s", tf.delay_s}};
}

inline RationalTf tf_from_json(const nlohmann::json& j) {
    return RationalTf(j.at("num").get<std::vector<double>>(), j.at("den").get<std::vector<double>>(),
                      j.at("delay_s").get<double>());
}

}  // namespace fopid

#endif  // FOPID_TRANSFER_FUNCTION_HPP
