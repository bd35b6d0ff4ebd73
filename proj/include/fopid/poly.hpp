#ifndef FOPID_POLY_HPP
#define FOPID_POLY_HPP

#include <complex>
#include <stdexcept>
#include <vector>

namespace fopid::poly {

// Polynomials are coefficient vectors in ascending powers of s:
// p[0] + p[1]*s + p[2]*s^2 + ...

using Coeffs = std::vector<double>;

inline int degree(const Coeffs& p) {
    for (int i = static_cast<int>(p.size()) - 1; i >= 0; --i) {
        if (p[static_cast<std::size_t>(i)] != 0.0) return i;
    }
    return -1;  // zero polynomial
}

// Drop trailing (highest-order) zero coefficients; keeps at least one entry.
inline Coeffs trimmed(Coeffs p) {
    while (p.size() > 1 && p.back() == 0.0) p.pop_back();
    return p;
}

inline Coeffs multiply(const Coeffs& a, const Coeffs& b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("poly::multiply: empty polynomial");
    Coeffs out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

inline Coeffs add(const Coeffs& a, const Coeffs& b) {
    Coeffs out(std::max(a.size(), b.size()), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) out[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) out[i] += b[i];
    return out;
}

inline Coeffs scale(Coeffs p, double k) {
    for (double& c : p) c *= k;
    return p;
}

// Horner evaluation at a complex point, highest power first.
inline std::complex<double> eval(const Coeffs& p, std::complex<double> s) {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t i = p.size(); i-- > 0;) acc = acc * s + p[i];
    return acc;
}

}  // namespace fopid::poly

#endif  // FOPID_POLY_HPP
