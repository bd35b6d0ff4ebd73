#ifndef FOPID_STATE_SPACE_HPP
#define FOPID_STATE_SPACE_HPP

#include <complex>
#include <stdexcept>
#include <vector>

#include "fopid/transfer_function.hpp"

namespace fopid {

/// Dense SISO state-space realization with the dead time carried at the
/// output: y(t) = C x(t-0) delayed by delay_s against the input path.
struct StateSpace {
    std::size_t n = 0;
    std::vector<double> A;  // n*n, row-major
    std::vector<double> B;  // n
    std::vector<double> C;  // n
    double D = 0.0;
    double delay_s = 0.0;

    double a(std::size_t i, std::size_t j) const { return A[i * n + j]; }
};

/// Controllable canonical realization of a proper rational transfer function.
/// The denominator is normalized monic; any direct feedthrough is split off
/// into D before forming C.
inline StateSpace tf_to_state_space(const RationalTf& tf) {
    if (!tf.proper()) throw std::invalid_argument("tf_to_state_space: improper transfer function");
    const int n = tf.den_degree();
    const double lead = tf.den[static_cast<std::size_t>(n)];
    std::vector<double> den(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) den[static_cast<std::size_t>(i)] = tf.den[static_cast<std::size_t>(i)] / lead;
    std::vector<double> num(static_cast<std::size_t>(n) + 1, 0.0);
    for (std::size_t i = 0; i < tf.num.size(); ++i) num[i] = tf.num[i] / lead;

    StateSpace ss;
    ss.n = static_cast<std::size_t>(n);
    ss.delay_s = tf.delay_s;
    ss.D = num[static_cast<std::size_t>(n)];
    if (n == 0) return ss;  // memoryless gain

    ss.A.assign(ss.n * ss.n, 0.0);
    ss.B.assign(ss.n, 0.0);
    ss.C.assign(ss.n, 0.0);
    for (std::size_t i = 0; i + 1 < ss.n; ++i) ss.A[i * ss.n + i + 1] = 1.0;
    for (std::size_t j = 0; j < ss.n; ++j) ss.A[(ss.n - 1) * ss.n + j] = -den[j];
    ss.B[ss.n - 1] = 1.0;
    for (std::size_t j = 0; j < ss.n; ++j) ss.C[j] = num[j] - ss.D * den[j];
    return ss;
}

/// C (jwI - A)^{-1} B + D, times the dead-time factor. Gaussian elimination
/// with partial pivoting on the complex resolvent.
inline std::complex<double> ss_at(const StateSpace& ss, double omega) {
    using cd = std::complex<double>;
    const cd jw{0.0, omega};
    if (ss.n == 0) return cd{ss.D, 0.0} * std::exp(cd{0.0, -omega * ss.delay_s});
    const std::size_t n = ss.n;
    std::vector<cd> M(n * n);
    std::vector<cd> x(ss.B.begin(), ss.B.end());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) M[i * n + j] = (i == j ? jw : cd{0.0, 0.0}) - cd{ss.a(i, j), 0.0};
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(M[r * n + col]) > std::abs(M[piv * n + col])) piv = r;
        if (std::abs(M[piv * n + col]) == 0.0) throw std::domain_error("ss_at: singular resolvent (pole on grid)");
        if (piv != col) {
            for (std::size_t j = col; j < n; ++j) std::swap(M[piv * n + j], M[col * n + j]);
            std::swap(x[piv], x[col]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const cd f = M[r * n + col] / M[col * n + col];
            if (f == cd{0.0, 0.0}) continue;
            for (std::size_t j = col; j < n; ++j) M[r * n + j] -= f * M[col * n + j];
            x[r] -= f * x[col];
        }
    }
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t j = i + 1; j < n; ++j) x[i] -= M[i * n + j] * x[j];
        x[i] /= M[i * n + i];
    }
    cd y{ss.D, 0.0};
    for (std::size_t i = 0; i < n; ++i) y += ss.C[i] * x[i];
    return y * std::exp(cd{0.0, -omega * ss.delay_s});
}

}  // namespace fopid

#endif  // FOPID_STATE_SPACE_HPP
