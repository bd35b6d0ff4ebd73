#ifndef FOPID_LINEAR_SYSTEM_HPP
#define FOPID_LINEAR_SYSTEM_HPP

#include <span>
#include <stdexcept>
#include <vector>

#include "fopid/state_space.hpp"
#include "fopid/transfer_function.hpp"

namespace fopid {

/// One controllable-canonical SISO section. Keeping simulation blocks in
/// companion form makes the derivative evaluation O(n) per section instead
/// of O(n^2) for a dense A, which is what makes GA tuning affordable.
struct CanonSection {
    std::vector<double> a;  // monic denominator, low coefficients a0..a_{n-1}
    std::vector<double> c;  // n output weights
    double d = 0.0;

    std::size_t order() const { return a.size(); }

    static CanonSection from_tf(const RationalTf& tf) {
        StateSpace ss = tf_to_state_space(tf);  // also rejects improper tfs
        CanonSection s;
        s.d = ss.D;
        s.c = ss.C;
        s.a.resize(ss.n);
        for (std::size_t j = 0; j < ss.n; ++j) s.a[j] = -ss.A[(ss.n - 1) * ss.n + j];
        return s;
    }

    double output(std::span<const double> x, double u) const {
        double y = d * u;
        for (std::size_t i = 0; i < c.size(); ++i) y += c[i] * x[i];
        return y;
    }

    void deriv(std::span<const double> x, double u, std::span<double> dx) const {
        const std::size_t n = a.size();
        if (n == 0) return;
        for (std::size_t i = 0; i + 1 < n; ++i) dx[i] = x[i + 1];
        double top = u;
        for (std::size_t i = 0; i < n; ++i) top -= a[i] * x[i];
        dx[n - 1] = top;
    }
};

/// Parallel sum of cascade chains plus a direct gain:
///   y = direct*u + sum_k gain_k * (section_m ∘ ... ∘ section_1)(u)
/// This composition realizes the parallel PID/FOPID structure without ever
/// forming the (badly scaled) combined polynomial.
struct LinearSystem {
    struct Chain {
        double gain = 1.0;
        std::vector<CanonSection> sections;
    };

    std::vector<Chain> chains;
    double direct = 0.0;

    std::size_t order() const {
        std::size_t n = 0;
        for (const auto& ch : chains)
            for (const auto& s : ch.sections) n += s.order();
        return n;
    }

    double feedthrough() const {
        double d = direct;
        for (const auto& ch : chains) {
            double p = ch.gain;
            for (const auto& s : ch.sections) p *= s.d;
            d += p;
        }
        return d;
    }

    static LinearSystem from_tf(const RationalTf& tf) {
        LinearSystem sys;
        sys.chains.push_back({1.0, {CanonSection::from_tf(tf)}});
        return sys;
    }

    double output(std::span<const double> x, double u) const {
        double y = direct * u;
        std::size_t off = 0;
        for (const auto& ch : chains) {
            double v = u;
            for (const auto& s : ch.sections) {
                v = s.output(x.subspan(off, s.order()), v);
                off += s.order();
            }
            y += ch.gain * v;
        }
        return y;
    }

    /// Output contribution from the state alone (input held at zero); with
    /// feedthrough() this splits y = output_state_part(x) + feedthrough()*u.
    double output_state_part(std::span<const double> x) const { return output(x, 0.0); }

    void deriv(std::span<const double> x, double u, std::span<double> dx) const {
        std::size_t off = 0;
        for (const auto& ch : chains) {
            double v = u;
            for (const auto& s : ch.sections) {
                auto xs = x.subspan(off, s.order());
                s.deriv(xs, v, dx.subspan(off, s.order()));
                v = s.output(xs, v);
                off += s.order();
            }
        }
    }
};

}  // namespace fopid

#endif  // FOPID_LINEAR_SYSTEM_HPP
