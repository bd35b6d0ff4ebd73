#include "doctest.h"

#include <cmath>

#include "fopid/frac_ops.hpp"
#include "fopid/reduction.hpp"
#include "fopid/simulation.hpp"

using namespace fopid;

namespace {

double mag_db(const RationalTf& tf, double w) { return 20.0 * std::log10(std::abs(tf.at(w))); }

double phase_deg(const RationalTf& tf, double w) { return std::arg(tf.at(w)) * 180.0 / M_PI; }

double midband_slope_db_per_decade(const RationalTf& tf, double wlo, double whi) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (double w : log_grid(wlo, whi, 60)) {
        const double x = std::log10(w);
        const double y = mag_db(tf, w);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST_CASE("band_approx integer bypass") {
    const BandApproxConfig cfg;
    const auto id = band_approx(0.0, cfg);
    CHECK(id.num == std::vector<double>{1.0});
    CHECK(id.den == std::vector<double>{1.0});

    const auto diff = band_approx(1.0, cfg);
    CHECK(diff.num == std::vector<double>{0.0, 1.0});
    CHECK(diff.den == std::vector<double>{1.0});

    const auto integ = band_approx(-1.0, cfg);
    CHECK(integ.num == std::vector<double>{1.0});
    CHECK(integ.den == std::vector<double>{0.0, 1.0});

    CHECK_THROWS_AS(band_approx(2.5, cfg), std::domain_error);
}

TEST_CASE("band_approx(0.5) hits the half-differentiator point at w=1") {
    const BandApproxConfig cfg;  // [1e-2, 1e2], N=5
    const auto h = band_approx(0.5, cfg);
    CHECK(std::abs(mag_db(h, 1.0)) <= 1.0);
    CHECK(std::abs(phase_deg(h, 1.0) - 45.0) <= 3.0);
    CHECK(h.den.size() == 12);  // 2N+1 poles
}

TEST_CASE("band_approx mid-band slope is 20*alpha dB/decade") {
    const BandApproxConfig cfg;
    for (double alpha : {0.3, 0.5, -0.5, 0.9}) {
        const double slope = midband_slope_db_per_decade(band_approx(alpha, cfg), 0.1, 10.0);
        CHECK(std::abs(slope - 20.0 * alpha) <= 1.0);
    }
}

TEST_CASE("band_approx(alpha) cascaded with band_approx(-alpha) is flat in the interior band") {
    const BandApproxConfig cfg;
    const auto fwd = band_approx(0.6, cfg);
    const auto inv = band_approx(-0.6, cfg);
    const auto both = series(fwd, inv);
    for (double w : log_grid(10.0 * cfg.omega_low, cfg.omega_high / 10.0, 40))
        CHECK(std::abs(mag_db(both, w)) <= 0.5);
}

TEST_CASE("band_approx poles lie strictly in the left half-plane") {
    const BandApproxConfig cfg;
    for (double alpha : {0.5, -0.7, 1.3}) CHECK(is_stable(band_approx(alpha, cfg)));
}

TEST_CASE("gl_derivative identity at alpha=0") {
    const std::vector<double> x{0.0, 1.5, -2.0, 0.25};
    const auto y = gl_derivative(x, 0.0, {0.1, 100});
    CHECK(y == x);
}

TEST_CASE("gl_derivative alpha=1 approximates the first derivative of t") {
    const double h = 1e-3;
    std::vector<double> x;
    for (int k = 0; k <= 2000; ++k) x.push_back(k * h);
    const auto y = gl_derivative(x, 1.0, {h, 1u << 20});
    for (int k = 10; k <= 2000; k += 100) CHECK(y[static_cast<std::size_t>(k)] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("gl half-derivative of t matches 2*sqrt(t/pi)") {
    const double h = 1e-3;
    std::vector<double> x;
    for (int k = 0; k <= 5000; ++k) x.push_back(k * h);
    const auto y = gl_derivative(x, 0.5, {h, 1u << 20});
    for (int k = 500; k <= 5000; k += 250) {
        const double t = k * h;
        const double exact = 2.0 * std::sqrt(t / M_PI);
        CHECK(std::abs(y[static_cast<std::size_t>(k)] - exact) / exact <= 0.01);
    }
}

TEST_CASE("gl_derivative rejects out-of-range orders") {
    CHECK_THROWS_AS(gl_derivative({1.0}, 2.5, {0.1, 10}), std::domain_error);
    CHECK_THROWS_AS(gl_derivative({1.0}, 0.5, {0.0, 10}), std::invalid_argument);
}

TEST_CASE("GL and band-limited realizations of s^-0.5 agree on a step") {
    // Step response of the half-integrator by both routes, compared after the
    // initial transient on a 20 s horizon. The band must enclose the horizon's
    // frequency content (default [1e-2, 1e2] leaves ~6% error at t = 20 s),
    // and the step must resolve the band's fastest pole for RK4 stability.
    const double h = 0.001;
    const std::size_t n = static_cast<std::size_t>(20.0 / h);

    std::vector<double> ones(n + 1, 1.0);
    const auto gl = gl_derivative(ones, -0.5, {h, 1u << 26});

    // band route: exact 1/s cascaded with band(+0.5), stepped by the simulator
    SimConfig sim;
    sim.step_h = h;
    sim.horizon_t = 20.0;
    sim.band = BandApproxConfig{1e-3, 1e3, 8};
    const auto tf = series(RationalTf({1.0}, {0.0, 1.0}), band_approx(0.5, sim.band));
    const auto tr = step_response(tf, sim);
    REQUIRE_FALSE(tr.diverged);

    std::size_t compared = 0;
    for (std::size_t k = 0; k < tr.size(); k += 200) {
        if (tr.t[k] < 1.0) continue;
        ++compared;
        CHECK(std::abs(tr.y[k] - gl[k]) / std::abs(gl[k]) <= 0.02);
    }
    CHECK(compared > 50);
}
