#ifndef FOPID_CONTROLLER_HPP
#define FOPID_CONTROLLER_HPP

#include <cmath>
#include <stdexcept>

#include "json.hpp"

#include "fopid/frac_ops.hpp"
#include "fopid/linear_system.hpp"
#include "fopid/transfer_function.hpp"

namespace fopid {

struct PidParams {
    double kp = 0.0;
    double ki = 0.0;
    double kd = 0.0;

    void validate() const {
        if (!(kp >= 0.0 && ki >= 0.0 && kd >= 0.0) || !std::isfinite(kp + ki + kd))
            throw std::invalid_argument("PidParams: gains must be finite and nonnegative");
    }
};

struct FopidParams {
    double kp = 0.0;
    double ki = 0.0;
    double kd = 0.0;
    double lambda = 1.0;  // integral order
    double mu = 1.0;      // derivative order

    void validate() const {
        if (!(kp >= 0.0 && ki >= 0.0 && kd >= 0.0) || !std::isfinite(kp + ki + kd))
            throw std::invalid_argument("FopidParams: gains must be finite and nonnegative");
        if (!(lambda >= 0.1 && lambda <= 1.5) || !(mu >= 0.1 && mu <= 1.5))
            throw std::invalid_argument("FopidParams: orders must lie in [0.1, 1.5]");
    }

    PidParams gains() const { return PidParams{kp, ki, kd}; }
};

inline nlohmann::json to_json(const PidParams& p) {
    return nlohmann::json{{"kp", p.kp}, {"ki", p.ki}, {"kd", p.kd}};
}

inline nlohmann::json to_json(const FopidParams& p) {
    return nlohmann::json{{"kp", p.kp}, {"ki", p.ki}, {"kd", p.kd}, {"lambda", p.lambda}, {"mu", p.mu}};
}

inline PidParams pid_from_json(const nlohmann::json& j) {
    PidParams p{j.at("kp").get<double>(), j.at("ki").get<double>(), j.at("kd").get<double>()};
    p.validate();
    return p;
}

inline FopidParams fopid_from_json(const nlohmann::json& j) {
    FopidParams p{j.at("kp").get<double>(), j.at("ki").get<double>(), j.at("kd").get<double>(),
                  j.at("lambda").get<double>(), j.at("mu").get<double>()};
    p.validate();
    return p;
}

// --- Rational realizations (Eq.-level contract: one combined tf) ----------

/// PID: kp + ki/s + kd*s/(Tf*s + 1). The first-order derivative filter keeps
/// the realization proper; deriv_tf is chosen step-safe by the simulator
/// (100*h by default), far above the loop bandwidth.
inline RationalTf realize_controller(const PidParams& p, double deriv_tf) {
    p.validate();
    if (!(deriv_tf > 0.0)) throw std::invalid_argument("realize_controller: deriv_tf must be positive");
    RationalTf c({p.kp}, {1.0});
    c = parallel(c, RationalTf({p.ki}, {0.0, 1.0}));
    c = parallel(c, RationalTf({0.0, p.kd}, {1.0, deriv_tf}));
    return c;
}

/// FOPID: kp + ki * (1/s) * band(1-lambda) + kd * band(mu).
/// The integral branch cascades an exact 1/s with band(1-lambda) so true
/// integral action survives the band limiting. If the derivative branch comes
/// out improper (mu at an integer), the same first-order filter as the PID
/// realization is applied to it.
inline RationalTf realize_controller(const FopidParams& p, const BandApproxConfig& band, double deriv_tf) {
    p.validate();
    if (!(deriv_tf > 0.0)) throw std::invalid_argument("realize_controller: deriv_tf must be positive");
    RationalTf integ = series(RationalTf({1.0}, {0.0, 1.0}), band_approx(1.0 - p.lambda, band));
    RationalTf deriv = band_approx(p.mu, band);
    if (!deriv.proper()) deriv = series(deriv, RationalTf({1.0}, {1.0, deriv_tf}));
    RationalTf c({p.kp}, {1.0});
    c = parallel(c, scaled(integ, p.ki));
    c = parallel(c, scaled(deriv, p.kd));
    return c;
}

// --- Simulation-ready block realizations -----------------------------------

/// The same parallel structure kept as separate canonical sections. This is
/// what the simulator integrates; the combined polynomial above is for
/// inspection, serialization, and frequency-domain checks.
inline LinearSystem controller_blocks(const PidParams& p, double deriv_tf) {
    p.validate();
    LinearSystem sys;
    sys.direct = p.kp;
    sys.chains.push_back({p.ki, {CanonSection::from_tf(RationalTf({1.0}, {0.0, 1.0}))}});
    sys.chains.push_back({p.kd, {CanonSection::from_tf(RationalTf({0.0, 1.0}, {1.0, deriv_tf}))}});
    return sys;
}

/// force_fractional skips the integer-order shortcut so the state dimension
/// stays fixed across parameter updates; the scheduler relies on this to keep
/// controller states persistent through gain/order switches.
inline LinearSystem controller_blocks(const FopidParams& p, const BandApproxConfig& band, double deriv_tf,
                                      bool force_fractional = false) {
    p.validate();
    auto branch = [&](double alpha) {
        return force_fractional ? detail::band_approx_fractional(alpha, band) : band_approx(alpha, band);
    };
    LinearSystem sys;
    sys.direct = p.kp;

    LinearSystem::Chain integ{p.ki, {CanonSection::from_tf(RationalTf({1.0}, {0.0, 1.0}))}};
    RationalTf itail = branch(1.0 - p.lambda);
    if (itail.den_degree() > 0 || itail.num != std::vector<double>{1.0})
        integ.sections.push_back(CanonSection::from_tf(itail));
    sys.chains.push_back(std::move(integ));

    RationalTf dtail = branch(p.mu);
    LinearSystem::Chain deriv{p.kd, {}};
    if (!dtail.proper()) dtail = series(dtail, RationalTf({1.0}, {1.0, deriv_tf}));
    deriv.sections.push_back(CanonSection::from_tf(dtail));
    sys.chains.push_back(std::move(deriv));
    return sys;
}

}  // namespace fopid

#endif  // FOPID_CONTROLLER_HPP
