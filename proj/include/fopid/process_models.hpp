#ifndef FOPID_PROCESS_MODELS_HPP
#define FOPID_PROCESS_MODELS_HPP

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "fopid/transfer_function.hpp"

namespace fopid {

/// The four benchmark process families:
///   P1: 1/(1+s)^n
///   P2: 1/((1+s)(1+a*s)(1+a^2*s)(1+a^3*s))
///   P3: 1/((1+s)(1+T*s)^2)
///   P4: (1-a*s)/(1+s)^3   (non-minimum phase)
enum class Family { P1, P2, P3, P4 };

inline std::string family_name(Family f) {
    switch (f) {
        case Family::P1: return "P1";
        case Family::P2: return "P2";
        case Family::P3: return "P3";
        case Family::P4: return "P4";
    }
    throw std::invalid_argument("family_name: bad enum");
}

inline Family family_from_name(const std::string& s) {
    if (s == "P1") return Family::P1;
    if (s == "P2") return Family::P2;
    if (s == "P3") return Family::P3;
    if (s == "P4") return Family::P4;
    throw std::invalid_argument("family_from_name: unknown family '" + s + "'");
}

struct ProcessSpec {
    Family family;
    double param;  // n for P1, alpha for P2/P4, T for P3

    std::string id() const {
        std::ostringstream os;
        os << family_name(family) << "_" << param;
        return os.str();
    }
};

/// The discrete parameter sets used to build the benchmark datasets.
inline const std::vector<double>& family_param_set(Family f) {
    static const std::vector<double> p1{3, 4, 5, 6, 7, 8, 10, 20};
    static const std::vector<double> p2{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    static const std::vector<double> p3{0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 2, 5, 10};
    static const std::vector<double> p4{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1};
    switch (f) {
        case Family::P1: return p1;
        case Family::P2: return p2;
        case Family::P3: return p3;
        case Family::P4: return p4;
    }
    throw std::invalid_argument("family_param_set: bad enum");
}

inline std::vector<ProcessSpec> all_benchmark_specs() {
    std::vector<ProcessSpec> out;
    for (Family f : {Family::P1, Family::P2, Family::P3, Family::P4})
        for (double p : family_param_set(f)) out.push_back({f, p});
    return out;
}

/// Expanded polynomial form of the benchmark process. All four families have
/// unit dc gain and no dead time.
inline RationalTf build_process(const ProcessSpec& spec) {
    if (!(spec.param > 0.0)) throw std::domain_error("build_process: param must be positive");
    switch (spec.family) {
        case Family::P1: {
            const double n = spec.param;
            if (n != std::floor(n)) throw std::domain_error("build_process: P1 exponent must be an integer");
            if (n < 3) throw std::domain_error("build_process: P1 exponent must be >= 3");
            std::vector<double> den{1.0};
            for (int i = 0; i < static_cast<int>(n); ++i) den = poly::multiply(den, {1.0, 1.0});
            return RationalTf({1.0}, std::move(den));
        }
        case Family::P2: {
            const double a = spec.param;
            std::vector<double> den{1.0, 1.0};
            den = poly::multiply(den, {1.0, a});
            den = poly::multiply(den, {1.0, a * a});
            den = poly::multiply(den, {1.0, a * a * a});
            return RationalTf({1.0}, std::move(den));
        }
        case Family::P3: {
            const double T = spec.param;
            std::vector<double> den = poly::multiply({1.0, 1.0}, poly::multiply({1.0, T}, {1.0, T}));
            return RationalTf({1.0}, std::move(den));
        }
        case Family::P4: {
            const double a = spec.param;
            std::vector<double> den = poly::multiply({1.0, 1.0}, poly::multiply({1.0, 1.0}, {1.0, 1.0}));
            return RationalTf({1.0, -a}, std::move(den));
        }
    }
    throw std::invalid_argument("build_process: bad family enum");
}

/// Smallest lag time constant of the full (unreduced) process — the fixed-step
/// integrator must resolve 1/this, which matters for the stiff corners of the
/// benchmark set (P2 alpha^3 down to 1e-3, P3 T down to 5e-3).
inline double smallest_time_constant(const ProcessSpec& spec) {
    if (!(spec.param > 0.0)) throw std::domain_error("smallest_time_constant: param must be positive");
    switch (spec.family) {
        case Family::P1: return 1.0;
        case Family::P2: return std::min(1.0, spec.param * spec.param * spec.param);
        case Family::P3: return std::min(1.0, spec.param);
        case Family::P4: return 1.0;
    }
    throw std::invalid_argument("smallest_time_constant: bad family enum");
}

inline nlohmann::json to_json(const ProcessSpec& spec) {
    return nlohmann::json{{"family", family_name(spec.family)}, {"param", spec.param}};
}

inline ProcessSpec process_spec_from_json(const nlohmann::json& j) {
    return ProcessSpec{family_from_name(j.at("family").get<std::string>()), j.at("param").get<double>()};
}

}  // namespace fopid

#endif  // FOPID_PROCESS_MODELS_HPP
