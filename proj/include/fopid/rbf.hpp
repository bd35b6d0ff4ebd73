#ifndef FOPID_RBF_HPP
#define FOPID_RBF_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "fopid/reduction.hpp"
#include "fopid/tuning.hpp"

namespace fopid {

/// Per-dimension affine standardization applied before distance computation.
/// The Gaussian spread sigma = 1 is only meaningful once K, L and the time
/// constants live on comparable scales.
struct Normalizer {
    std::vector<double> mean;
    std::vector<double> scale;

    static Normalizer fit(const std::vector<std::vector<double>>& rows) {
        if (rows.empty()) throw std::invalid_argument("Normalizer: no data");
        const std::size_t dim = rows.front().size();
        Normalizer nz;
        nz.mean.assign(dim, 0.0);
        nz.scale.assign(dim, 0.0);
        for (const auto& r : rows)
            for (std::size_t i = 0; i < dim; ++i) nz.mean[i] += r[i];
        for (double& m : nz.mean) m /= static_cast<double>(rows.size());
        for (const auto& r : rows)
            for (std::size_t i = 0; i < dim; ++i) {
                const double d = r[i] - nz.mean[i];
                nz.scale[i] += d * d;
            }
        for (double& s : nz.scale) {
            s = std::sqrt(s / static_cast<double>(rows.size()));
            if (s <= 0.0) s = 1.0;  // constant dimension
        }
        return nz;
    }

    std::vector<double> apply(const std::vector<double>& x) const {
        if (x.size() != mean.size()) throw std::invalid_argument("Normalizer: dimension mismatch");
        std::vector<double> out(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - mean[i]) / scale[i];
        return out;
    }
};

/// Gaussian RBF interpolator: one hidden neuron per stored center, linear
/// output layer with bias.
struct RbfNetwork {
    std::vector<std::vector<double>> centers;  // M x N, raw input units
    double sigma = 1.0;
    std::vector<std::vector<double>> weights;  // M x J
    std::vector<double> bias;                  // J
    Normalizer normalizer;
    std::vector<std::string> outputs;  // output component names
    double training_mse = 0.0;         // residual on the training set

    std::size_t input_dim() const { return centers.empty() ? 0 : centers.front().size(); }
    std::size_t output_dim() const { return bias.size(); }
};

inline std::vector<double> rbf_predict(const RbfNetwork& net, const std::vector<double>& x) {
    if (x.size() != net.input_dim()) throw std::invalid_argument("rbf_predict: input dimension mismatch");
    const std::vector<double> xn = net.normalizer.apply(x);
    std::vector<double> y = net.bias;
    for (std::size_t i = 0; i < net.centers.size(); ++i) {
        const std::vector<double> cn = net.normalizer.apply(net.centers[i]);
        double d2 = 0.0;
        for (std::size_t k = 0; k < xn.size(); ++k) {
            const double d = xn[k] - cn[k];
            d2 += d * d;
        }
        const double phi = std::exp(-d2 / (2.0 * net.sigma * net.sigma));
        for (std::size_t j = 0; j < y.size(); ++j) y[j] += net.weights[i][j] * phi;
    }
    return y;
}

struct TuningDataset {
    std::vector<std::vector<double>> inputs;   // rows of {K, L, tau1, tau2}
    std::vector<std::vector<double>> targets;  // controller parameter vectors
    std::string controller_type;               // "pid" | "fopid"

    void validate() const {
        if (inputs.size() != targets.size()) throw std::invalid_argument("TuningDataset: row count mismatch");
        if (inputs.empty()) throw std::invalid_argument("TuningDataset: empty dataset");
        for (const auto& t : targets)
            if (t.size() != targets.front().size())
                throw std::invalid_argument("TuningDataset: inconsistent target dimension");
        for (const auto& x : inputs)
            if (x.size() != inputs.front().size())
                throw std::invalid_argument("TuningDataset: inconsistent input dimension");
        for (std::size_t a = 0; a < inputs.size(); ++a)
            for (std::size_t b = a + 1; b < inputs.size(); ++b)
                if (inputs[a] == inputs[b]) throw std::invalid_argument("TuningDataset: duplicate inputs");
    }
};

inline std::vector<std::string> controller_output_names(const std::string& controller_type) {
    if (controller_type == "pid") return {"kp", "ki", "kd"};
    if (controller_type == "fopid") return {"kp", "ki", "kd", "lambda", "mu"};
    throw std::invalid_argument("unknown controller type '" + controller_type + "'");
}

inline TuningDataset dataset_from_records(const std::vector<TuningRecord>& records) {
    if (records.empty()) throw std::invalid_argument("dataset_from_records: no records");
    TuningDataset data;
    data.controller_type = records.front().controller_type;
    for (const auto& rec : records) {
        if (rec.controller_type != data.controller_type)
            throw std::invalid_argument("dataset_from_records: mixed controller types");
        data.inputs.push_back({rec.soptd.K, rec.soptd.L, rec.soptd.tau1, rec.soptd.tau2});
        std::vector<double> tgt;
        for (const auto& name : controller_output_names(data.controller_type))
            tgt.push_back(rec.params.at(name).get<double>());
        data.targets.push_back(std::move(tgt));
    }
    data.validate();
    return data;
}

namespace detail {

/// Gaussian elimination with partial pivoting; solves A X = B in place for
/// multiple right-hand sides. A is n x n row-major, B is n x m.
inline void solve_dense(std::vector<double>& a, std::vector<double>& b, std::size_t n, std::size_t m) {
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
        if (a[piv * n + col] == 0.0) throw std::runtime_error("rbf_train: singular normal equations");
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a[piv * n + j], a[col * n + j]);
            for (std::size_t j = 0; j < m; ++j) std::swap(b[piv * m + j], b[col * m + j]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r * n + col] / a[col * n + col];
            if (f == 0.0) continue;
            for (std::size_t j = col; j < n; ++j) a[r * n + j] -= f * a[col * n + j];
            for (std::size_t j = 0; j < m; ++j) b[r * m + j] -= f * b[col * m + j];
        }
    }
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t j = i + 1; j < n; ++j)
            for (std::size_t k = 0; k < m; ++k) b[i * m + k] -= a[i * n + j] * b[j * m + k];
        for (std::size_t k = 0; k < m; ++k) b[i * m + k] /= a[i * n + i];
    }
}

}  // namespace detail

/// Exact-interpolation training: centers = training inputs, output layer
/// solved from the interpolation system on the hidden-activation (kernel)
/// matrix augmented with a constant column; the zero-sum side constraint on
/// the weights makes the bias well-defined. Solved plain first — the Gaussian
/// kernel matrix is positive definite for distinct inputs, and a direct LU
/// solve keeps the residual at machine level even when inputs nearly
/// coincide (a ridge term that large directions can absorb would instead bias
/// the fit there). Ridge 1e-8 on the kernel diagonal is kept as a conditioning
/// rescue if the plain solve breaks down. Targets are standardized for the
/// solve and the affine map is folded back into the returned weights.
inline RbfNetwork rbf_train(const TuningDataset& data, double sigma = 1.0) {
    data.validate();
    if (!(sigma > 0.0)) throw std::invalid_argument("rbf_train: sigma must be positive");
    const std::size_t m_rows = data.inputs.size();
    const std::size_t j_out = data.targets.front().size();
    const std::size_t n = m_rows + 1;  // weights + bias
    constexpr double kRidge = 1e-8;

    RbfNetwork net;
    net.centers = data.inputs;
    net.sigma = sigma;
    net.normalizer = Normalizer::fit(data.inputs);
    net.outputs = controller_output_names(data.controller_type);
    if (net.outputs.size() != j_out) throw std::invalid_argument("rbf_train: target dimension mismatch");

    const Normalizer target_nz = Normalizer::fit(data.targets);

    std::vector<std::vector<double>> xn(m_rows);
    for (std::size_t i = 0; i < m_rows; ++i) xn[i] = net.normalizer.apply(data.inputs[i]);

    // [ Phi  1 ] [w]   [T]
    // [ 1^T  0 ] [b] = [0]
    const auto assemble = [&](double ridge, std::vector<double>& sys, std::vector<double>& rhs) {
        sys.assign(n * n, 0.0);
        rhs.assign(n * j_out, 0.0);
        for (std::size_t r = 0; r < m_rows; ++r) {
            for (std::size_t i = 0; i < m_rows; ++i) {
                double d2 = 0.0;
                for (std::size_t k = 0; k < xn[r].size(); ++k) {
                    const double d = xn[r][k] - xn[i][k];
                    d2 += d * d;
                }
                sys[r * n + i] = std::exp(-d2 / (2.0 * sigma * sigma));
            }
            sys[r * n + r] += ridge;
            sys[r * n + m_rows] = 1.0;
            sys[m_rows * n + r] = 1.0;
            const std::vector<double> tn = target_nz.apply(data.targets[r]);
            for (std::size_t j = 0; j < j_out; ++j) rhs[r * j_out + j] = tn[j];
        }
    };

    std::vector<double> sys, rhs;
    assemble(0.0, sys, rhs);
    bool solved = false;
    try {
        detail::solve_dense(sys, rhs, n, j_out);
        solved = std::all_of(rhs.begin(), rhs.end(), [](double v) { return std::isfinite(v); });
    } catch (const std::runtime_error&) {
    }
    if (!solved) {
        assemble(kRidge, sys, rhs);
        detail::solve_dense(sys, rhs, n, j_out);  // beyond rescue -> throws
    }

    // Fold the target standardization back into the output layer.
    net.weights.assign(m_rows, std::vector<double>(j_out));
    net.bias.assign(j_out, 0.0);
    for (std::size_t j = 0; j < j_out; ++j) {
        for (std::size_t i = 0; i < m_rows; ++i) net.weights[i][j] = target_nz.scale[j] * rhs[i * j_out + j];
        net.bias[j] = target_nz.mean[j] + target_nz.scale[j] * rhs[m_rows * j_out + j];
    }

    double mse = 0.0;
    for (std::size_t r = 0; r < m_rows; ++r) {
        const std::vector<double> pred = rbf_predict(net, data.inputs[r]);
        for (std::size_t j = 0; j < j_out; ++j) {
            const double e = pred[j] - data.targets[r][j];
            mse += e * e;
        }
    }
    net.training_mse = mse / static_cast<double>(m_rows * j_out);
    return net;
}

/// Mean squared prediction error in raw target units.
inline double rbf_mse(const RbfNetwork& net, const TuningDataset& data) {
    data.validate();
    if (data.targets.front().size() != net.output_dim()) throw std::invalid_argument("rbf_mse: dimension mismatch");
    double mse = 0.0;
    for (std::size_t r = 0; r < data.inputs.size(); ++r) {
        const std::vector<double> pred = rbf_predict(net, data.inputs[r]);
        for (std::size_t j = 0; j < net.output_dim(); ++j) {
            const double e = pred[j] - data.targets[r][j];
            mse += e * e;
        }
    }
    return mse / static_cast<double>(data.inputs.size() * net.output_dim());
}

/// Same, with each output component standardized by the dataset's own spread
/// so components on different scales weigh equally.
inline double rbf_mse_normalized(const RbfNetwork& net, const TuningDataset& data) {
    data.validate();
    const Normalizer target_nz = Normalizer::fit(data.targets);
    double mse = 0.0;
    for (std::size_t r = 0; r < data.inputs.size(); ++r) {
        const std::vector<double> pred = rbf_predict(net, data.inputs[r]);
        for (std::size_t j = 0; j < net.output_dim(); ++j) {
            const double e = (pred[j] - data.targets[r][j]) / target_nz.scale[j];
            mse += e * e;
        }
    }
    return mse / static_cast<double>(data.inputs.size() * net.output_dim());
}

inline nlohmann::json to_json(const RbfNetwork& net) {
    return nlohmann::json{{"centers", net.centers},
                          {"sigma", net.sigma},
                          {"weights", net.weights},
                          {"bias", net.bias},
                          {"normalizer", {{"mean", net.normalizer.mean}, {"scale", net.normalizer.scale}}},
                          {"outputs", net.outputs}};
}

inline RbfNetwork rbf_from_json(const nlohmann::json& j) {
    RbfNetwork net;
    net.centers = j.at("centers").get<std::vector<std::vector<double>>>();
    net.sigma = j.at("sigma").get<double>();
    net.weights = j.at("weights").get<std::vector<std::vector<double>>>();
    net.bias = j.at("bias").get<std::vector<double>>();
    net.normalizer.mean = j.at("normalizer").at("mean").get<std::vector<double>>();
    net.normalizer.scale = j.at("normalizer").at("scale").get<std::vector<double>>();
    net.outputs = j.at("outputs").get<std::vector<std::string>>();
    return net;
}

}  // namespace fopid

#endif  // FOPID_RBF_HPP
