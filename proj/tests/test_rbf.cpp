#include "doctest.h"

#include <cmath>

#include "fopid/rbf.hpp"

using namespace fopid;

namespace {

TuningDataset grid_dataset() {
    // Smooth synthetic map over a 4-D grid slice: targets are smooth functions
    // of the inputs, mimicking the tuning surface.
    TuningDataset data;
    data.controller_type = "pid";
    for (double l : {0.2, 0.6, 1.0, 1.4})
        for (double t1 : {0.5, 1.5, 3.0}) {
            const double t2 = 0.4 * t1;
            data.inputs.push_back({1.0, l, t1, t2});
            data.targets.push_back({1.0 + 0.5 * std::sin(l) + 0.1 * t1,
                                    2.0 / (1.0 + l) + 0.05 * t2,
                                    0.3 * l * t1});
        }
    return data;
}

}  // namespace

TEST_CASE("Gaussian activation values at known distances") {
    RbfNetwork net;
    net.centers = {{0.0, 0.0}};
    net.sigma = 1.0;
    net.weights = {{1.0}};
    net.bias = {0.0};
    net.normalizer.mean = {0.0, 0.0};
    net.normalizer.scale = {1.0, 1.0};
    net.outputs = {"v"};

    CHECK(rbf_predict(net, {0.0, 0.0})[0] == doctest::Approx(1.0));  // phi = 1 at the center
    // distance sqrt(2)*sigma: phi = exp(-1)
    CHECK(rbf_predict(net, {1.0, 1.0})[0] == doctest::Approx(std::exp(-1.0)));
    CHECK(rbf_predict(net, {2.0, 0.0})[0] == doctest::Approx(std::exp(-2.0)));
}

TEST_CASE("two-center network hand-computed prediction") {
    RbfNetwork net;
    net.centers = {{0.0}, {2.0}};
    net.sigma = 1.0;
    net.weights = {{1.0, 0.5}, {-1.0, 0.25}};
    net.bias = {0.5, 0.0};
    net.normalizer.mean = {0.0};
    net.normalizer.scale = {1.0};
    net.outputs = {"a", "b"};
    const auto y = rbf_predict(net, {1.0});
    const double phi = std::exp(-0.5);  // both centers at distance 1
    CHECK(y[0] == doctest::Approx(0.5 + phi * (1.0 - 1.0)));
    CHECK(y[1] == doctest::Approx(phi * (0.5 + 0.25)));
}

TEST_CASE("training interpolates the data to machine precision") {
    const auto data = grid_dataset();
    const auto net = rbf_train(data);
    CHECK(net.training_mse <= 1e-6);
    CHECK(rbf_mse(net, data) <= 1e-6);
    CHECK(rbf_mse_normalized(net, data) <= 1e-6);
    // spot check one row
    const auto pred = rbf_predict(net, data.inputs[5]);
    for (std::size_t j = 0; j < pred.size(); ++j) CHECK(pred[j] == doctest::Approx(data.targets[5][j]).epsilon(1e-4));
}

TEST_CASE("single-sample dataset is reproduced exactly") {
    TuningDataset data;
    data.controller_type = "pid";
    data.inputs = {{1.0, 0.5, 2.0, 0.8}};
    data.targets = {{3.0, 1.5, 0.25}};
    const auto net = rbf_train(data);
    const auto pred = rbf_predict(net, data.inputs[0]);
    CHECK(pred[0] == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(pred[1] == doctest::Approx(1.5).epsilon(1e-9));
    CHECK(pred[2] == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("prediction is invariant under input rescaling of the dataset") {
    // Scaling an input dimension by a constant is absorbed by the normalizer:
    // predictions at correspondingly scaled query points must agree.
    auto data = grid_dataset();
    const auto net_a = rbf_train(data);
    auto scaled = data;
    for (auto& row : scaled.inputs) row[2] *= 1000.0;
    const auto net_b = rbf_train(scaled);
    for (std::size_t r = 0; r < data.inputs.size(); ++r) {
        auto q = data.inputs[r];
        auto qs = q;
        qs[2] *= 1000.0;
        const auto ya = rbf_predict(net_a, q);
        const auto yb = rbf_predict(net_b, qs);
        for (std::size_t j = 0; j < ya.size(); ++j) CHECK(std::abs(ya[j] - yb[j]) <= 1e-9 * std::max(1.0, std::abs(ya[j])));
    }
}

TEST_CASE("predictions vary smoothly between centers") {
    const auto data = grid_dataset();
    const auto net = rbf_train(data);
    // sample along a segment between two training points; finite-difference
    // increments stay bounded (no spikes between interpolation nodes)
    const auto& a = data.inputs[0];
    const auto& b = data.inputs[1];
    std::vector<double> prev = rbf_predict(net, a);
    for (int s = 1; s <= 50; ++s) {
        std::vector<double> q(a.size());
        const double f = s / 50.0;
        for (std::size_t i = 0; i < q.size(); ++i) q[i] = (1.0 - f) * a[i] + f * b[i];
        const auto y = rbf_predict(net, q);
        for (std::size_t j = 0; j < y.size(); ++j) CHECK(std::abs(y[j] - prev[j]) <= 0.5);
        prev = y;
    }
}

TEST_CASE("dataset validation rejects duplicates and shape mismatches") {
    TuningDataset dup;
    dup.controller_type = "pid";
    dup.inputs = {{1.0, 0.5, 2.0, 0.8}, {1.0, 0.5, 2.0, 0.8}};
    dup.targets = {{1.0, 1.0, 1.0}, {2.0, 2.0, 2.0}};
    CHECK_THROWS_AS(rbf_train(dup), std::invalid_argument);

    TuningDataset shape;
    shape.controller_type = "pid";
    shape.inputs = {{1.0, 0.5}};
    shape.targets = {{1.0}, {2.0}};
    CHECK_THROWS_AS(shape.validate(), std::invalid_argument);
}

TEST_CASE("dataset_from_records extracts inputs in {K, L, tau1, tau2} order") {
    TuningRecord rec;
    rec.plant_spec = {Family::P1, 4};
    rec.soptd = {2.0, 3.0, 1.0, 0.5};  // K, tau1, tau2, L
    rec.controller_type = "fopid";
    rec.params = to_json(FopidParams{1.0, 0.5, 0.25, 0.9, 1.1});
    const auto data = dataset_from_records({rec});
    REQUIRE(data.inputs.size() == 1);
    CHECK(data.inputs[0] == std::vector<double>{2.0, 0.5, 3.0, 1.0});
    CHECK(data.targets[0] == std::vector<double>{1.0, 0.5, 0.25, 0.9, 1.1});
}

TEST_CASE("RbfNetwork JSON round trip preserves predictions bitwise") {
    const auto data = grid_dataset();
    const auto net = rbf_train(data);
    const auto net2 = rbf_from_json(to_json(net));
    for (const auto& x : data.inputs) {
        const auto a = rbf_predict(net, x);
        const auto b = rbf_predict(net2, x);
        CHECK(a == b);
    }
    CHECK(net2.outputs == net.outputs);
}
