#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>

#include "genecv/centroid.hpp"
#include "genecv/rng.hpp"
#include "genecv/svm.hpp"
#include "genecv/synth.hpp"

using namespace genecv;
using Catch::Matchers::ContainsSubstring;

namespace {

LabeledDataset two_points() {
    LabeledDataset d;
    d.x = Matrix(2, 1);
    d.x(0, 0) = -1.0;
    d.x(1, 0) = 1.0;
    d.labels = {1, 2};
    d.feature_names = {"f1"};
    d.class_names = {"1", "2"};
    return d;
}

} // namespace

TEST_CASE("two separable points recover the canonical max-margin hyperplane") {
    SvmConfig cfg;
    cfg.cost = 1000.0;
    const auto model = train_svm(two_points(), {0}, cfg);
    REQUIRE(model.weights[0] == Catch::Approx(-1.0).margin(1e-9));
    REQUIRE(model.intercept == Catch::Approx(0.0).margin(1e-9));
    REQUIRE(model.converged);
    REQUIRE(model.dual_gap <= cfg.tolerance);
}

TEST_CASE("identical feature columns share the weight") {
    LabeledDataset d;
    d.x = Matrix(4, 2);
    const double col[4] = {-1.0, -0.5, 0.5, 1.0};
    for (std::size_t j = 0; j < 4; ++j) {
        d.x(j, 0) = col[j];
        d.x(j, 1) = col[j];
    }
    d.labels = {1, 1, 2, 2};
    d.feature_names = {"a", "b"};
    d.class_names = {"1", "2"};
    const auto model = train_svm(d, {0, 1}, SvmConfig{});
    REQUIRE(std::abs(model.weights[0]) == Catch::Approx(std::abs(model.weights[1])).margin(1e-12));
}

TEST_CASE("non-separable XOR-like labels still converge") {
    LabeledDataset d;
    d.x = Matrix(4, 1);
    d.x(0, 0) = -1.0;
    d.x(1, 0) = -1.0;
    d.x(2, 0) = 1.0;
    d.x(3, 0) = 1.0;
    d.labels = {1, 2, 1, 2};
    d.feature_names = {"f1"};
    d.class_names = {"1", "2"};
    const auto model = train_svm(d, {0}, SvmConfig{});
    REQUIRE(model.converged);
    REQUIRE(std::isfinite(model.weights[0]));
    REQUIRE(std::isfinite(model.intercept));
}

TEST_CASE("predict follows the sign with boundary to class 2") {
    SvmModel m;
    m.n_features_total = 1;
    m.active_features = {0};
    m.weights = {1.0};
    m.intercept = 0.0;
    const std::vector<double> y2{2.0};
    const std::vector<double> y0{0.0};
    REQUIRE(predict(m, y2) == 1);
    REQUIRE(predict(m, y0) == 2);

    SvmModel m2;
    m2.n_features_total = 2;
    m2.active_features = {0, 1};
    m2.weights = {1.0, 1.0};
    m2.intercept = -3.0;
    const std::vector<double> y11{1.0, 1.0};
    REQUIRE(predict(m2, y11) == 2);

    const std::vector<double> wrong{1.0, 2.0, 3.0};
    REQUIRE_THROWS_WITH(predict(m2, wrong), ContainsSubstring("does not match feature space"));
}

TEST_CASE("prediction is invariant to positive scaling of the hyperplane") {
    Rng rng(31);
    SvmModel m;
    m.n_features_total = 5;
    m.active_features = {0, 1, 2, 3, 4};
    m.weights = {0.3, -1.2, 0.0, 2.5, -0.7};
    m.intercept = 0.4;
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> y(5);
        for (double& v : y) v = rng.normal();
        const double scale = 1e-3 + 10.0 * rng.uniform01();
        SvmModel scaled = m;
        scaled.intercept *= scale;
        for (double& w : scaled.weights) w *= scale;
        REQUIRE(predict(m, y) == predict(scaled, y));
    }
}

TEST_CASE("training is deterministic bit for bit") {
    const auto data = synth_gaussian(two_gaussian_spec(6, 1.0, 1.0, 10, 10, 77));
    const auto a = train_svm(data, {0, 1, 2, 3, 4, 5}, SvmConfig{});
    const auto b = train_svm(data, {0, 1, 2, 3, 4, 5}, SvmConfig{});
    REQUIRE(a.weights == b.weights);
    REQUIRE(a.intercept == b.intercept);
    REQUIRE(a.alphas == b.alphas);
}

TEST_CASE("training depends only on the feature set, not its order") {
    const auto data = synth_gaussian(two_gaussian_spec(5, 1.0, 1.0, 8, 8, 13));
    const auto a = train_svm(data, {0, 2, 4}, SvmConfig{});
    const auto b = train_svm(data, {4, 0, 2}, SvmConfig{});
    REQUIRE(a.weights == b.weights);
    REQUIRE(a.intercept == b.intercept);
    REQUIRE(a.active_features == b.active_features);
}

TEST_CASE("separable data with large cost reaches zero apparent error") {
    const auto data = synth_gaussian(two_gaussian_spec(3, 8.0, 1.0, 12, 12, 5));
    SvmConfig cfg;
    cfg.cost = 100.0;
    const auto model = train_svm(data, {0, 1, 2}, cfg);
    for (int j = 0; j < data.n(); ++j)
        REQUIRE(predict(model, data.x.row(static_cast<std::size_t>(j))) ==
                data.labels[static_cast<std::size_t>(j)]);
}

TEST_CASE("dual solution is feasible") {
    Rng meta(404);
    for (int trial = 0; trial < 10; ++trial) {
        const int n1 = 3 + static_cast<int>(meta.uniform_below(8));
        const int n2 = 3 + static_cast<int>(meta.uniform_below(8));
        const auto data = synth_gaussian(
            two_gaussian_spec(4, 1.0, 1.0, n1, n2, meta.next_u64()));
        SvmConfig cfg;
        cfg.cost = 0.5 + meta.uniform01() * 2.0;
        const auto model = train_svm(data, {0, 1, 2, 3}, cfg);

        double balance = 0.0;
        for (int j = 0; j < data.n(); ++j) {
            const double a = model.alphas[static_cast<std::size_t>(j)];
            REQUIRE(a >= 0.0);
            REQUIRE(a <= cfg.cost);
            balance += a * (data.labels[static_cast<std::size_t>(j)] == 1 ? 1.0 : -1.0);
        }
        REQUIRE(std::abs(balance) <= 1e-9);
        if (model.converged) REQUIRE(model.dual_gap <= cfg.tolerance);
    }
}

TEST_CASE("converged models satisfy the KKT conditions sample by sample") {
    Rng meta(2718);
    int converged_seen = 0;
    for (int trial = 0; trial < 12; ++trial) {
        const int n1 = 4 + static_cast<int>(meta.uniform_below(8));
        const int n2 = 4 + static_cast<int>(meta.uniform_below(8));
        const auto data = synth_gaussian(
            two_gaussian_spec(3, 1.5, 1.0, n1, n2, meta.next_u64()));
        SvmConfig cfg;
        cfg.cost = 0.5 + meta.uniform01() * 2.0;
        const auto model = train_svm(data, {0, 1, 2}, cfg);
        if (!model.converged) continue;
        ++converged_seen;
        const double slack = 1e-3;
        for (int j = 0; j < data.n(); ++j) {
            const double margin =
                (data.labels[static_cast<std::size_t>(j)] == 1 ? 1.0 : -1.0) *
                model.decision_value(data.x.row(static_cast<std::size_t>(j)));
            const double a = model.alphas[static_cast<std::size_t>(j)];
            if (a <= 1e-9)
                REQUIRE(margin >= 1.0 - slack);
            else if (a >= cfg.cost - 1e-9)
                REQUIRE(margin <= 1.0 + slack);
            else
                REQUIRE(std::abs(margin - 1.0) <= slack);
        }
    }
    REQUIRE(converged_seen >= 8);
}

TEST_CASE("training rejects degenerate inputs") {
    auto data = two_points();
    REQUIRE_THROWS_WITH(train_svm(data, {}, SvmConfig{}), ContainsSubstring("empty feature subset"));
    REQUIRE_THROWS_WITH(train_svm(data, {3}, SvmConfig{}), ContainsSubstring("out of range"));
    data.labels = {1, 1};
    REQUIRE_THROWS_WITH(train_svm(data, {0}, SvmConfig{}), ContainsSubstring("single class"));
    SvmConfig bad;
    bad.cost = 0.0;
    REQUIRE_THROWS_WITH(train_svm(two_points(), {0}, bad), ContainsSubstring("cost must be positive"));
}

TEST_CASE("model serialization round-trips") {
    const auto data = synth_gaussian(two_gaussian_spec(4, 2.0, 1.0, 6, 6, 9));
    const auto model = train_svm(data, {1, 3}, SvmConfig{});
    const auto path =
        (std::filesystem::temp_directory_path() / "genecv_tests" / "model.txt").string();
    std::filesystem::create_directories(std::filesystem::path(path).parent_path());
    save_model(path, model);
    const auto back = load_model(path);
    REQUIRE(back.intercept == model.intercept);
    REQUIRE(back.weights == model.weights);
    REQUIRE(back.active_features == model.active_features);
    REQUIRE(back.n_features_total == model.n_features_total);
    REQUIRE(back.cost == model.cost);
    REQUIRE(back.converged == model.converged);
    REQUIRE(back.dual_gap == model.dual_gap);
}

TEST_CASE("centroid correlation rule") {
    const std::vector<double> ref{1.0, 2.0, 3.0, 4.0};
    std::vector<double> anti{-1.0, -2.0, -3.0, -4.0};
    REQUIRE(centroid_corr_rule(ref, ref, 0.4) == 1);
    REQUIRE(centroid_corr_rule(ref, anti, 0.4) == 2);

    // correlation exactly 0.5 against (1, 0, -1, 0)
    const std::vector<double> axis{1.0, 0.0, -1.0, 0.0};
    const std::vector<double> halfway{1.0, std::sqrt(3.0), -1.0, -std::sqrt(3.0)};
    REQUIRE(pearson(halfway, axis) == Catch::Approx(0.5).margin(1e-12));
    REQUIRE(centroid_corr_rule(axis, halfway, 0.4) == 1);
    REQUIRE(centroid_corr_rule(axis, halfway, 0.55) == 2);

    const std::vector<double> flat{2.0, 2.0, 2.0, 2.0};
    REQUIRE_THROWS_WITH(centroid_corr_rule(ref, flat, 0.4),
                        ContainsSubstring("constant vector"));
}
