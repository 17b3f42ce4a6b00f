#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

#include "fixtures.hpp"
#include "genecv/selection.hpp"
#include "genecv/synth.hpp"
#include "oracle_impl.hpp"

using namespace genecv;
using Catch::Matchers::ContainsSubstring;

TEST_CASE("rfe_schedule reproduces the published gene-count columns") {
    REQUIRE(rfe_schedule(5422).sizes ==
            std::vector<int>{5422, 4096, 2048, 1024, 512, 256, 128, 64, 32, 16, 8, 4, 2, 1});
    REQUIRE(rfe_schedule(70).sizes == std::vector<int>{70, 64, 32, 16, 8, 4, 2, 1});
    REQUIRE(rfe_schedule(8).sizes == std::vector<int>{8, 4, 2, 1});
    REQUIRE(rfe_schedule(1).sizes == std::vector<int>{1});
    REQUIRE(rfe_schedule(2).sizes == std::vector<int>{2, 1});
    REQUIRE_THROWS_WITH(rfe_schedule(0), ContainsSubstring("at least 1"));
}

TEST_CASE("rfe_schedule is strictly decreasing, ends at 1, powers of two after the first") {
    for (int p = 1; p <= 300; ++p) {
        const auto sched = rfe_schedule(p);
        REQUIRE(sched.sizes.front() == p);
        REQUIRE(sched.sizes.back() == 1);
        for (std::size_t i = 1; i < sched.sizes.size(); ++i) {
            REQUIRE(sched.sizes[i] < sched.sizes[i - 1]);
            const int d = sched.sizes[i];
            REQUIRE((d & (d - 1)) == 0);
        }
    }
}

TEST_CASE("rfe_schedule_fine halves above the floor then steps by one") {
    const auto sched = rfe_schedule_fine(70, 16);
    std::vector<int> expected{70, 64, 32, 16};
    for (int d = 15; d >= 1; --d) expected.push_back(d);
    REQUIRE(sched.sizes == expected);

    // a floor at or above p degenerates to single-feature steps throughout
    REQUIRE(rfe_schedule_fine(5, 16).sizes == std::vector<int>{5, 4, 3, 2, 1});
    REQUIRE_THROWS_WITH(rfe_schedule_fine(5, 0), ContainsSubstring("floor"));
}

TEST_CASE("rank_by_weight orders by |weight| with ties to the lower index") {
    SvmModel m;
    m.active_features = {0, 1, 2};
    m.weights = {0.5, -2.0, 1.0};
    REQUIRE(rank_by_weight(m).indices == std::vector<int>{1, 2, 0});

    SvmModel tie;
    tie.active_features = {1, 3};
    tie.weights = {1.0, 1.0};
    REQUIRE(rank_by_weight(tie).indices == std::vector<int>{1, 3});

    SvmModel zero;
    zero.active_features = {0, 1};
    zero.weights = {0.0, 0.1};
    REQUIRE(rank_by_weight(zero).indices == std::vector<int>{1, 0});
}

TEST_CASE("rfe_path keeps the informative feature down to a single gene") {
    const auto data = fixtures::informative8();
    const auto schedule = rfe_schedule(8);
    const auto path = rfe_path(data, schedule, SvmConfig{});
    for (const auto& step : path.steps) REQUIRE(step.subset.contains(2));
    REQUIRE(path.subset_at(1).indices == std::vector<int>{2});
}

TEST_CASE("rfe_path matches the brute-force elimination oracle") {
    const auto data = fixtures::informative8();
    const SvmConfig cfg;
    const auto path = rfe_path(data, rfe_schedule(8), cfg);
    for (int d : {8, 4, 2, 1}) {
        auto expected = oracle::select_subset(data, oracle::all_features(data), d, cfg);
        auto got = path.subset_at(d).indices;
        std::sort(expected.begin(), expected.end());
        std::sort(got.begin(), got.end());
        REQUIRE(got == expected);
    }
}

TEST_CASE("a single-entry schedule performs no elimination") {
    const auto data = fixtures::toy6();
    RfeSchedule sched;
    sched.sizes = {4};
    const auto path = rfe_path(data, sched, SvmConfig{});
    REQUIRE(path.steps.size() == 1);
    std::set<int> all(path.steps[0].subset.indices.begin(), path.steps[0].subset.indices.end());
    REQUIRE(all == std::set<int>{0, 1, 2, 3});
}

TEST_CASE("rfe subsets are nested") {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        const auto data = synth_null(12, 16, {6, 6}, seed);
        const auto path = rfe_path(data, rfe_schedule(16), SvmConfig{});
        for (std::size_t i = 1; i < path.steps.size(); ++i) {
            const std::set<int> larger(path.steps[i - 1].subset.indices.begin(),
                                       path.steps[i - 1].subset.indices.end());
            for (int v : path.steps[i].subset.indices) REQUIRE(larger.count(v) == 1);
        }
    }
}

TEST_CASE("t_screen evaluates the pooled two-sample t exactly") {
    LabeledDataset d;
    d.x = Matrix(4, 1);
    d.x(0, 0) = 1.0;
    d.x(1, 0) = 3.0;
    d.x(2, 0) = 5.0;
    d.x(3, 0) = 7.0;
    d.labels = {1, 1, 2, 2};
    d.feature_names = {"f1"};
    d.class_names = {"1", "2"};
    std::vector<double> scores;
    const auto subset = t_screen(d, 1, &scores);
    REQUIRE(subset.indices == std::vector<int>{0});
    REQUIRE(scores[0] == Catch::Approx(2.8284271247461903).margin(1e-12));
}

TEST_CASE("zero between-class difference ranks last") {
    LabeledDataset d;
    d.x = Matrix(4, 2);
    // feature 0: identical class means, nonzero variance -> |t| = 0
    d.x(0, 0) = 1.0;
    d.x(1, 0) = 3.0;
    d.x(2, 0) = 1.0;
    d.x(3, 0) = 3.0;
    // feature 1: separated means
    d.x(0, 1) = 0.0;
    d.x(1, 1) = 1.0;
    d.x(2, 1) = 5.0;
    d.x(3, 1) = 6.0;
    d.labels = {1, 1, 2, 2};
    d.feature_names = {"same", "split"};
    d.class_names = {"1", "2"};
    REQUIRE(t_screen(d, 2).indices == std::vector<int>{1, 0});
}

TEST_CASE("t_screen with G = p permutes all features") {
    const auto data = synth_null(10, 12, {5, 5}, 33);
    const auto subset = t_screen(data, data.p());
    std::set<int> seen(subset.indices.begin(), subset.indices.end());
    REQUIRE(static_cast<int>(seen.size()) == data.p());
}

TEST_CASE("t_screen is invariant under adding a constant to a feature") {
    const auto data = synth_null(14, 10, {7, 7}, 55);
    std::vector<double> base_scores;
    const auto base = t_screen(data, data.p(), &base_scores);

    auto shifted = data;
    for (int j = 0; j < shifted.n(); ++j) shifted.x(static_cast<std::size_t>(j), 4) += 10.0;
    std::vector<double> shifted_scores;
    const auto after = t_screen(shifted, shifted.p(), &shifted_scores);

    REQUIRE(after.indices == base.indices);
    for (std::size_t i = 0; i < base_scores.size(); ++i)
        REQUIRE(shifted_scores[i] == Catch::Approx(base_scores[i]).margin(1e-9));
}

TEST_CASE("malformed schedules are rejected") {
    const auto data = fixtures::toy6();
    RfeSchedule bad;
    bad.sizes = {2, 4, 1};
    REQUIRE_THROWS_WITH(rfe_path(data, bad, SvmConfig{}),
                        ContainsSubstring("strictly decreasing"));
}

TEST_CASE("subset writer lists rank, feature and score") {
    const auto dir = std::filesystem::temp_directory_path() / "genecv_tests";
    std::filesystem::create_directories(dir);
    const auto path = (dir / "markers.tsv").string();
    GeneSubset subset;
    subset.indices = {2, 0};
    save_subset(path, subset, {"alpha", "beta", "gamma"}, {3.5, 1.25});
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    REQUIRE(line == "rank\tfeature\tscore");
    std::getline(in, line);
    REQUIRE(line == "1\tgamma\t3.5");
    std::getline(in, line);
    REQUIRE(line == "2\talpha\t1.25");
}

TEST_CASE("t_screen preconditions") {
    const auto data = synth_null(10, 4, {8, 2}, 1);
    REQUIRE_NOTHROW(t_screen(data, 2));
    REQUIRE_THROWS_WITH(t_screen(data, 5), ContainsSubstring("out of range"));

    const auto thin = synth_null(5, 4, {4, 1}, 1);
    REQUIRE_THROWS_WITH(t_screen(thin, 2), ContainsSubstring("at least 2 samples"));
}
