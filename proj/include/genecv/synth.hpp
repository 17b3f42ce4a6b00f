#pragma once
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "genecv/dataset.hpp"
#include "genecv/error.hpp"
#include "genecv/rng.hpp"

namespace genecv {

// Two homoscedastic diagonal Gaussian classes: class i draws N(means[i], variance * I).
struct SyntheticSpec {
    int p = 1;
    std::vector<std::vector<double>> means; // one mean vector per class
    double variance = 1.0;                  // common sigma^2
    std::vector<double> priors;
    std::vector<int> class_sizes;
    std::uint64_t seed = 0;

    int g() const { return static_cast<int>(means.size()); }

    void validate() const {
        require(g() == 2, "data", "synthetic spec is two-class");
        require(p >= 1, "data", "feature count must be at least 1");
        for (const auto& mu : means)
            require(static_cast<int>(mu.size()) == p, "data", "mean vector length mismatch");
        require(variance > 0.0, "data", "variance must be positive");
        require(priors.size() == means.size(), "data", "one prior per class required");
        double total = 0.0;
        for (double pi : priors) {
            require(pi >= 0.0, "data", "priors must be nonnegative");
            total += pi;
        }
        require(std::abs(total - 1.0) <= 1e-12, "data", "priors must sum to 1");
        require(class_sizes.size() == means.size(), "data", "one class size per class required");
        for (int sz : class_sizes)
            require(sz >= 1, "data", "class sizes must be positive");
    }
};

// Convenience constructor: classes separated by `delta` along axis 0,
// centred at +-delta/2, equal priors unless overridden.
inline SyntheticSpec two_gaussian_spec(int p, double delta, double variance, int n1, int n2,
                                       std::uint64_t seed,
                                       const std::vector<double>& priors = {0.5, 0.5}) {
    SyntheticSpec spec;
    spec.p = p;
    spec.means = {std::vector<double>(static_cast<std::size_t>(p), 0.0),
                  std::vector<double>(static_cast<std::size_t>(p), 0.0)};
    spec.means[0][0] = delta / 2.0;
    spec.means[1][0] = -delta / 2.0;
    spec.variance = variance;
    spec.priors = priors;
    spec.class_sizes = {n1, n2};
    spec.seed = seed;
    spec.validate();
    return spec;
}

namespace detail {

inline std::vector<std::string> default_feature_names(int p) {
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(p));
    for (int v = 1; v <= p; ++v) names.push_back("f" + std::to_string(v));
    return names;
}

inline std::vector<std::string> default_class_names(int g) {
    std::vector<std::string> names;
    for (int c = 1; c <= g; ++c) names.push_back(std::to_string(c));
    return names;
}

} // namespace detail

// Null benchmark: every entry an independent standard normal draw, so the
// labels carry no information about the features.
inline LabeledDataset synth_null(int n, int p, const std::vector<int>& class_sizes,
                                 std::uint64_t seed) {
    require(n >= 2 && p >= 1, "data", "need n >= 2 and p >= 1");
    const int total = std::accumulate(class_sizes.begin(), class_sizes.end(), 0);
    require(total == n, "data",
            "class_sizes sum " + std::to_string(total) + " does not match n " + std::to_string(n));
    for (int sz : class_sizes) require(sz >= 1, "data", "class sizes must be positive");

    LabeledDataset out;
    out.x = Matrix(static_cast<std::size_t>(n), static_cast<std::size_t>(p));
    Rng rng(seed);
    for (double& v : out.x.values) v = rng.normal();
    for (std::size_t cls = 0; cls < class_sizes.size(); ++cls)
        out.labels.insert(out.labels.end(), static_cast<std::size_t>(class_sizes[cls]),
                          static_cast<int>(cls) + 1);
    out.feature_names = detail::default_feature_names(p);
    out.class_names = detail::default_class_names(static_cast<int>(class_sizes.size()));
    out.validate();
    return out;
}

// Class blocks in order: all class-1 samples first, then class 2.
inline LabeledDataset synth_gaussian(const SyntheticSpec& spec) {
    spec.validate();
    const int n = std::accumulate(spec.class_sizes.begin(), spec.class_sizes.end(), 0);
    LabeledDataset out;
    out.x = Matrix(static_cast<std::size_t>(n), static_cast<std::size_t>(spec.p));
    const double sigma = std::sqrt(spec.variance);
    Rng rng(spec.seed);
    std::size_t row = 0;
    for (int cls = 0; cls < spec.g(); ++cls) {
        for (int j = 0; j < spec.class_sizes[static_cast<std::size_t>(cls)]; ++j, ++row) {
            auto dst = out.x.row(row);
            for (int v = 0; v < spec.p; ++v)
                dst[static_cast<std::size_t>(v)] =
                    spec.means[static_cast<std::size_t>(cls)][static_cast<std::size_t>(v)] +
                    sigma * rng.normal();
            out.labels.push_back(cls + 1);
        }
    }
    out.feature_names = detail::default_feature_names(spec.p);
    out.class_names = detail::default_class_names(spec.g());
    out.validate();
    return out;
}

} // namespace genecv
