#pragma once
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "genecv/error.hpp"
#include "genecv/rng.hpp"
#include "genecv/synth.hpp"
#include "genecv/text.hpp"

namespace genecv {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// Estimated allocation rates: entry (i,j) is the probability that a class-i
// draw is assigned to class j. Conditional rates fix one fitted rule;
// unconditional rates average over freshly drawn training sets.
struct RateMatrix {
    enum class Kind { conditional, unconditional };

    int g = 0;
    Kind kind = Kind::conditional;
    int mc_samples = 0;
    std::uint64_t seed = 0;
    std::vector<double> rates; // g x g row-major

    double at(int true_cls, int assigned_cls) const { // 0-based
        return rates[static_cast<std::size_t>(true_cls * g + assigned_cls)];
    }
};

// A fitted prediction rule: sample vector in, class index (1..g) out.
using Rule = std::function<int(std::span<const double>)>;
// Produces a rule from a freshly drawn training set.
using Trainer = std::function<Rule(const LabeledDataset&)>;

namespace detail {

inline std::vector<double> log_class_terms(const SyntheticSpec& spec, std::span<const double> y) {
    require(static_cast<int>(y.size()) == spec.p, "oracle", "sample vector length mismatch");
    const double inv2var = 1.0 / (2.0 * spec.variance);
    const double log_norm =
        -0.5 * spec.p * std::log(2.0 * std::numbers::pi * spec.variance);
    std::vector<double> terms;
    terms.reserve(spec.means.size());
    for (std::size_t i = 0; i < spec.means.size(); ++i) {
        const double pi = spec.priors[i];
        if (pi <= 0.0) {
            terms.push_back(-std::numeric_limits<double>::infinity());
            continue;
        }
        double sq = 0.0;
        for (int v = 0; v < spec.p; ++v) {
            const double d = y[static_cast<std::size_t>(v)] - spec.means[i][static_cast<std::size_t>(v)];
            sq += d * d;
        }
        terms.push_back(std::log(pi) + log_norm - sq * inv2var);
    }
    return terms;
}

} // namespace detail

// Posterior class probabilities tau_i(y), evaluated in log space.
inline std::vector<double> posterior(const SyntheticSpec& spec, std::span<const double> y) {
    const auto terms = detail::log_class_terms(spec, y);
    const double top = *std::max_element(terms.begin(), terms.end());
    require(std::isfinite(top), "oracle", "posterior underflow: all class densities vanish");
    std::vector<double> tau(terms.size());
    double total = 0.0;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        tau[i] = std::exp(terms[i] - top);
        total += tau[i];
    }
    for (double& t : tau) t /= total;
    return tau;
}

// Bayes rule: the class of maximal posterior, ties to the lower index.
inline int bayes_classify(const SyntheticSpec& spec, std::span<const double> y) {
    const auto terms = detail::log_class_terms(spec, y);
    const double top = *std::max_element(terms.begin(), terms.end());
    require(std::isfinite(top), "oracle", "posterior underflow: all class densities vanish");
    for (std::size_t i = 0; i < terms.size(); ++i)
        if (terms[i] == top) return static_cast<int>(i) + 1;
    fail("oracle", "unreachable");
}

// Closed-form optimal error for two homoscedastic Gaussian classes with
// Mahalanobis separation delta: pi1*Phi(-delta/2 - c/delta) +
// pi2*Phi(-delta/2 + c/delta) with c = ln(pi1/pi2).
inline double optimal_error(const SyntheticSpec& spec) {
    spec.validate();
    require(spec.g() == 2, "oracle", "optimal_error requires two classes");
    const double pi1 = spec.priors[0], pi2 = spec.priors[1];
    if (pi1 <= 0.0 || pi2 <= 0.0) return 0.0;
    double sq = 0.0;
    for (int v = 0; v < spec.p; ++v) {
        const double d = spec.means[0][static_cast<std::size_t>(v)] -
                         spec.means[1][static_cast<std::size_t>(v)];
        sq += d * d;
    }
    const double delta = std::sqrt(sq / spec.variance);
    if (delta == 0.0) return std::min(pi1, pi2);
    const double c = std::log(pi1 / pi2);
    return pi1 * normal_cdf(-delta / 2.0 - c / delta) +
           pi2 * normal_cdf(-delta / 2.0 + c / delta);
}

// Allocation rates of one fixed rule, estimated from mc_samples fresh draws
// per class; the per-class generators derive from (seed, class index).
inline RateMatrix conditional_rates(const Rule& rule, const SyntheticSpec& spec, int mc_samples,
                                    std::uint64_t seed) {
    spec.validate();
    require(mc_samples >= 1000, "oracle", "mc_samples must be at least 1000");
    const int g = spec.g();
    RateMatrix out;
    out.g = g;
    out.kind = RateMatrix::Kind::conditional;
    out.mc_samples = mc_samples;
    out.seed = seed;
    out.rates.assign(static_cast<std::size_t>(g * g), 0.0);

    const double sigma = std::sqrt(spec.variance);
    std::vector<double> y(static_cast<std::size_t>(spec.p));
    for (int i = 0; i < g; ++i) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i + 1)));
        for (int s = 0; s < mc_samples; ++s) {
            for (int v = 0; v < spec.p; ++v)
                y[static_cast<std::size_t>(v)] =
                    spec.means[static_cast<std::size_t>(i)][static_cast<std::size_t>(v)] +
                    sigma * rng.normal();
            const int assigned = rule(y);
            require(assigned >= 1 && assigned <= g, "oracle", "rule returned an invalid class");
            out.rates[static_cast<std::size_t>(i * g + assigned - 1)] += 1.0;
        }
    }
    for (double& r : out.rates) r /= mc_samples;
    return out;
}

namespace detail {

// Largest-remainder apportionment of n training samples to the class priors.
inline std::vector<int> apportion(const std::vector<double>& priors, int n) {
    std::vector<int> sizes(priors.size());
    std::vector<std::pair<double, std::size_t>> frac;
    int assigned = 0;
    for (std::size_t i = 0; i < priors.size(); ++i) {
        const double exact = priors[i] * n;
        sizes[i] = static_cast<int>(std::floor(exact));
        assigned += sizes[i];
        frac.emplace_back(exact - std::floor(exact), i);
    }
    std::stable_sort(frac.begin(), frac.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (int r = 0; r < n - assigned; ++r) ++sizes[frac[static_cast<std::size_t>(r)].second];
    return sizes;
}

} // namespace detail

// Monte-Carlo expectation of the conditional rates over `reps` independently
// drawn training sets of size n. Replicate r uses derive_seed(seed, r); its
// training draw and its evaluation draws use substreams 1 and 2.
inline RateMatrix unconditional_rates(const Trainer& trainer, const SyntheticSpec& spec, int n,
                                      int reps, int mc_samples, std::uint64_t seed) {
    spec.validate();
    require(reps >= 1, "oracle", "replicate count must be at least 1");
    require(n >= 2, "oracle", "training size must be at least 2");
    RateMatrix total;
    for (int r = 0; r < reps; ++r) {
        const std::uint64_t rep_seed = derive_seed(seed, static_cast<std::uint64_t>(r));
        SyntheticSpec train_spec = spec;
        train_spec.class_sizes = detail::apportion(spec.priors, n);
        train_spec.seed = derive_seed(rep_seed, 1);
        const LabeledDataset train = synth_gaussian(train_spec);
        const Rule rule = trainer(train);
        const RateMatrix m = conditional_rates(rule, spec, mc_samples, derive_seed(rep_seed, 2));
        if (r == 0) {
            total = m;
        } else {
            for (std::size_t i = 0; i < total.rates.size(); ++i) total.rates[i] += m.rates[i];
        }
    }
    for (double& v : total.rates) v /= reps;
    total.kind = RateMatrix::Kind::unconditional;
    total.seed = seed;
    return total;
}

// Overall error for draws from the prior mixture: sum_i pi_i * sum_{j != i} rates(i,j).
inline double overall_error(const RateMatrix& rates, const std::vector<double>& priors) {
    require(static_cast<int>(priors.size()) == rates.g, "oracle", "priors length mismatch");
    double err = 0.0;
    for (int i = 0; i < rates.g; ++i) {
        double off = 0.0;
        for (int j = 0; j < rates.g; ++j)
            if (j != i) off += rates.at(i, j);
        err += priors[static_cast<std::size_t>(i)] * off;
    }
    return err;
}

// Delimited text, one row per true class.
inline void write_rate_matrix(std::ostream& out, const RateMatrix& m) {
    out << "# kind=" << (m.kind == RateMatrix::Kind::conditional ? "conditional" : "unconditional")
        << " mc_samples=" << m.mc_samples << " seed=" << m.seed << "\n";
    for (int i = 0; i < m.g; ++i) {
        for (int j = 0; j < m.g; ++j)
            out << detail::fmt_double(m.at(i, j)) << (j + 1 == m.g ? '\n' : '\t');
    }
}

inline void write_rate_matrix(const std::string& path, const RateMatrix& m) {
    std::ofstream out(path);
    require(static_cast<bool>(out), "oracle", "cannot write file '" + path + "'");
    write_rate_matrix(out, m);
    require(static_cast<bool>(out), "oracle", "write failed for '" + path + "'");
}

} // namespace genecv
