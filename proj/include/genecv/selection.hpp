#pragma once
#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "genecv/dataset.hpp"
#include "genecv/error.hpp"
#include "genecv/svm.hpp"
#include "genecv/text.hpp"

namespace genecv {

// Ordered feature subset, best-ranked first. Indices are 0-based columns of
// the parent dataset.
struct GeneSubset {
    std::vector<int> indices;

    int size() const { return static_cast<int>(indices.size()); }
    bool contains(int v) const {
        return std::find(indices.begin(), indices.end(), v) != indices.end();
    }
    GeneSubset take(int d) const {
        return GeneSubset{{indices.begin(), indices.begin() + d}};
    }
};

// Strictly decreasing retained-set sizes ending at 1.
struct RfeSchedule {
    std::vector<int> sizes;

    bool contains(int d) const {
        return std::find(sizes.begin(), sizes.end(), d) != sizes.end();
    }
    void validate() const {
        require(!sizes.empty(), "selection", "empty schedule");
        for (std::size_t i = 0; i < sizes.size(); ++i) {
            require(sizes[i] >= 1, "selection", "schedule sizes must be positive");
            require(i == 0 || sizes[i] < sizes[i - 1], "selection",
                    "schedule sizes must be strictly decreasing");
        }
    }
    // Prefix of sizes >= d; used when elimination should stop early.
    RfeSchedule truncated_at(int d) const {
        RfeSchedule out;
        for (int s : sizes)
            if (s >= d) out.sizes.push_back(s);
        return out;
    }
};

// Drop to the greatest power of two below p, then halve down to 1. A power
// of two halves immediately.
inline RfeSchedule rfe_schedule(int p) {
    require(p >= 1, "selection", "feature count must be at least 1");
    RfeSchedule out;
    out.sizes.push_back(p);
    if (p == 1) return out;
    int next = 1;
    while (next * 2 < p) next *= 2; // greatest power of 2 strictly below p
    if (next * 2 == p) next = p / 2;
    for (int d = next; d >= 1; d /= 2) out.sizes.push_back(d);
    return out;
}

// Variant that halves only above `floor_size` and then removes one feature
// per step, trading run time for a finer path.
inline RfeSchedule rfe_schedule_fine(int p, int floor_size) {
    require(p >= 1, "selection", "feature count must be at least 1");
    require(floor_size >= 1, "selection", "floor must be at least 1");
    const auto coarse = rfe_schedule(p);
    RfeSchedule out;
    for (int d : coarse.sizes) {
        out.sizes.push_back(d);
        if (d <= floor_size) break;
    }
    for (int d = out.sizes.back() - 1; d >= 1; --d) out.sizes.push_back(d);
    return out;
}

// Active features ordered by decreasing |weight|; ties go to the lower index.
inline GeneSubset rank_by_weight(const SvmModel& model) {
    require(!model.active_features.empty(), "selection", "model has no active features");
    std::vector<std::size_t> order(model.active_features.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double wa = std::abs(model.weights[a]), wb = std::abs(model.weights[b]);
        if (wa != wb) return wa > wb;
        return model.active_features[a] < model.active_features[b];
    });
    GeneSubset out;
    out.indices.reserve(order.size());
    for (std::size_t i : order) out.indices.push_back(model.active_features[i]);
    return out;
}

struct RfeStep {
    int size;
    GeneSubset subset; // ranking order of the model fitted at this size
    SvmModel model;
};

// One backward-elimination trajectory: subsets are nested from the first
// size down to 1.
struct RfePath {
    std::vector<RfeStep> steps; // in schedule order (decreasing size)

    const RfeStep& at(int d) const {
        for (const auto& s : steps)
            if (s.size == d) return s;
        fail("selection", "size " + std::to_string(d) + " not recorded on this path");
    }
    const GeneSubset& subset_at(int d) const { return at(d).subset; }
    const SvmModel& model_at(int d) const { return at(d).model; }
};

// Fit, rank by |weight|, truncate to the next schedule size, refit. The
// starting set is the first sizes[0] entries of `universe`.
inline RfePath rfe_path_from(const LabeledDataset& data, const GeneSubset& universe,
                             const RfeSchedule& schedule, const SvmConfig& config) {
    schedule.validate();
    require(schedule.sizes.front() <= universe.size(), "selection",
            "schedule exceeds feature universe");
    RfePath path;
    GeneSubset current = universe.take(schedule.sizes.front());
    for (std::size_t i = 0; i < schedule.sizes.size(); ++i) {
        const int d = schedule.sizes[i];
        SvmModel model = train_svm(data, current.indices, config);
        GeneSubset ranked = rank_by_weight(model);
        path.steps.push_back({d, ranked, std::move(model)});
        if (i + 1 < schedule.sizes.size()) current = ranked.take(schedule.sizes[i + 1]);
    }
    return path;
}

inline RfePath rfe_path(const LabeledDataset& data, const RfeSchedule& schedule,
                        const SvmConfig& config) {
    require(!schedule.sizes.empty() && schedule.sizes.front() <= data.p(), "selection",
            "schedule exceeds feature count");
    GeneSubset all;
    all.indices.resize(static_cast<std::size_t>(data.p()));
    std::iota(all.indices.begin(), all.indices.end(), 0);
    return rfe_path_from(data, all, schedule, config);
}

// Pooled-variance two-sample t per feature; top G by |t|, ties to the lower
// index. Zero pooled variance gives t = 0 for equal means and +-inf
// otherwise. Optionally reports |t| scores in ranking order.
inline GeneSubset t_screen(const LabeledDataset& data, int g_keep,
                           std::vector<double>* out_scores = nullptr) {
    require(data.n_classes() == 2, "selection", "t-screen requires two classes");
    require(g_keep >= 1 && g_keep <= data.p(), "selection", "retained count G out of range");
    const auto c1 = data.samples_of_class(1);
    const auto c2 = data.samples_of_class(2);
    require(c1.size() >= 2 && c2.size() >= 2, "selection",
            "each class needs at least 2 samples for the pooled t-statistic");
    const double n1 = static_cast<double>(c1.size()), n2 = static_cast<double>(c2.size());

    std::vector<double> tstat(static_cast<std::size_t>(data.p()));
    for (int v = 0; v < data.p(); ++v) {
        double m1 = 0.0, m2 = 0.0;
        for (int j : c1) m1 += data.x(static_cast<std::size_t>(j), static_cast<std::size_t>(v));
        for (int j : c2) m2 += data.x(static_cast<std::size_t>(j), static_cast<std::size_t>(v));
        m1 /= n1;
        m2 /= n2;
        double ss1 = 0.0, ss2 = 0.0;
        for (int j : c1) {
            const double d = data.x(static_cast<std::size_t>(j), static_cast<std::size_t>(v)) - m1;
            ss1 += d * d;
        }
        for (int j : c2) {
            const double d = data.x(static_cast<std::size_t>(j), static_cast<std::size_t>(v)) - m2;
            ss2 += d * d;
        }
        const double pooled_var = (ss1 + ss2) / (n1 + n2 - 2.0);
        const double denom = std::sqrt(pooled_var) * std::sqrt(1.0 / n1 + 1.0 / n2);
        if (denom > 0.0)
            tstat[static_cast<std::size_t>(v)] = (m1 - m2) / denom;
        else if (m1 == m2)
            tstat[static_cast<std::size_t>(v)] = 0.0;
        else
            tstat[static_cast<std::size_t>(v)] =
                std::copysign(std::numeric_limits<double>::infinity(), m1 - m2);
    }

    std::vector<int> order(static_cast<std::size_t>(data.p()));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        const double ta = std::abs(tstat[static_cast<std::size_t>(a)]);
        const double tb = std::abs(tstat[static_cast<std::size_t>(b)]);
        if (ta != tb) return ta > tb;
        return a < b;
    });

    GeneSubset out;
    out.indices.assign(order.begin(), order.begin() + g_keep);
    if (out_scores) {
        out_scores->clear();
        for (int v : out.indices) out_scores->push_back(std::abs(tstat[static_cast<std::size_t>(v)]));
    }
    return out;
}

// Marker-gene report: one feature per line with rank and optional score.
inline void save_subset(const std::string& path, const GeneSubset& subset,
                        const std::vector<std::string>& feature_names,
                        const std::vector<double>& scores = {}) {
    require(scores.empty() || scores.size() == subset.indices.size(), "selection",
            "score count does not match subset size");
    std::ofstream out(path);
    require(static_cast<bool>(out), "selection", "cannot write file '" + path + "'");
    out << "rank\tfeature\tscore\n";
    for (std::size_t i = 0; i < subset.indices.size(); ++i) {
        out << (i + 1) << "\t" << feature_names[static_cast<std::size_t>(subset.indices[i])]
            << "\t" << (scores.empty() ? "" : detail::fmt_double(scores[i])) << "\n";
    }
    require(static_cast<bool>(out), "selection", "write failed for '" + path + "'");
}

} // namespace genecv
