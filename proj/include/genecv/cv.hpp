#pragma once
#include <algorithm>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include "genecv/dataset.hpp"
#include "genecv/error.hpp"
#include "genecv/folds.hpp"
#include "genecv/rng.hpp"
#include "genecv/selection.hpp"
#include "genecv/svm.hpp"
#include "genecv/text.hpp"

namespace genecv {

enum class Protocol {
    apparent,
    internal_cv,
    external_cv,
    double_cv,
    screened_internal,
    screened_external,
    leaky_holdout,
    repeated,
};

inline std::string to_string(Protocol p) {
    switch (p) {
        case Protocol::apparent: return "apparent";
        case Protocol::internal_cv: return "internal";
        case Protocol::external_cv: return "external";
        case Protocol::double_cv: return "double";
        case Protocol::screened_internal: return "screened-internal";
        case Protocol::screened_external: return "screened-external";
        case Protocol::leaky_holdout: return "leaky-holdout";
        case Protocol::repeated: return "repeated";
    }
    fail("cv_engine", "unknown protocol");
}

inline Protocol protocol_from_string(const std::string& s) {
    for (Protocol p : {Protocol::apparent, Protocol::internal_cv, Protocol::external_cv,
                       Protocol::double_cv, Protocol::screened_internal,
                       Protocol::screened_external, Protocol::leaky_holdout, Protocol::repeated})
        if (to_string(p) == s) return p;
    fail("cv_engine", "unknown protocol '" + s + "'");
}

struct ErrorRow {
    int d;
    double rate;
    bool operator==(const ErrorRow&) const = default;
};

// Per-size error rates, rows ascending in d to mirror the published tables.
struct ErrorTable {
    Protocol protocol;
    int k = 0;
    std::uint64_t seed = 0;
    std::vector<ErrorRow> rows;

    double rate_at(int d) const {
        for (const auto& r : rows)
            if (r.d == d) return r.rate;
        fail("cv_engine", "size " + std::to_string(d) + " not present in table");
    }
};

// Smallest d attaining the minimum estimate.
inline int select_best_size(const ErrorTable& table) {
    require(!table.rows.empty(), "cv_engine", "empty error table");
    int best_d = table.rows.front().d;
    double best = table.rows.front().rate;
    for (const auto& r : table.rows) {
        if (r.rate < best || (r.rate == best && r.d < best_d)) {
            best = r.rate;
            best_d = r.d;
        }
    }
    return best_d;
}

struct DoubleCvResult {
    double estimate = 0.0;
    std::vector<int> inner_choice; // h_k per outer fold
    int k = 0;
    std::uint64_t seed = 0;
};

struct HoldoutRates {
    double leaky = 0.0;
    double clean = 0.0;
};

// Per-fold subsets recorded at every schedule size, for marker-gene
// frequency reporting.
using SubsetLog = std::vector<std::vector<GeneSubset>>; // [fold][schedule index]

namespace detail {

inline void check_two_class_split(const LabeledDataset& split) {
    bool c1 = false, c2 = false;
    for (int z : split.labels) (z == 1 ? c1 : c2) = true;
    require(c1 && c2, "cv_engine", "training split contains a single class");
}

inline int count_misses(const SvmModel& model, const LabeledDataset& data,
                        const std::vector<int>& samples) {
    int misses = 0;
    for (int j : samples)
        if (predict(model, data.x.row(static_cast<std::size_t>(j))) != data.labels[static_cast<std::size_t>(j)])
            ++misses;
    return misses;
}

inline std::vector<ErrorRow> ascending_rows(const RfeSchedule& schedule,
                                            const std::vector<int>& misses, double denom) {
    std::vector<ErrorRow> rows;
    rows.reserve(schedule.sizes.size());
    for (std::size_t i = schedule.sizes.size(); i-- > 0;)
        rows.push_back({schedule.sizes[i], static_cast<double>(misses[i]) / denom});
    return rows;
}

// Shared core of the external estimators: per fold, build an RFE path on the
// held-in samples (universe supplied by `pick_universe`) and classify the
// held-out block at every schedule size.
template <typename UniversePicker>
ErrorTable external_cv_core(const LabeledDataset& data, const FoldPlan& folds,
                            const RfeSchedule& schedule, const SvmConfig& config,
                            Protocol protocol, UniversePicker&& pick_universe,
                            SubsetLog* log) {
    const auto blocks = folds.blocks();
    std::vector<int> misses(schedule.sizes.size(), 0);
    if (log) log->assign(static_cast<std::size_t>(folds.k), {});
    for (int k = 0; k < folds.k; ++k) {
        const auto train_idx = folds.held_in(k);
        const LabeledDataset train = data.select_samples(train_idx);
        check_two_class_split(train);
        const GeneSubset universe = pick_universe(train);
        const RfePath path = rfe_path_from(train, universe, schedule, config);
        for (std::size_t i = 0; i < schedule.sizes.size(); ++i) {
            const auto& step = path.steps[i];
            misses[i] += count_misses(step.model, data, blocks[static_cast<std::size_t>(k)]);
            if (log) (*log)[static_cast<std::size_t>(k)].push_back(step.subset);
        }
    }
    return ErrorTable{protocol, folds.k, folds.seed,
                      ascending_rows(schedule, misses, static_cast<double>(data.n()))};
}

inline GeneSubset full_universe(int p) {
    GeneSubset all;
    all.indices.resize(static_cast<std::size_t>(p));
    std::iota(all.indices.begin(), all.indices.end(), 0);
    return all;
}

} // namespace detail

// Proportion of training samples misallocated by the rule trained on the
// full data restricted to `subset`.
inline double apparent_error(const LabeledDataset& data, const GeneSubset& subset,
                             const SvmConfig& config) {
    const SvmModel model = train_svm(data, subset.indices, config);
    std::vector<int> everyone(static_cast<std::size_t>(data.n()));
    std::iota(everyone.begin(), everyone.end(), 0);
    return static_cast<double>(detail::count_misses(model, data, everyone)) / data.n();
}

// Internal (ordinary) CV: the subset of size d chosen once on the full data
// is reused on every validation trial; only the SVM is refit per fold.
inline double internal_cv(const LabeledDataset& data, const FoldPlan& folds, int d,
                          const RfeSchedule& schedule, const SvmConfig& config) {
    require(schedule.contains(d), "cv_engine", "size d not in schedule");
    const RfePath full_path = rfe_path(data, schedule, config);
    const GeneSubset& fixed = full_path.subset_at(d);
    const auto blocks = folds.blocks();
    int misses = 0;
    for (int k = 0; k < folds.k; ++k) {
        const LabeledDataset train = data.select_samples(folds.held_in(k));
        detail::check_two_class_split(train);
        const SvmModel model = train_svm(train, fixed.indices, config);
        misses += detail::count_misses(model, data, blocks[static_cast<std::size_t>(k)]);
    }
    return static_cast<double>(misses) / data.n();
}

// Whole internal-CV column at once; equals internal_cv(d) row by row but
// runs the full-data RFE only once.
inline ErrorTable internal_cv_table(const LabeledDataset& data, const FoldPlan& folds,
                                    const RfeSchedule& schedule, const SvmConfig& config) {
    const RfePath full_path = rfe_path(data, schedule, config);
    const auto blocks = folds.blocks();
    std::vector<int> misses(schedule.sizes.size(), 0);
    for (int k = 0; k < folds.k; ++k) {
        const LabeledDataset train = data.select_samples(folds.held_in(k));
        detail::check_two_class_split(train);
        for (std::size_t i = 0; i < schedule.sizes.size(); ++i) {
            const SvmModel model =
                train_svm(train, full_path.steps[i].subset.indices, config);
            misses[i] += detail::count_misses(model, data, blocks[static_cast<std::size_t>(k)]);
        }
    }
    return ErrorTable{Protocol::internal_cv, folds.k, folds.seed,
                      detail::ascending_rows(schedule, misses, static_cast<double>(data.n()))};
}

// External CV: the full RFE is rerun from scratch on each held-in set, so
// gene selection never sees the held-out block. K = n gives leave-one-out.
inline ErrorTable external_cv(const LabeledDataset& data, const FoldPlan& folds,
                              const RfeSchedule& schedule, const SvmConfig& config,
                              SubsetLog* log = nullptr) {
    require(schedule.sizes.front() <= data.p(), "cv_engine", "schedule exceeds feature count");
    return detail::external_cv_core(
        data, folds, schedule, config, Protocol::external_cv,
        [&](const LabeledDataset&) { return detail::full_universe(data.p()); }, log);
}

// Screening outside the folds (the biased construction): the top-G universe
// is fixed once on the full data, then RFE runs per fold inside it.
inline ErrorTable screened_internal_cv(const LabeledDataset& data, int g_keep,
                                       const FoldPlan& folds, const RfeSchedule& schedule,
                                       const SvmConfig& config, SubsetLog* log = nullptr) {
    require(g_keep <= data.p(), "cv_engine", "screen size exceeds feature count");
    require(schedule.sizes.front() <= g_keep, "cv_engine", "schedule exceeds screen size");
    const GeneSubset fixed = t_screen(data, g_keep);
    return detail::external_cv_core(
        data, folds, schedule, config, Protocol::screened_internal,
        [&](const LabeledDataset&) { return fixed; }, log);
}

// Screening inside the folds: each held-in set picks its own top G before
// RFE, so the held-out block never influences the universe.
inline ErrorTable screened_external_cv(const LabeledDataset& data, int g_keep,
                                       const FoldPlan& folds, const RfeSchedule& schedule,
                                       const SvmConfig& config, SubsetLog* log = nullptr) {
    require(g_keep <= data.p(), "cv_engine", "screen size exceeds feature count");
    require(schedule.sizes.front() <= g_keep, "cv_engine", "schedule exceeds screen size");
    return detail::external_cv_core(
        data, folds, schedule, config, Protocol::screened_external,
        [&](const LabeledDataset& train) { return t_screen(train, g_keep); }, log);
}

// Double CV: an outer K-fold loop whose per-fold subset SIZE is chosen by an
// inner (K-1)-fold external CV over the surviving blocks, correcting the
// optimism of minimizing the external column over d.
inline DoubleCvResult double_cv(const LabeledDataset& data, int k, const RfeSchedule& schedule,
                                const SvmConfig& config, std::uint64_t seed) {
    require(k >= 3, "cv_engine", "double CV needs K >= 3");
    const FoldPlan plan = make_folds(data, k, seed);
    const auto blocks = plan.blocks();
    const int n = data.n();

    DoubleCvResult result;
    result.k = k;
    result.seed = seed;
    int outer_misses = 0;

    for (int ko = 0; ko < k; ++ko) {
        const int nk = static_cast<int>(blocks[static_cast<std::size_t>(ko)].size());
        std::vector<int> inner_misses(schedule.sizes.size(), 0);
        for (int ki = 0; ki < k; ++ki) {
            if (ki == ko) continue;
            std::vector<int> train_idx;
            for (int j = 0; j < n; ++j)
                if (plan.assignment[static_cast<std::size_t>(j)] != ko &&
                    plan.assignment[static_cast<std::size_t>(j)] != ki)
                    train_idx.push_back(j);
            const LabeledDataset train = data.select_samples(train_idx);
            detail::check_two_class_split(train);
            const RfePath path = rfe_path(train, schedule, config);
            for (std::size_t i = 0; i < schedule.sizes.size(); ++i)
                inner_misses[i] += detail::count_misses(path.steps[i].model, data,
                                                        blocks[static_cast<std::size_t>(ki)]);
        }
        ErrorTable inner{Protocol::external_cv, k - 1, seed,
                         detail::ascending_rows(schedule, inner_misses,
                                                static_cast<double>(n - nk))};
        const int h_k = select_best_size(inner);
        result.inner_choice.push_back(h_k);

        const LabeledDataset train = data.select_samples(plan.held_in(ko));
        detail::check_two_class_split(train);
        const RfePath path = rfe_path(train, schedule, config);
        outer_misses += detail::count_misses(path.model_at(h_k), data,
                                             blocks[static_cast<std::size_t>(ko)]);
    }
    result.estimate = static_cast<double>(outer_misses) / n;
    return result;
}

// Holdout comparison of §8: both pipelines t-screen to G then RFE down to d;
// "leaky" selects on all samples (test half included), "clean" selects on the
// training half only. Both train the final SVM on the training half.
inline HoldoutRates leaky_holdout(const LabeledDataset& data, double holdout_fraction,
                                  int g_keep, int d, const SvmConfig& config,
                                  std::uint64_t seed) {
    require(holdout_fraction > 0.0 && holdout_fraction < 1.0, "cv_engine",
            "holdout fraction must lie in (0,1)");
    require(g_keep >= 1 && g_keep <= data.p(), "cv_engine", "screen size G out of range");
    const RfeSchedule schedule = rfe_schedule(g_keep).truncated_at(d);
    require(!schedule.sizes.empty() && schedule.sizes.back() == d, "cv_engine",
            "size d not on the RFE schedule for G");

    std::vector<int> holdout_idx, train_idx;
    for (int cls = 1; cls <= data.n_classes(); ++cls) {
        auto members = data.samples_of_class(cls);
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(cls)));
        rng.shuffle(members);
        const auto n_hold = static_cast<std::size_t>(
            std::llround(holdout_fraction * static_cast<double>(members.size())));
        require(n_hold >= 1 && n_hold < members.size(), "cv_engine", "degenerate split");
        for (std::size_t i = 0; i < members.size(); ++i)
            (i < n_hold ? holdout_idx : train_idx).push_back(members[i]);
    }
    std::sort(holdout_idx.begin(), holdout_idx.end());
    std::sort(train_idx.begin(), train_idx.end());
    const LabeledDataset train = data.select_samples(train_idx);
    detail::check_two_class_split(train);

    HoldoutRates rates;
    const double denom = static_cast<double>(holdout_idx.size());

    // Leaky: the holdout samples take part in screening and RFE.
    const GeneSubset leaky_universe = t_screen(data, g_keep);
    const RfePath leaky_path = rfe_path_from(data, leaky_universe, schedule, config);
    const SvmModel leaky_model =
        train_svm(train, leaky_path.subset_at(d).indices, config);
    rates.leaky = detail::count_misses(leaky_model, data, holdout_idx) / denom;

    // Clean: selection restricted to the training half.
    const GeneSubset clean_universe = t_screen(train, g_keep);
    const RfePath clean_path = rfe_path_from(train, clean_universe, schedule, config);
    rates.clean = detail::count_misses(clean_path.model_at(d), data, holdout_idx) / denom;
    return rates;
}

// External CV averaged over R independent fold plans; per-repetition seeds
// derive from (seed, repetition index).
inline ErrorTable repeated_cv(const LabeledDataset& data, int k, const RfeSchedule& schedule,
                              const SvmConfig& config, int reps, std::uint64_t seed) {
    require(reps >= 1, "cv_engine", "repetition count must be at least 1");
    std::vector<double> sums(schedule.sizes.size(), 0.0);
    ErrorTable last;
    for (int r = 0; r < reps; ++r) {
        const FoldPlan plan = make_folds(data, k, derive_seed(seed, static_cast<std::uint64_t>(r)));
        last = external_cv(data, plan, schedule, config);
        for (std::size_t i = 0; i < last.rows.size(); ++i) sums[i] += last.rows[i].rate;
    }
    ErrorTable out;
    out.protocol = Protocol::repeated;
    out.k = k;
    out.seed = seed;
    out.rows.reserve(sums.size());
    for (std::size_t i = 0; i < sums.size(); ++i)
        out.rows.push_back({last.rows[i].d, sums[i] / reps});
    return out;
}

// Delimited table with columns (protocol, K, seed, d, error_rate).
inline void write_error_table(std::ostream& out, const ErrorTable& table) {
    out << "protocol\tK\tseed\td\terror_rate\n";
    for (const auto& row : table.rows)
        out << to_string(table.protocol) << "\t" << table.k << "\t" << table.seed << "\t"
            << row.d << "\t" << detail::fmt_double(row.rate) << "\n";
}

inline void write_error_table(const std::string& path, const ErrorTable& table) {
    std::ofstream out(path);
    require(static_cast<bool>(out), "cv_engine", "cannot write file '" + path + "'");
    write_error_table(out, table);
    require(static_cast<bool>(out), "cv_engine", "write failed for '" + path + "'");
}

} // namespace genecv
