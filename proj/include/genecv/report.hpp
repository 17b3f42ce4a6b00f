#pragma once
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "genecv/cv.hpp"
#include "genecv/dataset.hpp"
#include "genecv/error.hpp"
#include "genecv/folds.hpp"
#include "genecv/selection.hpp"
#include "genecv/svm.hpp"
#include "genecv/synth.hpp"
#include "genecv/version.hpp"

namespace genecv {

// Synthetic input requested inline instead of a file.
struct SynthInput {
    enum class Kind { none, null_data, gaussian };

    Kind kind = Kind::none;
    int p = 0;
    std::vector<int> class_sizes;
    double delta = 0.0;  // class-mean separation along axis 0 (gaussian only)
    double sigma2 = 1.0; // common variance (gaussian only)

    bool operator==(const SynthInput&) const = default;
};

struct RunConfig {
    std::string input_path; // exclusive with synth
    FileLayout layout = FileLayout::rows_are_samples;
    SynthInput synth;
    Protocol protocol = Protocol::external_cv;
    int folds_k = 10;
    int size_d = 0;  // target subset size (leaky-holdout)
    int screen_g = 0; // 0 means no prescreen / all features
    int reps = 10;
    double holdout_fraction = 0.5;
    SvmConfig svm;
    std::uint64_t seed = 0;
    std::string out_dir = ".";

    bool operator==(const RunConfig&) const = default;

    void validate() const {
        const bool has_file = !input_path.empty();
        const bool has_synth = synth.kind != SynthInput::Kind::none;
        require(has_file != has_synth, "runner",
                "exactly one input source required (file or synthetic)");
        if (has_synth) {
            require(synth.p >= 1, "runner", "synthetic p must be at least 1");
            require(synth.class_sizes.size() == 2, "runner",
                    "synthetic data uses two class sizes");
            for (int sz : synth.class_sizes)
                require(sz >= 1, "runner", "class sizes must be positive");
            if (synth.kind == SynthInput::Kind::gaussian)
                require(synth.sigma2 > 0.0, "runner", "sigma2 must be positive");
        }
        svm.validate();
        switch (protocol) {
            case Protocol::apparent:
                break;
            case Protocol::double_cv:
                require(folds_k >= 3, "runner", "double CV needs K >= 3");
                break;
            case Protocol::leaky_holdout:
                require(size_d >= 1, "runner", "leaky-holdout needs a target size d");
                require(holdout_fraction > 0.0 && holdout_fraction < 1.0, "runner",
                        "holdout fraction must lie in (0,1)");
                break;
            case Protocol::screened_internal:
            case Protocol::screened_external:
                require(screen_g >= 1, "runner", "screened protocols need G >= 1");
                require(folds_k >= 2, "runner", "fold count K must be at least 2");
                break;
            case Protocol::repeated:
                require(reps >= 1, "runner", "repetition count must be at least 1");
                require(folds_k >= 2, "runner", "fold count K must be at least 2");
                break;
            default:
                require(folds_k >= 2, "runner", "fold count K must be at least 2");
        }
    }
};

struct DatasetSummary {
    int n = 0;
    int p = 0;
    std::vector<std::string> feature_names;
    std::vector<std::string> class_names;

    bool operator==(const DatasetSummary&) const = default;
};

struct HoldoutOutcome {
    double leaky = 0.0;
    double clean = 0.0;

    bool operator==(const HoldoutOutcome&) const = default;
};

struct RunReport {
    std::string version = kVersion;
    RunConfig config;
    DatasetSummary dataset;
    std::vector<ErrorTable> tables;
    std::optional<DoubleCvResult> double_result;
    std::optional<HoldoutOutcome> holdout;
    std::vector<int> subset_sizes; // schedule sizes logged per fold (descending)
    SubsetLog fold_subsets;        // [fold][size index] -> selected features
    double duration_ms = 0.0;

    bool operator==(const RunReport& o) const {
        return version == o.version && config == o.config && dataset == o.dataset &&
               tables_equal(o) && double_equal(o) && holdout == o.holdout &&
               subset_sizes == o.subset_sizes && subsets_equal(o) &&
               duration_ms == o.duration_ms;
    }

  private:
    bool tables_equal(const RunReport& o) const {
        if (tables.size() != o.tables.size()) return false;
        for (std::size_t i = 0; i < tables.size(); ++i) {
            const auto& a = tables[i];
            const auto& b = o.tables[i];
            if (a.protocol != b.protocol || a.k != b.k || a.seed != b.seed || a.rows != b.rows)
                return false;
        }
        return true;
    }
    bool double_equal(const RunReport& o) const {
        if (double_result.has_value() != o.double_result.has_value()) return false;
        if (!double_result) return true;
        return double_result->estimate == o.double_result->estimate &&
               double_result->inner_choice == o.double_result->inner_choice &&
               double_result->k == o.double_result->k &&
               double_result->seed == o.double_result->seed;
    }
    bool subsets_equal(const RunReport& o) const {
        if (fold_subsets.size() != o.fold_subsets.size()) return false;
        for (std::size_t f = 0; f < fold_subsets.size(); ++f) {
            if (fold_subsets[f].size() != o.fold_subsets[f].size()) return false;
            for (std::size_t s = 0; s < fold_subsets[f].size(); ++s)
                if (fold_subsets[f][s].indices != o.fold_subsets[f][s].indices) return false;
        }
        return true;
    }
};

// --- JSON bindings -----------------------------------------------------

inline void to_json(nlohmann::json& j, const SynthInput& s) {
    const char* kind = s.kind == SynthInput::Kind::none
                           ? "none"
                           : (s.kind == SynthInput::Kind::null_data ? "null" : "gaussian");
    j = {{"kind", kind},         {"p", s.p},           {"class_sizes", s.class_sizes},
         {"delta", s.delta},     {"sigma2", s.sigma2}};
}

inline void from_json(const nlohmann::json& j, SynthInput& s) {
    const std::string kind = j.at("kind");
    s.kind = kind == "none" ? SynthInput::Kind::none
                            : (kind == "null" ? SynthInput::Kind::null_data
                                              : SynthInput::Kind::gaussian);
    j.at("p").get_to(s.p);
    j.at("class_sizes").get_to(s.class_sizes);
    j.at("delta").get_to(s.delta);
    j.at("sigma2").get_to(s.sigma2);
}

inline void to_json(nlohmann::json& j, const RunConfig& c) {
    j = {{"input_path", c.input_path},
         {"layout", c.layout == FileLayout::rows_are_samples ? "rows-are-samples"
                                                             : "rows-are-features"},
         {"synth", c.synth},
         {"protocol", to_string(c.protocol)},
         {"folds", c.folds_k},
         {"size", c.size_d},
         {"screen", c.screen_g},
         {"reps", c.reps},
         {"holdout_fraction", c.holdout_fraction},
         {"cost", c.svm.cost},
         {"tolerance", c.svm.tolerance},
         {"max_passes", c.svm.max_passes},
         {"seed", c.seed},
         {"out_dir", c.out_dir}};
}

inline void from_json(const nlohmann::json& j, RunConfig& c) {
    j.at("input_path").get_to(c.input_path);
    c.layout = j.at("layout") == "rows-are-samples" ? FileLayout::rows_are_samples
                                                    : FileLayout::rows_are_features;
    j.at("synth").get_to(c.synth);
    c.protocol = protocol_from_string(j.at("protocol"));
    j.at("folds").get_to(c.folds_k);
    j.at("size").get_to(c.size_d);
    j.at("screen").get_to(c.screen_g);
    j.at("reps").get_to(c.reps);
    j.at("holdout_fraction").get_to(c.holdout_fraction);
    j.at("cost").get_to(c.svm.cost);
    j.at("tolerance").get_to(c.svm.tolerance);
    j.at("max_passes").get_to(c.svm.max_passes);
    j.at("seed").get_to(c.seed);
    j.at("out_dir").get_to(c.out_dir);
}

inline void to_json(nlohmann::json& j, const ErrorTable& t) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : t.rows) rows.push_back({{"d", r.d}, {"rate", r.rate}});
    j = {{"protocol", to_string(t.protocol)}, {"k", t.k}, {"seed", t.seed}, {"rows", rows}};
}

inline void from_json(const nlohmann::json& j, ErrorTable& t) {
    t.protocol = protocol_from_string(j.at("protocol"));
    j.at("k").get_to(t.k);
    j.at("seed").get_to(t.seed);
    t.rows.clear();
    for (const auto& r : j.at("rows")) t.rows.push_back({r.at("d"), r.at("rate")});
}

inline void to_json(nlohmann::json& j, const RunReport& r) {
    nlohmann::json subsets = nlohmann::json::array();
    for (const auto& fold : r.fold_subsets) {
        nlohmann::json per_size = nlohmann::json::array();
        for (const auto& subset : fold) per_size.push_back(subset.indices);
        subsets.push_back(per_size);
    }
    j = {{"version", r.version},
         {"config", r.config},
         {"dataset",
          {{"n", r.dataset.n},
           {"p", r.dataset.p},
           {"feature_names", r.dataset.feature_names},
           {"class_names", r.dataset.class_names}}},
         {"tables", r.tables},
         {"subset_sizes", r.subset_sizes},
         {"fold_subsets", subsets},
         {"duration_ms", r.duration_ms}};
    if (r.double_result)
        j["double_cv"] = {{"estimate", r.double_result->estimate},
                          {"inner_choice", r.double_result->inner_choice},
                          {"k", r.double_result->k},
                          {"seed", r.double_result->seed}};
    else
        j["double_cv"] = nullptr;
    if (r.holdout)
        j["holdout"] = {{"leaky", r.holdout->leaky}, {"clean", r.holdout->clean}};
    else
        j["holdout"] = nullptr;
}

inline void from_json(const nlohmann::json& j, RunReport& r) {
    j.at("version").get_to(r.version);
    j.at("config").get_to(r.config);
    const auto& d = j.at("dataset");
    d.at("n").get_to(r.dataset.n);
    d.at("p").get_to(r.dataset.p);
    d.at("feature_names").get_to(r.dataset.feature_names);
    d.at("class_names").get_to(r.dataset.class_names);
    r.tables.clear();
    for (const auto& t : j.at("tables")) r.tables.push_back(t.get<ErrorTable>());
    j.at("subset_sizes").get_to(r.subset_sizes);
    r.fold_subsets.clear();
    for (const auto& fold : j.at("fold_subsets")) {
        std::vector<GeneSubset> per_size;
        for (const auto& subset : fold) per_size.push_back({subset.get<std::vector<int>>()});
        r.fold_subsets.push_back(std::move(per_size));
    }
    j.at("duration_ms").get_to(r.duration_ms);
    if (!j.at("double_cv").is_null()) {
        const auto& dc = j.at("double_cv");
        DoubleCvResult res;
        dc.at("estimate").get_to(res.estimate);
        dc.at("inner_choice").get_to(res.inner_choice);
        dc.at("k").get_to(res.k);
        dc.at("seed").get_to(res.seed);
        r.double_result = res;
    } else {
        r.double_result.reset();
    }
    if (!j.at("holdout").is_null()) {
        HoldoutOutcome h;
        j.at("holdout").at("leaky").get_to(h.leaky);
        j.at("holdout").at("clean").get_to(h.clean);
        r.holdout = h;
    } else {
        r.holdout.reset();
    }
}

inline void save_report(const std::string& path, const RunReport& report) {
    std::ofstream out(path);
    require(static_cast<bool>(out), "runner", "cannot write file '" + path + "'");
    out << nlohmann::json(report).dump(2) << "\n";
    require(static_cast<bool>(out), "runner", "write failed for '" + path + "'");
}

inline RunReport load_report(const std::string& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), "runner", "cannot open file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
        return j.get<RunReport>();
    } catch (const nlohmann::json::exception& e) {
        fail("runner", "malformed report '" + path + "': " + e.what());
    }
}

// --- Orchestration ------------------------------------------------------

// For each feature, the number of validation folds whose size-d subset
// contains it. Counts over all p features; they sum to K*d.
inline std::vector<int> marker_frequency(const RunReport& report, int d) {
    const auto it = std::find(report.subset_sizes.begin(), report.subset_sizes.end(), d);
    require(it != report.subset_sizes.end() && !report.fold_subsets.empty(), "runner",
            "size " + std::to_string(d) + " absent from report");
    const std::size_t size_idx =
        static_cast<std::size_t>(it - report.subset_sizes.begin());
    std::vector<int> counts(static_cast<std::size_t>(report.dataset.p), 0);
    for (const auto& fold : report.fold_subsets)
        for (int v : fold[size_idx].indices) ++counts[static_cast<std::size_t>(v)];
    return counts;
}

namespace detail {

// Substream layout under the master seed: 1 = synthetic data draw,
// 2 = fold plan, 3 = protocol-internal randomness.
inline LabeledDataset materialize_input(const RunConfig& cfg) {
    if (!cfg.input_path.empty()) return load_dataset(cfg.input_path, cfg.layout);
    const std::uint64_t data_seed = derive_seed(cfg.seed, 1);
    const int n = cfg.synth.class_sizes[0] + cfg.synth.class_sizes[1];
    if (cfg.synth.kind == SynthInput::Kind::null_data)
        return synth_null(n, cfg.synth.p, cfg.synth.class_sizes, data_seed);
    return synth_gaussian(two_gaussian_spec(cfg.synth.p, cfg.synth.delta, cfg.synth.sigma2,
                                            cfg.synth.class_sizes[0], cfg.synth.class_sizes[1],
                                            data_seed));
}

} // namespace detail

inline RunReport run_experiment(const RunConfig& config) {
    config.validate();
    const auto t0 = std::chrono::steady_clock::now();

    const LabeledDataset data = detail::materialize_input(config);
    RunReport report;
    report.config = config;
    report.dataset = {data.n(), data.p(), data.feature_names, data.class_names};

    const std::uint64_t fold_seed = derive_seed(config.seed, 2);
    const std::uint64_t proto_seed = derive_seed(config.seed, 3);
    const int g_keep = config.screen_g > 0 ? config.screen_g : data.p();
    const RfeSchedule schedule = (config.protocol == Protocol::screened_internal ||
                                  config.protocol == Protocol::screened_external)
                                     ? rfe_schedule(g_keep)
                                     : rfe_schedule(data.p());

    switch (config.protocol) {
        case Protocol::apparent: {
            const RfePath path = rfe_path(data, schedule, config.svm);
            ErrorTable table{Protocol::apparent, 0, config.seed, {}};
            for (std::size_t i = schedule.sizes.size(); i-- > 0;) {
                const int d = schedule.sizes[i];
                table.rows.push_back({d, apparent_error(data, path.subset_at(d), config.svm)});
            }
            report.tables.push_back(std::move(table));
            break;
        }
        case Protocol::internal_cv: {
            const FoldPlan folds = make_folds(data, config.folds_k, fold_seed);
            report.tables.push_back(internal_cv_table(data, folds, schedule, config.svm));
            break;
        }
        case Protocol::external_cv: {
            const FoldPlan folds = make_folds(data, config.folds_k, fold_seed);
            report.subset_sizes = schedule.sizes;
            report.tables.push_back(
                external_cv(data, folds, schedule, config.svm, &report.fold_subsets));
            break;
        }
        case Protocol::screened_internal: {
            const FoldPlan folds = make_folds(data, config.folds_k, fold_seed);
            report.subset_sizes = schedule.sizes;
            report.tables.push_back(screened_internal_cv(data, g_keep, folds, schedule,
                                                         config.svm, &report.fold_subsets));
            break;
        }
        case Protocol::screened_external: {
            const FoldPlan folds = make_folds(data, config.folds_k, fold_seed);
            report.subset_sizes = schedule.sizes;
            report.tables.push_back(screened_external_cv(data, g_keep, folds, schedule,
                                                         config.svm, &report.fold_subsets));
            break;
        }
        case Protocol::double_cv:
            report.double_result =
                double_cv(data, config.folds_k, schedule, config.svm, proto_seed);
            break;
        case Protocol::leaky_holdout: {
            const HoldoutRates rates = leaky_holdout(data, config.holdout_fraction, g_keep,
                                                     config.size_d, config.svm, proto_seed);
            report.holdout = HoldoutOutcome{rates.leaky, rates.clean};
            break;
        }
        case Protocol::repeated:
            report.tables.push_back(
                repeated_cv(data, config.folds_k, schedule, config.svm, config.reps, proto_seed));
            break;
    }

    report.duration_ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - t0)
                             .count();

    namespace fs = std::filesystem;
    fs::create_directories(config.out_dir);
    for (const auto& table : report.tables)
        write_error_table((fs::path(config.out_dir) /
                           (to_string(table.protocol) + "_table.tsv")).string(),
                          table);
    if (report.holdout) {
        std::ofstream out(fs::path(config.out_dir) / "holdout.tsv");
        require(static_cast<bool>(out), "runner", "cannot write holdout table");
        out << "pipeline\td\terror_rate\n";
        out << "leaky\t" << config.size_d << "\t" << detail::fmt_double(report.holdout->leaky)
            << "\n";
        out << "clean\t" << config.size_d << "\t" << detail::fmt_double(report.holdout->clean)
            << "\n";
    }
    if (report.double_result) {
        std::ofstream out(fs::path(config.out_dir) / "double_cv.tsv");
        require(static_cast<bool>(out), "runner", "cannot write double CV table");
        out << "K\tseed\testimate\tinner_choices\n";
        out << report.double_result->k << "\t" << report.double_result->seed << "\t"
            << detail::fmt_double(report.double_result->estimate) << "\t";
        for (std::size_t i = 0; i < report.double_result->inner_choice.size(); ++i)
            out << (i ? "," : "") << report.double_result->inner_choice[i];
        out << "\n";
    }
    save_report((fs::path(config.out_dir) / "report.json").string(), report);
    return report;
}

} // namespace genecv
