// Command-line front end: generate synthetic datasets, run an estimation
// protocol, or re-render the tables of a saved report.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "genecv/genecv.hpp"

namespace {

struct GenerateArgs {
    std::string kind = "null";
    int n1 = 20;
    int n2 = 20;
    int p = 100;
    double delta = 0.0;
    double sigma2 = 1.0;
    std::uint64_t seed = 0;
    std::string out = "dataset.tsv";
};

int run_generate(const GenerateArgs& args) {
    genecv::LabeledDataset data;
    if (args.kind == "null") {
        data = genecv::synth_null(args.n1 + args.n2, args.p, {args.n1, args.n2}, args.seed);
    } else {
        data = genecv::synth_gaussian(genecv::two_gaussian_spec(
            args.p, args.delta, args.sigma2, args.n1, args.n2, args.seed));
    }
    genecv::save_dataset(args.out, data);
    std::cout << "wrote " << args.out << " (" << data.n() << " samples, " << data.p()
              << " features)\n";
    return 0;
}

// Mutable view of everything the `run` subcommand can set, shared by the
// config-file parser and the command-line flags (flags win).
struct RunArgs {
    genecv::RunConfig cfg;
    std::string protocol = "external";
    std::string layout = "rows-are-samples";
    std::string synth_kind = "none";
    int synth_n1 = 20;
    int synth_n2 = 20;
};

template <typename T>
T parse_value(const std::string& key, const std::string& value) {
    T out{};
    std::istringstream stream(value);
    stream >> out;
    if (stream.fail() || !stream.eof())
        genecv::fail("runner", "bad value '" + value + "' for config key '" + key + "'");
    return out;
}

// key=value lines; blank lines and '#' comments ignored.
void apply_config_file(const std::string& path, RunArgs& args) {
    std::ifstream in(path);
    genecv::require(static_cast<bool>(in), "runner", "cannot open config file '" + path + "'");
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        genecv::require(eq != std::string::npos, "runner",
                        "config line is not key=value: '" + line + "'");
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        if (key == "input") args.cfg.input_path = value;
        else if (key == "layout") args.layout = value;
        else if (key == "synth") args.synth_kind = value;
        else if (key == "n1") args.synth_n1 = parse_value<int>(key, value);
        else if (key == "n2") args.synth_n2 = parse_value<int>(key, value);
        else if (key == "p") args.cfg.synth.p = parse_value<int>(key, value);
        else if (key == "delta") args.cfg.synth.delta = parse_value<double>(key, value);
        else if (key == "sigma2") args.cfg.synth.sigma2 = parse_value<double>(key, value);
        else if (key == "protocol") args.protocol = value;
        else if (key == "folds") args.cfg.folds_k = parse_value<int>(key, value);
        else if (key == "size") args.cfg.size_d = parse_value<int>(key, value);
        else if (key == "screen") args.cfg.screen_g = parse_value<int>(key, value);
        else if (key == "reps") args.cfg.reps = parse_value<int>(key, value);
        else if (key == "holdout_fraction")
            args.cfg.holdout_fraction = parse_value<double>(key, value);
        else if (key == "cost") args.cfg.svm.cost = parse_value<double>(key, value);
        else if (key == "tolerance") args.cfg.svm.tolerance = parse_value<double>(key, value);
        else if (key == "max_passes") args.cfg.svm.max_passes = parse_value<int>(key, value);
        else if (key == "seed") args.cfg.seed = parse_value<std::uint64_t>(key, value);
        else if (key == "out") args.cfg.out_dir = value;
        else genecv::fail("runner", "unknown config key '" + key + "'");
    }
}

void render_report(const genecv::RunReport& report, std::ostream& out) {
    out << "genecv report (version " << report.version << ")\n";
    out << "protocol: " << genecv::to_string(report.config.protocol) << "  n=" << report.dataset.n
        << "  p=" << report.dataset.p << "  seed=" << report.config.seed << "\n";
    out << "duration_ms: " << report.duration_ms << "\n";
    for (const auto& table : report.tables) {
        out << "\n";
        genecv::write_error_table(out, table);
        out << "best size: " << genecv::select_best_size(table) << "\n";
    }
    if (report.double_result) {
        out << "\ndouble CV estimate: " << report.double_result->estimate << " (K="
            << report.double_result->k << ")\ninner choices:";
        for (int h : report.double_result->inner_choice) out << " " << h;
        out << "\n";
    }
    if (report.holdout) {
        out << "\nleaky holdout rate: " << report.holdout->leaky << "\n";
        out << "clean holdout rate: " << report.holdout->clean << "\n";
    }
    if (!report.fold_subsets.empty()) {
        const int d = report.subset_sizes.back();
        const auto counts = genecv::marker_frequency(report, d);
        out << "\nmarker genes at d=" << d << " (fold frequency):\n";
        for (std::size_t v = 0; v < counts.size(); ++v)
            if (counts[v] > 0)
                out << "  " << report.dataset.feature_names[v] << "\t" << counts[v] << "\n";
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cross-validated error estimation for SVM-RFE gene selection"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "Write a synthetic dataset");
    generate->add_option("--kind", gen.kind, "null or gaussian")
        ->check(CLI::IsMember({"null", "gaussian"}));
    generate->add_option("--n1", gen.n1, "class-1 sample count");
    generate->add_option("--n2", gen.n2, "class-2 sample count");
    generate->add_option("--p", gen.p, "feature count");
    generate->add_option("--delta", gen.delta, "class-mean separation along axis 1");
    generate->add_option("--sigma2", gen.sigma2, "common variance");
    generate->add_option("--seed", gen.seed, "generator seed");
    generate->add_option("-o,--out", gen.out, "output file");

    RunArgs args;
    std::string config_path;
    auto* run = app.add_subcommand("run", "Execute an estimation protocol");
    run->add_option("--config", config_path,
                    "plain-text key=value configuration file; flags override it");
    run->add_option("--input", args.cfg.input_path, "dataset file (exclusive with --synth)");
    run->add_option("--layout", args.layout, "rows-are-samples or rows-are-features")
        ->check(CLI::IsMember({"rows-are-samples", "rows-are-features"}));
    run->add_option("--synth", args.synth_kind, "inline synthetic input: null or gaussian")
        ->check(CLI::IsMember({"none", "null", "gaussian"}));
    run->add_option("--n1", args.synth_n1, "synthetic class-1 size");
    run->add_option("--n2", args.synth_n2, "synthetic class-2 size");
    run->add_option("--p", args.cfg.synth.p, "synthetic feature count");
    run->add_option("--delta", args.cfg.synth.delta, "synthetic class separation");
    run->add_option("--sigma2", args.cfg.synth.sigma2, "synthetic common variance");
    run->add_option("--protocol", args.protocol, "estimation protocol")
        ->check(CLI::IsMember({"apparent", "internal", "external", "double",
                               "screened-internal", "screened-external", "leaky-holdout",
                               "repeated"}));
    run->add_option("--folds", args.cfg.folds_k, "fold count K");
    run->add_option("--size", args.cfg.size_d, "target subset size d");
    run->add_option("--screen", args.cfg.screen_g, "prescreen size G (0 = all)");
    run->add_option("--reps", args.cfg.reps, "repetition count R");
    run->add_option("--holdout-fraction", args.cfg.holdout_fraction, "holdout fraction");
    run->add_option("--cost", args.cfg.svm.cost, "SVM soft-margin cost C");
    run->add_option("--tolerance", args.cfg.svm.tolerance, "SVM duality-gap tolerance");
    run->add_option("--max-passes", args.cfg.svm.max_passes, "SVM solver sweep cap");
    run->add_option("--seed", args.cfg.seed, "master seed");
    run->add_option("--out", args.cfg.out_dir, "output directory")
        ->envname("GENECV_OUT");

    std::string report_path;
    std::string report_out;
    auto* report_cmd = app.add_subcommand("report", "Re-render tables from a saved report");
    report_cmd->add_option("--input", report_path, "report.json produced by run")->required();
    report_cmd->add_option("--out", report_out, "directory for re-rendered tables")
        ->envname("GENECV_OUT");

    // The config file must land before flag parsing so that flags override
    // it; pick the path straight from argv.
    try {
        for (int i = 1; i < argc; ++i) {
            const std::string arg = argv[i];
            if (arg == "--config" && i + 1 < argc)
                apply_config_file(argv[i + 1], args);
            else if (arg.rfind("--config=", 0) == 0)
                apply_config_file(arg.substr(9), args);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed()) return run_generate(gen);
        if (run->parsed()) {
            auto& cfg = args.cfg;
            cfg.protocol = genecv::protocol_from_string(args.protocol);
            cfg.layout = args.layout == "rows-are-samples"
                             ? genecv::FileLayout::rows_are_samples
                             : genecv::FileLayout::rows_are_features;
            if (args.synth_kind != "none") {
                cfg.synth.kind = args.synth_kind == "null"
                                     ? genecv::SynthInput::Kind::null_data
                                     : genecv::SynthInput::Kind::gaussian;
                cfg.synth.class_sizes = {args.synth_n1, args.synth_n2};
            }
            const genecv::RunReport report = genecv::run_experiment(cfg);
            render_report(report, std::cout);
            std::cout << "\nreport written to " << cfg.out_dir << "/report.json\n";
            return 0;
        }
        const genecv::RunReport report = genecv::load_report(report_path);
        if (report_out.empty()) {
            render_report(report, std::cout);
        } else {
            std::filesystem::create_directories(report_out);
            for (const auto& table : report.tables)
                genecv::write_error_table(
                    (std::filesystem::path(report_out) /
                     (genecv::to_string(table.protocol) + "_table.tsv")).string(),
                    table);
            std::cout << "tables written to " << report_out << "\n";
        }
        return 0;
    } catch (const genecv::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
