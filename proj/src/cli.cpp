#include "t2fnn/cli.hpp"

#include "t2fnn/config.hpp"
#include "t2fnn/csv.hpp"
#include "t2fnn/errors.hpp"
#include "t2fnn/harness.hpp"
#include "t2fnn/kernels.hpp"
#include "t2fnn/plants.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace t2fnn {
namespace {

struct CommonOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::optional<std::string> learner;
    std::optional<std::size_t> epochs;
    std::optional<std::size_t> runs;
    std::optional<std::string> plant;
    std::optional<std::size_t> threads;
    std::optional<double> constant_input;
    std::vector<std::string> overrides;
};

void add_common(CLI::App& cmd, CommonOptions& o, bool with_learner) {
    cmd.add_option("--config", o.config_path, "Experiment manifest (dotted key = value)");
    cmd.add_option("--seed", o.seed, "Base seed; run r uses seed + r");
    cmd.add_option("--out-dir", o.out_dir, "Output directory (default: $T2FNN_OUT_DIR or ./out)");
    if (with_learner)
        cmd.add_option("--learner", o.learner, "smc | gd | none");
    cmd.add_option("--epochs", o.epochs, "Training epochs");
    cmd.add_option("--runs", o.runs, "Independent runs");
    cmd.add_option("--plant", o.plant, "ex1 (non-BIBO) | ex2 (time-varying)");
    cmd.add_option("--threads", o.threads, "Worker threads across runs");
    cmd.add_option("--constant-input", o.constant_input, "Drive the plant with a constant input instead");
    cmd.add_option("--set", o.overrides, "Extra key=value override, repeatable");
}

ExperimentConfig resolve_config(const CommonOptions& o) {
    ExperimentConfig c = o.config_path.empty() ? ExperimentConfig{} : load_config_file(o.config_path);
    if (o.plant)
        apply_config_value(c, "plant", *o.plant);
    if (o.learner)
        apply_config_value(c, "learner", *o.learner);
    if (o.seed)
        c.seed = *o.seed;
    if (o.epochs)
        c.epochs = *o.epochs;
    if (o.runs)
        c.runs = *o.runs;
    if (o.threads)
        c.threads = *o.threads;
    if (o.constant_input)
        c.constant_input = *o.constant_input;
    for (const auto& kv : o.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw ParseError("--set expects key=value", 0, kv);
        apply_config_value(c, kv.substr(0, eq), kv.substr(eq + 1));
    }
    c.validate();
    return c;
}

std::filesystem::path out_dir(const CommonOptions& o) {
    if (!o.out_dir.empty())
        return o.out_dir;
    if (const char* env = std::getenv("T2FNN_OUT_DIR"); env != nullptr && *env != '\0')
        return env;
    return "out";
}

std::ofstream open_out(const std::filesystem::path& p) {
    std::filesystem::create_directories(p.parent_path());
    std::ofstream f(p, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot open " + p.string() + " for writing");
    f.imbue(std::locale::classic());
    return f;
}

int simulate_plant(const CommonOptions& o, std::optional<std::int64_t> steps) {
    const ExperimentConfig c = resolve_config(o);
    const auto n = steps.value_or(static_cast<std::int64_t>(c.horizon() * c.epochs));
    const auto path = out_dir(o) / "plant_trace.csv";
    std::vector<PlantSample> samples;
    Plant plant(c.plant_options());
    samples.reserve(static_cast<std::size_t>(n));
    int code = kExitOk;
    try {
        for (std::int64_t k = 0; k < n; ++k) {
            const double u = plant.next_input();
            const double y = plant.step();
            samples.push_back({k, static_cast<double>(k) * c.sample_period, u, y});
        }
    } catch (const Diverged& e) {
        std::cerr << "t2fnn: " << e.what() << '\n';
        code = kExitDiverged;
    }
    auto f = open_out(path);
    write_plant_trace(f, samples);
    std::cout << "wrote " << samples.size() << " samples to " << path.string() << '\n';
    return code;
}

void print_report(const ExperimentReport& r) {
    std::cout << learner_name(r.config.learner) << " on " << plant_name(r.config.plant) << ": train RMSE "
              << format_double(r.train.mean) << " +- " << format_double(r.train.std) << ", test RMSE "
              << format_double(r.test.mean) << " +- " << format_double(r.test.std) << ", frozen RMSE "
              << format_double(r.frozen.mean) << " (" << r.config.runs - r.failed_runs << "/" << r.config.runs
              << " runs, " << r.wall_seconds << " s, kernels " << simd::isa_name(simd::active_isa()) << ")\n";
}

int identify(const CommonOptions& o, const std::string& checkpoint) {
    const ExperimentConfig c = resolve_config(o);
    const ExperimentReport report = run_experiment(c);
    const auto dir = out_dir(o);
    write_report_files(dir, report);
    {
        auto f = open_out(dir / "config.txt");
        f << serialize_config(c);
    }
    if (!checkpoint.empty() && !report.runs.front().failed) {
        auto f = open_out(checkpoint);
        f << serialize_network(report.runs.front().final_network);
    }
    print_report(report);
    return kExitOk;
}

int compare(const CommonOptions& o) {
    ExperimentConfig c = resolve_config(o);
    std::vector<ExperimentReport> reports;
    const auto dir = out_dir(o);
    for (const LearnerKind kind : {LearnerKind::smc, LearnerKind::gd}) {
        c.learner = kind;
        reports.push_back(run_experiment(c));
        write_report_files(dir / std::string(learner_name(kind)), reports.back());
        print_report(reports.back());
    }
    auto f = open_out(dir / "compare.csv");
    write_compare(f, reports);
    return kExitOk;
}

} // namespace

int run_cli(const std::vector<std::string>& argv) {
    CLI::App app{"Interval type-2 TSK fuzzy network identification with sliding-mode learning", "t2fnn"};
    app.require_subcommand(1);

    CommonOptions sim_opts, id_opts, cmp_opts;
    std::optional<std::int64_t> steps;
    std::string checkpoint;

    auto* sim = app.add_subcommand("simulate-plant", "Simulate a benchmark plant and write plant_trace.csv");
    add_common(*sim, sim_opts, false);
    sim->add_option("--steps", steps, "Number of samples (default: horizon * epochs)");

    auto* id = app.add_subcommand("identify", "Train the network online; write trace/epochs/summary CSVs");
    add_common(*id, id_opts, true);
    id->add_option("--checkpoint", checkpoint, "Write run 0's final network to this file");

    auto* cmp = app.add_subcommand("compare", "Run SMC and GD on identical seeds; write compare.csv");
    add_common(*cmp, cmp_opts, false);

    std::vector<std::string> args(argv.size() > 1 ? argv.begin() + 1 : argv.end(), argv.end());
    std::reverse(args.begin(), args.end()); // CLI11 consumes a reversed vector
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (sim->parsed())
            return simulate_plant(sim_opts, steps);
        if (id->parsed())
            return identify(id_opts, checkpoint);
        return compare(cmp_opts);
    } catch (const ParseError& e) {
        std::cerr << "t2fnn: config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ValidationError& e) {
        std::cerr << "t2fnn: invalid configuration: " << e.what() << '\n';
        return kExitUsage;
    } catch (const RunFailure& e) {
        std::cerr << "t2fnn: " << e.what() << '\n';
        switch (e.cause()) {
        case RunFailure::Cause::diverged:
            return kExitDiverged;
        case RunFailure::Cause::non_finite:
            return kExitNonFinite;
        default:
            return kExitInternal;
        }
    } catch (const Diverged& e) {
        std::cerr << "t2fnn: " << e.what() << '\n';
        return kExitDiverged;
    } catch (const NonFiniteUpdate& e) {
        std::cerr << "t2fnn: " << e.what() << '\n';
        return kExitNonFinite;
    } catch (const std::exception& e) {
        std::cerr << "t2fnn: error: " << e.what() << '\n';
        return kExitInternal;
    }
}

} // namespace t2fnn
