// femtoq: run single episodes, figure sweeps, trace reports and the oracle
// suite from the command line.

#include "femtoq/acceptance.hpp"
#include "femtoq/config_io.hpp"
#include "femtoq/metrics.hpp"
#include "femtoq/sweep.hpp"
#include "femtoq/trace_io.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kOutputEnv = "FEMTOQ_OUTPUT_DIR";

std::string default_output_dir()
{
    const char* env = std::getenv(kOutputEnv);
    return env && *env ? env : "femtoq-out";
}

json load_json(const std::string& path)
{
    try {
        return json::parse(femtoq::read_file(path));
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
}

void write_file(const fs::path& path, const std::string& text)
{
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    os << text;
    if (!os) throw std::runtime_error("cannot write " + path.string());
}

json summary_json(const femtoq::RunSummary& s)
{
    json j{{"aggregate_femto_capacity", s.aggregate_femto_capacity},
           {"jain_index", s.jain_index},
           {"converged", s.converged},
           {"terminal_deviation", s.terminal_deviation},
           {"shared_entries", s.shared_entries}};
    j["convergence_iteration"] = s.converged ? json(s.convergence_iteration) : json(nullptr);
    return j;
}

struct RunOptions {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> stop_at;
    std::string resume;
};

int cmd_run(const RunOptions& o)
{
    std::optional<femtoq::Episode> episode;
    if (!o.resume.empty()) {
        episode.emplace(femtoq::Episode::restore(femtoq::read_file(o.resume)));
    } else {
        femtoq::SimConfig cfg;
        if (!o.config.empty()) {
            cfg = femtoq::sim_config_from_json(load_json(o.config), fs::path(o.config).parent_path().string());
        }
        if (o.seed) cfg.rng_seed = *o.seed;
        cfg.validate();
        episode.emplace(cfg);
    }
    auto& ep = *episode;
    const auto& cfg = ep.config();
    const std::size_t first = ep.iteration();
    const std::size_t stop = o.stop_at ? std::min(*o.stop_at, cfg.q_iterations) : cfg.q_iterations;
    if (stop < first) throw std::invalid_argument("--stop-at is before the checkpointed iteration");

    femtoq::RunTrace trace;
    trace.n_femto = cfg.n_femto;
    trace.n_sub = cfg.n_sub;
    while (ep.iteration() < stop) trace.iterations.push_back(ep.step());

    const fs::path dir = o.out;
    fs::create_directories(dir);
    const std::string csv = femtoq::trace_to_csv(trace, first);
    write_file(dir / "trace.csv", csv);

    json out{{"schema_version", 1},
             {"config", femtoq::to_json(cfg)},
             {"config_digest", femtoq::git_blob_digest(femtoq::to_json(cfg).dump())},
             {"seed", cfg.rng_seed},
             {"first_iteration", first},
             {"iterations", trace.size()},
             {"trace_digest", femtoq::git_blob_digest(csv)}};
    if (!ep.finished()) {
        write_file(dir / "checkpoint.json", ep.checkpoint());
        out["checkpoint"] = "checkpoint.json";
        std::cout << "paused at iteration " << ep.iteration() << "; resume with --resume "
                  << (dir / "checkpoint.json").string() << "\n";
    } else if (first == 0) {
        // Summary metrics need the whole episode.
        const auto summary = femtoq::summarize(trace, cfg.reward.target_capacity);
        out["summary"] = summary_json(summary);
        std::cout << "aggregate femto capacity " << summary.aggregate_femto_capacity << ", Jain "
                  << summary.jain_index << ", terminal deviation " << summary.terminal_deviation << "\n";
    }
    write_file(dir / "run.json", out.dump(2) + "\n");
    std::cout << "wrote " << (dir / "trace.csv").string() << "\n";
    return 0;
}

struct SweepOptions {
    std::string config;
    std::string out;
    std::optional<std::size_t> threads;
    std::optional<std::size_t> seeds;
    bool traces = false;
    bool check = false;
    bool acceptance = false;
};

int cmd_sweep(const SweepOptions& o)
{
    femtoq::SweepSpec spec = o.acceptance ? femtoq::acceptance::criteria_sweep_spec() : femtoq::SweepSpec{};
    if (!o.config.empty()) {
        spec = femtoq::sweep_spec_from_json(load_json(o.config), fs::path(o.config).parent_path().string());
    }
    if (o.threads) spec.threads = *o.threads;
    if (o.seeds) spec.seeds = *o.seeds;
    if (o.traces) spec.write_traces = true;
    if (!o.out.empty() || spec.output_dir.empty()) spec.output_dir = o.out.empty() ? default_output_dir() : o.out;
    spec.validate();

    const auto result = femtoq::run_sweep(spec);
    const auto files = femtoq::write_sweep_outputs(result, spec.output_dir);
    std::cout << result.runs.size() << " runs, " << result.failures() << " failed; wrote";
    for (const auto& f : files) std::cout << ' ' << f;
    std::cout << " to " << spec.output_dir << "\n";
    for (const auto& r : result.runs) {
        if (!r.ok) std::cerr << "failed: " << r.variant.label() << " N=" << r.n_femto << " seed " << r.seed << ": " << r.error << "\n";
    }
    if (!o.check) return 0;

    bool ok = result.failures() == 0;
    std::size_t evaluated = 0;
    for (const auto& c : femtoq::acceptance::sweep_criteria(result)) {
        std::cout << femtoq::acceptance::format(c) << "\n";
        if (c.evaluated) {
            ++evaluated;
            ok = ok && c.pass;
        }
    }
    if (evaluated == 0) std::cout << "no criteria apply to this sweep\n";
    return ok ? 0 : 1;
}

int cmd_report(const std::vector<std::string>& traces, double target, const std::string& out)
{
    json all = json::array();
    for (const auto& path : traces) {
        std::ifstream is(path, std::ios::binary);
        if (!is) throw std::runtime_error("cannot open " + path);
        const auto trace = femtoq::read_trace_csv(is);
        if (trace.size() == 0) throw std::runtime_error(path + ": empty trace");
        const auto summary = femtoq::summarize(trace, target);
        json j{{"trace", path},
               {"n_femto", trace.n_femto},
               {"n_sub", trace.n_sub},
               {"iterations", trace.size()},
               {"summary", summary_json(summary)},
               {"tail_deviation_per_subcarrier",
                femtoq::macro_deviation(trace, target, femtoq::tail_window(trace.size()))},
               {"mean_femto_capacity", femtoq::mean_femto_capacity(trace, femtoq::tail_window(trace.size()))},
               {"trace_digest", femtoq::git_blob_digest(femtoq::read_file(path))}};
        all.push_back(std::move(j));
    }
    const std::string text = all.dump(2) + "\n";
    if (out.empty()) {
        std::cout << text;
    } else {
        write_file(out, text);
        std::cout << "wrote " << out << "\n";
    }
    return 0;
}

int cmd_oracle(std::size_t seeds, double exponent, bool check)
{
    namespace acc = femtoq::acceptance;
    std::size_t passed = 0;
    for (const auto& r : acc::oracle_runs(seeds, exponent)) {
        std::cout << "seed " << r.seed << ": policy " << (r.policy_match ? "match" : "differs") << ", V error "
                  << 100.0 * r.relative_value_error << "% " << (r.pass() ? "ok" : "out of tolerance") << "\n";
        passed += r.pass() ? 1 : 0;
    }
    const bool ok = acc::enough(passed, seeds, acc::kOracleRequired);
    std::cout << passed << "/" << seeds << " seeds recovered the optimal policy within "
              << 100.0 * acc::kOracleValueTolerance << "% of V*\n";
    return check && !ok ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Distributed Q-learning power control for femtocell networks"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "femtoq 0.1.0");

    RunOptions run;
    auto* run_cmd = app.add_subcommand("run", "Run one episode and write its trace");
    run_cmd->add_option("-c,--config", run.config, "SimConfig JSON file")->check(CLI::ExistingFile);
    run_cmd->add_option("-o,--out", run.out, "Output directory (default $FEMTOQ_OUTPUT_DIR or femtoq-out)");
    run_cmd->add_option("--seed", run.seed, "Override rng_seed");
    run_cmd->add_option("--stop-at", run.stop_at, "Pause after this many iterations and write a checkpoint");
    run_cmd->add_option("--resume", run.resume, "Continue from a checkpoint file")
        ->check(CLI::ExistingFile)
        ->excludes("--config")
        ->excludes("--seed");

    SweepOptions sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "Run a parameter sweep and write figure datasets");
    sweep_cmd->add_option("-c,--config", sweep.config, "SweepSpec JSON file")->check(CLI::ExistingFile);
    sweep_cmd->add_option("-o,--out", sweep.out, "Output directory (default: spec, then $FEMTOQ_OUTPUT_DIR)");
    sweep_cmd->add_option("--threads", sweep.threads, "Worker threads (0 = all cores)");
    sweep_cmd->add_option("--seeds", sweep.seeds, "Seeds per point");
    sweep_cmd->add_flag("--traces", sweep.traces, "Also write every episode trace");
    sweep_cmd->add_flag("--acceptance", sweep.acceptance, "Use the built-in acceptance sweep")->excludes("--config");
    sweep_cmd->add_flag("--check", sweep.check, "Evaluate the acceptance criteria; exit 1 on any failure");

    std::vector<std::string> traces;
    double target = 6.0;
    std::string report_out;
    auto* report_cmd = app.add_subcommand("report", "Recompute metrics from stored trace CSVs");
    report_cmd->add_option("traces", traces, "Trace CSV files")->required()->check(CLI::ExistingFile);
    report_cmd->add_option("--target", target, "Macro target capacity, bits/s/Hz")->capture_default_str();
    report_cmd->add_option("-o,--out", report_out, "Write the report JSON here instead of stdout");

    std::size_t oracle_seeds = femtoq::acceptance::kSeeds;
    double exponent = femtoq::acceptance::kOracleRateExponent;
    bool oracle_check = false;
    auto* oracle_cmd = app.add_subcommand("oracle-check", "Q-learning against value iteration on random MDPs");
    oracle_cmd->add_option("--seeds", oracle_seeds, "Number of random MDPs")->capture_default_str()->check(CLI::PositiveNumber);
    oracle_cmd->add_option("--rate-exponent", exponent, "alpha = (1 + visits)^-exponent")->capture_default_str();
    oracle_cmd->add_flag("--check", oracle_check, "Exit 1 unless at least 9 in 10 seeds pass");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) {
            if (run.out.empty()) run.out = default_output_dir();
            return cmd_run(run);
        }
        if (*sweep_cmd) return cmd_sweep(sweep);
        if (*report_cmd) return cmd_report(traces, target, report_out);
        if (*oracle_cmd) return cmd_oracle(oracle_seeds, exponent, oracle_check);
    } catch (const std::exception& e) {
        std::cerr << "femtoq: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
