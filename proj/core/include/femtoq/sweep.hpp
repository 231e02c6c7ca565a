#pragma once

// Batch runs over (femtocell count x paradigm x reward x seed), aggregated
// into plot-ready datasets. Runs execute on a worker pool; results are stored
// by index, so outputs do not depend on the thread count.

#include "femtoq/sim_harness.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace femtoq {

struct Variant {
    Paradigm paradigm = Paradigm::IL;
    RewardSpec reward;

    /// e.g. "RF2(K=80)-IL".
    std::string label() const;
    bool operator==(const Variant&) const = default;
};

struct SweepSpec {
    SimConfig base;
    std::vector<std::size_t> n_femto{4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15};
    std::vector<Paradigm> paradigms{Paradigm::IL, Paradigm::CL};
    std::vector<RewardSpec> rewards{
        {RewardKind::RF1, 6.0, 80.0},    {RewardKind::RF2, 6.0, 80.0}, {RewardKind::RF2, 6.0, 1000.0},
        {RewardKind::RF2, 6.0, 10000.0}, {RewardKind::RF3, 6.0, 80.0},
    };
    std::size_t seeds = 10;
    /// Run s of a point uses rng_seed = first_seed + s, so every variant at a
    /// given seed sees the same layout.
    std::uint64_t first_seed = 1;
    std::size_t plot_stride = 10;
    /// Worker count; 0 picks the hardware concurrency. Does not affect output.
    std::size_t threads = 0;
    /// Also write every per-episode trace CSV.
    bool write_traces = false;
    std::string output_dir;

    void validate() const;
    /// paradigms x rewards, paradigm-major.
    std::vector<Variant> variants() const;
};

nlohmann::json to_json(const SweepSpec& spec);
SweepSpec sweep_spec_from_json(const nlohmann::json& j, const std::string& base_dir = ".");

struct SweepRun {
    std::size_t n_femto = 0;
    Variant variant;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    RunSummary summary;
    /// Git blob id of the trace CSV.
    std::string trace_digest;
    /// C_o on subcarrier 0 at full resolution.
    std::vector<double> macro_trace;
    /// Mean |C_o - target| per subcarrier over the final 10% of iterations.
    std::vector<double> tail_deviation;
    /// Wall time of the episode; informational, never written out.
    double seconds = 0.0;
};

struct SeriesPoint {
    double x = 0.0;
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation, 0 for one value
    std::size_t count = 0;
};

struct Series {
    std::string label;
    std::vector<SeriesPoint> points;
};

struct FigureDataset {
    std::string id;
    std::string x_name;
    std::string y_name;
    std::vector<Series> series;

    const Series* find(std::string_view label) const;
};

struct SweepResult {
    SweepSpec spec;
    std::vector<SweepRun> runs;  // point-major, seed-minor
    std::vector<FigureDataset> datasets;

    std::size_t failures() const;
    /// Successful runs for one point, in seed order.
    std::vector<const SweepRun*> point(std::size_t n_femto, const Variant& v) const;
};

using EpisodeRunner = std::function<RunTrace(const SimConfig&)>;

/// Runs every point and seed. A run that throws is recorded with ok = false
/// and excluded from the aggregates; the sweep carries on.
SweepResult run_sweep(const SweepSpec& spec, const EpisodeRunner& runner = run_episode);

/// "capacity" and "fairness" always. The named subsets come out whenever the
/// sweep covers all their series:
///   fig2   C_o trace at N = 4, RF1-IL against each RF2-IL offset
///   fig3   capacity, RF1-IL / RF2(K=80)-IL / RF3-IL
///   fig5   fairness, same series as fig3
///   fig7   capacity, RF1-IL / RF3-IL / RF3-CL
///   fig9   fairness, same series as fig7
///   fig11  C_o trace at N = 4, RF1-IL / RF1-CL / RF3-IL
std::vector<FigureDataset> build_datasets(const SweepSpec& spec, const std::vector<SweepRun>& runs);

std::string dataset_to_csv(const FigureDataset& d);
/// One row per run with its summary numbers.
std::string runs_to_csv(const SweepResult& r);
nlohmann::json sweep_manifest(const SweepResult& r);

/// Writes <id>.csv per dataset, runs.csv, manifest.json and, when asked,
/// traces/. Returns the files written, relative to `dir`.
std::vector<std::string> write_sweep_outputs(const SweepResult& r, const std::filesystem::path& dir);

/// SHA-1 of "blob <size>\0<content>", as git hash-object prints it.
std::string git_blob_digest(std::string_view content);

/// Mean and sample standard deviation.
SeriesPoint summarize_values(double x, const std::vector<double>& values);

}  // namespace femtoq
