#include "femtoq/sweep.hpp"

#include "femtoq/config_io.hpp"
#include "femtoq/metrics.hpp"
#include "femtoq/trace_io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace femtoq {

namespace {

constexpr int kSweepSchemaVersion = 1;

std::string file_label(const SweepRun& r)
{
    std::string s = r.variant.label();
    std::string out;
    for (char c : s) {
        if (c == '(' || c == ')' || c == '=') continue;
        out += c;
    }
    return out + "_N" + std::to_string(r.n_femto) + "_s" + std::to_string(r.seed);
}

void write_text(const std::filesystem::path& path, std::string_view text)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    os.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

std::size_t variant_index(const std::vector<Variant>& vs, const Variant& v)
{
    const auto it = std::find(vs.begin(), vs.end(), v);
    return it == vs.end() ? vs.size() : static_cast<std::size_t>(it - vs.begin());
}

bool covers(const SweepSpec& spec, const std::vector<Variant>& wanted)
{
    const auto all = spec.variants();
    return std::all_of(wanted.begin(), wanted.end(),
                       [&](const Variant& v) { return variant_index(all, v) < all.size(); });
}

Variant il(RewardKind k, double big_k = 80.0) { return {Paradigm::IL, {k, 6.0, big_k}}; }
Variant cl(RewardKind k, double big_k = 80.0) { return {Paradigm::CL, {k, 6.0, big_k}}; }

/// The named figure subsets use the base config's target capacity.
Variant retarget(Variant v, double target)
{
    v.reward.target_capacity = target;
    return v;
}

FigureDataset per_n_dataset(const std::string& id, const std::string& y_name, const SweepSpec& spec,
                            const std::vector<SweepRun>& runs, const std::vector<Variant>& variants,
                            double (*metric)(const RunSummary&))
{
    FigureDataset d{id, "n_femto", y_name, {}};
    for (const auto& v : variants) {
        Series s{v.label(), {}};
        for (auto n : spec.n_femto) {
            std::vector<double> values;
            for (const auto& r : runs) {
                if (r.ok && r.n_femto == n && r.variant == v) values.push_back(metric(r.summary));
            }
            s.points.push_back(summarize_values(static_cast<double>(n), values));
        }
        d.series.push_back(std::move(s));
    }
    return d;
}

FigureDataset trace_dataset(const std::string& id, const SweepSpec& spec, const std::vector<SweepRun>& runs,
                            const std::vector<Variant>& variants, std::size_t n_femto)
{
    FigureDataset d{id, "iteration", "macro_capacity_sub0", {}};
    const std::size_t stride = spec.plot_stride;
    for (const auto& v : variants) {
        Series s{v.label(), {}};
        std::vector<const SweepRun*> members;
        for (const auto& r : runs) {
            if (r.ok && r.n_femto == n_femto && r.variant == v) members.push_back(&r);
        }
        for (std::size_t t = 0; t < spec.base.q_iterations; t += stride) {
            std::vector<double> values;
            for (const auto* r : members) values.push_back(r->macro_trace.at(t));
            s.points.push_back(summarize_values(static_cast<double>(t), values));
        }
        d.series.push_back(std::move(s));
    }
    return d;
}

double pick_capacity(const RunSummary& s) { return s.aggregate_femto_capacity; }
double pick_jain(const RunSummary& s) { return s.jain_index; }

}  // namespace

std::string Variant::label() const { return reward.label() + "-" + std::string(to_string(paradigm)); }

void SweepSpec::validate() const
{
    base.validate();
    if (n_femto.empty()) throw std::invalid_argument("sweep: n_femto list is empty");
    if (paradigms.empty()) throw std::invalid_argument("sweep: paradigms list is empty");
    if (rewards.empty()) throw std::invalid_argument("sweep: rewards list is empty");
    if (seeds < 1) throw std::invalid_argument("sweep: seeds must be at least 1");
    if (plot_stride < 1) throw std::invalid_argument("sweep: plot_stride must be at least 1");
    for (auto n : n_femto) {
        if (n < 1) throw std::invalid_argument("sweep: n_femto entries must be at least 1");
        if (base.topology && base.topology->femto_count() != n) {
            throw std::invalid_argument("sweep: fixed topology does not match n_femto " + std::to_string(n));
        }
    }
    for (const auto& r : rewards) r.validate();
    const auto vs = variants();
    for (std::size_t a = 0; a < vs.size(); ++a) {
        for (std::size_t b = a + 1; b < vs.size(); ++b) {
            if (vs[a] == vs[b]) throw std::invalid_argument("sweep: duplicate variant " + vs[a].label());
        }
    }
    auto sorted = n_femto;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw std::invalid_argument("sweep: duplicate n_femto entry");
    }
}

std::vector<Variant> SweepSpec::variants() const
{
    std::vector<Variant> out;
    for (auto p : paradigms) {
        for (const auto& r : rewards) out.push_back({p, r});
    }
    return out;
}

nlohmann::json to_json(const SweepSpec& spec)
{
    nlohmann::json rewards = nlohmann::json::array();
    for (const auto& r : spec.rewards) rewards.push_back(to_json(r));
    nlohmann::json paradigms = nlohmann::json::array();
    for (auto p : spec.paradigms) paradigms.push_back(std::string(to_string(p)));
    return {
        {"base", to_json(spec.base)},
        {"n_femto", spec.n_femto},
        {"paradigms", paradigms},
        {"rewards", rewards},
        {"seeds", spec.seeds},
        {"first_seed", spec.first_seed},
        {"plot_stride", spec.plot_stride},
        {"threads", spec.threads},
        {"write_traces", spec.write_traces},
        {"output_dir", spec.output_dir},
    };
}

SweepSpec sweep_spec_from_json(const nlohmann::json& j, const std::string& base_dir)
{
    if (!j.is_object()) throw std::invalid_argument("sweep spec: expected an object");
    reject_unknown_keys(j,
                        {"base", "n_femto", "paradigms", "rewards", "seeds", "first_seed", "plot_stride", "threads",
                         "write_traces", "output_dir"},
                        "sweep spec");
    SweepSpec s;
    if (j.contains("base")) s.base = sim_config_from_json(j.at("base"), base_dir);
    if (j.contains("n_femto")) s.n_femto = j.at("n_femto").get<std::vector<std::size_t>>();
    if (j.contains("paradigms")) {
        s.paradigms.clear();
        for (const auto& p : j.at("paradigms")) s.paradigms.push_back(paradigm_from_string(p.get<std::string>()));
    }
    if (j.contains("rewards")) {
        s.rewards.clear();
        for (const auto& r : j.at("rewards")) s.rewards.push_back(reward_spec_from_json(r));
    }
    if (j.contains("seeds")) s.seeds = j.at("seeds").get<std::size_t>();
    if (j.contains("first_seed")) s.first_seed = j.at("first_seed").get<std::uint64_t>();
    if (j.contains("plot_stride")) s.plot_stride = j.at("plot_stride").get<std::size_t>();
    if (j.contains("threads")) s.threads = j.at("threads").get<std::size_t>();
    if (j.contains("write_traces")) s.write_traces = j.at("write_traces").get<bool>();
    if (j.contains("output_dir")) s.output_dir = j.at("output_dir").get<std::string>();
    s.validate();
    return s;
}

const Series* FigureDataset::find(std::string_view label) const
{
    for (const auto& s : series) {
        if (s.label == label) return &s;
    }
    return nullptr;
}

std::size_t SweepResult::failures() const
{
    return static_cast<std::size_t>(std::count_if(runs.begin(), runs.end(), [](const SweepRun& r) { return !r.ok; }));
}

std::vector<const SweepRun*> SweepResult::point(std::size_t n_femto, const Variant& v) const
{
    std::vector<const SweepRun*> out;
    for (const auto& r : runs) {
        if (r.ok && r.n_femto == n_femto && r.variant == v) out.push_back(&r);
    }
    return out;
}

SeriesPoint summarize_values(double x, const std::vector<double>& values)
{
    SeriesPoint p;
    p.x = x;
    p.count = values.size();
    if (values.empty()) {
        p.mean = std::nan("");
        p.stddev = std::nan("");
        return p;
    }
    double sum = 0.0;
    for (double v : values) sum += v;
    p.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - p.mean) * (v - p.mean);
        p.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return p;
}

SweepResult run_sweep(const SweepSpec& spec, const EpisodeRunner& runner)
{
    spec.validate();
    SweepResult result;
    result.spec = spec;

    const auto variants = spec.variants();
    for (auto n : spec.n_femto) {
        for (const auto& v : variants) {
            for (std::size_t s = 0; s < spec.seeds; ++s) {
                SweepRun r;
                r.n_femto = n;
                r.variant = v;
                r.seed = spec.first_seed + s;
                result.runs.push_back(std::move(r));
            }
        }
    }

    const std::filesystem::path trace_dir = std::filesystem::path(spec.output_dir) / "traces";
    const bool keep_traces = spec.write_traces && !spec.output_dir.empty();
    if (keep_traces) std::filesystem::create_directories(trace_dir);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < result.runs.size(); k = next++) {
            auto& r = result.runs[k];
            try {
                SimConfig cfg = spec.base;
                cfg.n_femto = r.n_femto;
                cfg.paradigm = r.variant.paradigm;
                cfg.reward = r.variant.reward;
                cfg.rng_seed = r.seed;
                const auto start = std::chrono::steady_clock::now();
                const RunTrace trace = runner(cfg);
                r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
                const std::string csv = trace_to_csv(trace);
                r.summary = trace.summary;
                r.tail_deviation =
                    macro_deviation(trace, cfg.reward.target_capacity, tail_window(trace.size()));
                r.trace_digest = git_blob_digest(csv);
                r.macro_trace.reserve(trace.size());
                for (const auto& rec : trace.iterations) r.macro_trace.push_back(rec.macro_capacity.at(0));
                if (r.macro_trace.size() != spec.base.q_iterations) {
                    throw std::runtime_error("trace has " + std::to_string(r.macro_trace.size()) + " iterations");
                }
                if (keep_traces) write_text(trace_dir / (file_label(r) + ".csv"), csv);
                r.ok = true;
            } catch (const std::exception& e) {
                r.ok = false;
                r.error = e.what();
                r.macro_trace.clear();
            }
        }
    };

    std::size_t threads = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, result.runs.size());
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    result.datasets = build_datasets(spec, result.runs);
    return result;
}

std::vector<FigureDataset> build_datasets(const SweepSpec& spec, const std::vector<SweepRun>& runs)
{
    const double target = spec.base.reward.target_capacity;
    const auto all = spec.variants();
    std::vector<FigureDataset> out;
    out.push_back(per_n_dataset("capacity", "aggregate_femto_capacity", spec, runs, all, pick_capacity));
    out.push_back(per_n_dataset("fairness", "jain_index", spec, runs, all, pick_jain));

    auto at_target = [&](std::vector<Variant> vs) {
        for (auto& v : vs) v = retarget(v, target);
        return vs;
    };
    const bool has_n4 = std::find(spec.n_femto.begin(), spec.n_femto.end(), 4) != spec.n_femto.end();

    // Convergence of C_o for RF1 against every RF2 offset in the sweep.
    {
        std::vector<Variant> vs = at_target({il(RewardKind::RF1)});
        for (const auto& v : all) {
            if (v.paradigm == Paradigm::IL && v.reward.kind == RewardKind::RF2 && v.reward.target_capacity == target) {
                vs.push_back(v);
            }
        }
        if (has_n4 && vs.size() > 1 && covers(spec, vs)) out.push_back(trace_dataset("fig2", spec, runs, vs, 4));
    }
    const auto selfish = at_target({il(RewardKind::RF1), il(RewardKind::RF2, 80.0), il(RewardKind::RF3)});
    if (covers(spec, selfish)) {
        out.push_back(per_n_dataset("fig3", "aggregate_femto_capacity", spec, runs, selfish, pick_capacity));
        out.push_back(per_n_dataset("fig5", "jain_index", spec, runs, selfish, pick_jain));
    }
    const auto coop = at_target({il(RewardKind::RF1), il(RewardKind::RF3), cl(RewardKind::RF3)});
    if (covers(spec, coop)) {
        out.push_back(per_n_dataset("fig7", "aggregate_femto_capacity", spec, runs, coop, pick_capacity));
        out.push_back(per_n_dataset("fig9", "jain_index", spec, runs, coop, pick_jain));
    }
    const auto speed = at_target({il(RewardKind::RF1), cl(RewardKind::RF1), il(RewardKind::RF3)});
    if (has_n4 && covers(spec, speed)) out.push_back(trace_dataset("fig11", spec, runs, speed, 4));
    return out;
}

std::string dataset_to_csv(const FigureDataset& d)
{
    std::string out = "schema_version,figure,series," + d.x_name + ",mean_" + d.y_name + ",std_" + d.y_name + ",runs\n";
    for (const auto& s : d.series) {
        for (const auto& p : s.points) {
            out += std::to_string(kSweepSchemaVersion) + ',' + d.id + ',' + s.label + ',' + format_number(p.x) + ',' +
                   format_number(p.mean) + ',' + format_number(p.stddev) + ',' + std::to_string(p.count) + '\n';
        }
    }
    return out;
}

std::string runs_to_csv(const SweepResult& r)
{
    std::string out =
        "schema_version,n_femto,series,seed,ok,aggregate_femto_capacity,jain_index,converged,convergence_iteration,"
        "terminal_deviation,shared_entries,trace_digest\n";
    for (const auto& run : r.runs) {
        out += std::to_string(kSweepSchemaVersion) + ',' + std::to_string(run.n_femto) + ',' + run.variant.label() + ',' +
               std::to_string(run.seed) + ',' + (run.ok ? "1" : "0") + ',';
        if (run.ok) {
            const auto& s = run.summary;
            out += format_number(s.aggregate_femto_capacity) + ',' + format_number(s.jain_index) + ',' +
                   (s.converged ? "1" : "0") + ',' + (s.converged ? std::to_string(s.convergence_iteration) : "") + ',' +
                   format_number(s.terminal_deviation) + ',' + std::to_string(s.shared_entries) + ',' +
                   run.trace_digest;
        } else {
            out += ",,,,,,";
        }
        out += '\n';
    }
    return out;
}

nlohmann::json sweep_manifest(const SweepResult& r)
{
    // Thread count and output location do not change results, so they stay
    // out of the digest.
    nlohmann::json spec = to_json(r.spec);
    spec.erase("threads");
    spec.erase("output_dir");

    nlohmann::json points = nlohmann::json::array();
    const auto variants = r.spec.variants();
    std::size_t k = 0;
    for (auto n : r.spec.n_femto) {
        for (const auto& v : variants) {
            nlohmann::json runs = nlohmann::json::array();
            for (std::size_t s = 0; s < r.spec.seeds; ++s, ++k) {
                const auto& run = r.runs.at(k);
                nlohmann::json entry{{"seed", run.seed}, {"ok", run.ok}};
                if (run.ok) {
                    entry["trace_digest"] = run.trace_digest;
                } else {
                    entry["error"] = run.error;
                }
                runs.push_back(std::move(entry));
            }
            points.push_back({{"n_femto", n}, {"series", v.label()}, {"runs", std::move(runs)}});
        }
    }
    nlohmann::json datasets = nlohmann::json::array();
    for (const auto& d : r.datasets) {
        datasets.push_back({{"id", d.id}, {"file", d.id + ".csv"}, {"digest", git_blob_digest(dataset_to_csv(d))}});
    }
    nlohmann::json seeds = nlohmann::json::array();
    for (std::size_t s = 0; s < r.spec.seeds; ++s) seeds.push_back(r.spec.first_seed + s);

    return {
        {"schema_version", kSweepSchemaVersion},
        {"config_digest", git_blob_digest(spec.dump())},
        {"config", spec},
        {"seeds", seeds},
        {"failures", r.failures()},
        {"points", points},
        {"datasets", datasets},
    };
}

std::vector<std::string> write_sweep_outputs(const SweepResult& r, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    std::vector<std::string> written;
    for (const auto& d : r.datasets) {
        write_text(dir / (d.id + ".csv"), dataset_to_csv(d));
        written.push_back(d.id + ".csv");
    }
    write_text(dir / "runs.csv", runs_to_csv(r));
    written.push_back("runs.csv");
    write_text(dir / "manifest.json", sweep_manifest(r).dump(2) + "\n");
    written.push_back("manifest.json");
    return written;
}

std::string git_blob_digest(std::string_view content)
{
    const std::string header = "blob " + std::to_string(content.size()) + '\0';
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha1(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), header.data(), header.size()) != 1 ||
        EVP_DigestUpdate(ctx.get(), content.data(), content.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), md, &len) != 1) {
        throw std::runtime_error("sha1 digest failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xf];
    }
    return out;
}

}  // namespace femtoq
