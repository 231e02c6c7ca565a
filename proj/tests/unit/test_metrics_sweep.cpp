#include "femtoq/metrics.hpp"
#include "femtoq/sweep.hpp"
#include "femtoq/trace_io.hpp"

#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace femtoq;

namespace {

// n_femto x 1 subcarrier trace with given macro capacities; femto i's
// capacity at iteration t is femto(t, i).
template <typename F>
RunTrace synthetic(std::size_t iterations, std::size_t n_femto, const std::vector<double>& macro, F femto)
{
    RunTrace tr;
    tr.n_femto = n_femto;
    tr.n_sub = 1;
    for (std::size_t t = 0; t < iterations; ++t) {
        IterationRecord rec;
        rec.macro_capacity = {macro[t]};
        for (std::size_t i = 0; i < n_femto; ++i) {
            const double c = femto(t, i);
            rec.femto_total.push_back(c);
            rec.steps.push_back({0, 0, 0.0, c});
        }
        tr.iterations.push_back(rec);
    }
    return tr;
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("Jain index examples")
{
    CHECK(jain_index(std::vector<double>{3, 3, 3, 3}) == doctest::Approx(1.0));
    CHECK(jain_index(std::vector<double>{1, 0, 0, 0}) == doctest::Approx(0.25));
    CHECK(jain_index(std::vector<double>{2, 1}) == doctest::Approx(0.9));
    CHECK(jain_index(std::vector<double>{0, 0, 0}) == 1.0);
    CHECK_THROWS(jain_index(std::vector<double>{}));
    CHECK_THROWS(jain_index(std::vector<double>{1, -1}));
}

TEST_CASE("Jain index bounds and scale invariance")
{
    Rng rng(77);
    for (int k = 0; k < 2000; ++k) {
        std::vector<double> x(1 + uniform_index(rng, 20));
        for (auto& v : x) v = uniform01(rng) < 0.2 ? 0.0 : 50.0 * uniform01(rng);
        const double j = jain_index(x);
        CHECK(j >= 1.0 / double(x.size()) - 1e-12);
        CHECK(j <= 1.0 + 1e-12);
        const double c = std::exp(10.0 * uniform01(rng) - 5.0);
        auto y = x;
        for (auto& v : y) v *= c;
        CHECK(jain_index(y) == doctest::Approx(j).epsilon(1e-12));
    }
}

TEST_CASE("aggregate capacity")
{
    const auto zero = synthetic(10, 3, std::vector<double>(10, 6.0), [](std::size_t, std::size_t) { return 0.0; });
    CHECK(aggregate_femto_capacity(zero) == 0.0);

    // Sums 4 then 6 over two femtocells.
    const auto two = synthetic(2, 2, {6, 6}, [](std::size_t t, std::size_t) { return t == 0 ? 2.0 : 3.0; });
    CHECK(aggregate_femto_capacity(two, {0, 2}) == doctest::Approx(5.0));
    CHECK(aggregate_femto_capacity(two, {1, 2}) == doctest::Approx(6.0));
    CHECK_THROWS(aggregate_femto_capacity(two, {1, 1}));
    CHECK_THROWS(aggregate_femto_capacity(two, {0, 3}));
}

TEST_CASE("tail window is the last tenth")
{
    const auto w = tail_window(3000);
    CHECK(w.begin == 2700);
    CHECK(w.end == 3000);
    CHECK(tail_window(5).size() == 1);
}

TEST_CASE("convergence detection")
{
    SUBCASE("constant at target")
    {
        const auto tr = synthetic(500, 1, std::vector<double>(500, 6.0), [](auto, auto) { return 1.0; });
        const auto r = convergence_metrics(tr, 6.0, 0.5, 100);
        CHECK(r.converged);
        CHECK(r.iteration == 0);
        CHECK(r.terminal_deviation == 0.0);
    }
    SUBCASE("never inside the band")
    {
        const auto tr = synthetic(500, 1, std::vector<double>(500, 8.0), [](auto, auto) { return 1.0; });
        const auto r = convergence_metrics(tr, 6.0, 0.5, 100);
        CHECK_FALSE(r.converged);
        CHECK(r.terminal_deviation == doctest::Approx(2.0));
    }
    SUBCASE("enters at 1800 and stays")
    {
        std::vector<double> m(3000);
        for (std::size_t t = 0; t < 3000; ++t) m[t] = t < 1800 ? 9.0 - 0.001 * double(t % 7) : 6.2;
        // A brief visit earlier that does not last long enough.
        for (std::size_t t = 1000; t < 1050; ++t) m[t] = 6.0;
        const auto tr = synthetic(3000, 1, m, [](auto, auto) { return 1.0; });
        const auto r = convergence_metrics(tr, 6.0, 0.5, 100);
        CHECK(r.converged);
        CHECK(r.iteration == 1800);
        CHECK(r.terminal_deviation == doctest::Approx(0.2));
    }
    SUBCASE("run too short for the hold")
    {
        const auto tr = synthetic(50, 1, std::vector<double>(50, 6.0), [](auto, auto) { return 1.0; });
        CHECK_FALSE(convergence_metrics(tr, 6.0, 0.5, 100).converged);
    }
}

TEST_CASE("summary ties the metrics together")
{
    const auto tr = synthetic(100, 2, std::vector<double>(100, 6.1), [](std::size_t, std::size_t i) { return i ? 2.0 : 1.0; });
    const auto s = summarize(tr, 6.0);
    CHECK(s.aggregate_femto_capacity == doctest::Approx(3.0));
    CHECK(s.jain_index == doctest::Approx(0.9));
    CHECK(s.converged);
    CHECK(s.terminal_deviation == doctest::Approx(0.1));
}

}  // TEST_SUITE

TEST_SUITE("sweep") {

namespace {

SweepSpec tiny()
{
    SweepSpec s;
    s.base.q_iterations = 60;
    s.n_femto = {4};
    s.paradigms = {Paradigm::IL, Paradigm::CL};
    s.rewards = {{RewardKind::RF1, 6.0, 80.0}, {RewardKind::RF3, 6.0, 80.0}};
    s.seeds = 3;
    s.threads = 2;
    return s;
}

}  // namespace

TEST_CASE("git blob digest matches git hash-object")
{
    CHECK(git_blob_digest("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
    CHECK(git_blob_digest("hello world\n") == "3b18e512dba79e4c8300dd08aeb37f8e728b8dad");
}

TEST_CASE("variant labels and spec validation")
{
    CHECK(Variant{Paradigm::CL, {RewardKind::RF2, 6.0, 1000.0}}.label() == "RF2(K=1000)-CL");
    SweepSpec s;
    CHECK(s.variants().size() == 10);
    s.seeds = 0;
    CHECK_THROWS(s.validate());
    s = SweepSpec{};
    s.n_femto.clear();
    CHECK_THROWS(s.validate());
    s = SweepSpec{};
    s.rewards.push_back(s.rewards.front());
    CHECK_THROWS(s.validate());
}

TEST_CASE("sweep spec JSON rejects unknown keys")
{
    const auto j = to_json(tiny());
    CHECK(sweep_spec_from_json(j).variants() == tiny().variants());
    auto bad = j;
    bad["seed"] = 4;
    CHECK_THROWS_AS(sweep_spec_from_json(bad), std::invalid_argument);
    auto nested = j;
    nested["base"]["n_femtos"] = 4;
    CHECK_THROWS_AS(sweep_spec_from_json(nested), std::invalid_argument);
}

TEST_CASE("single point gives one-row datasets")
{
    auto s = tiny();
    s.paradigms = {Paradigm::IL};
    s.rewards = {{RewardKind::RF1, 6.0, 80.0}};
    s.seeds = 2;
    const auto r = run_sweep(s);
    REQUIRE(r.datasets.size() == 2);
    CHECK(r.datasets[0].id == "capacity");
    REQUIRE(r.datasets[0].series.size() == 1);
    CHECK(r.datasets[0].series[0].points.size() == 1);
    CHECK(r.datasets[0].series[0].points[0].count == 2);
}

TEST_CASE("figure subsets appear when covered")
{
    SweepSpec s = tiny();
    s.n_femto = {4, 5};
    s.paradigms = {Paradigm::IL, Paradigm::CL};
    s.rewards = {{RewardKind::RF1, 6.0, 80.0}, {RewardKind::RF3, 6.0, 80.0}};
    s.seeds = 1;
    const auto r = run_sweep(s);
    std::vector<std::string> ids;
    for (const auto& d : r.datasets) ids.push_back(d.id);
    CHECK(ids == std::vector<std::string>{"capacity", "fairness", "fig7", "fig9", "fig11"});
    const auto& fig7 = r.datasets[2];
    REQUIRE(fig7.series.size() == 3);
    CHECK(fig7.series[0].label == "RF1-IL");
    CHECK(fig7.series[1].label == "RF3-IL");
    CHECK(fig7.series[2].label == "RF3-CL");
    for (const auto& ser : fig7.series) CHECK(ser.points.size() == 2);
    // Trace figures are strided by 10.
    CHECK(r.datasets[4].series[0].points.size() == 6);
}

TEST_CASE("sweep outputs are byte identical across runs and thread counts")
{
    namespace fs = std::filesystem;
    const auto root = fs::temp_directory_path() / "femtoq-sweep-test";
    fs::remove_all(root);
    auto a = tiny();
    auto b = tiny();
    b.threads = 1;
    const auto files = write_sweep_outputs(run_sweep(a), root / "a");
    write_sweep_outputs(run_sweep(b), root / "b");
    for (const auto& f : files) CHECK(slurp(root / "a" / f) == slurp(root / "b" / f));
    fs::remove_all(root);
}

TEST_CASE("manifest holds one digest per seed per point")
{
    auto s = tiny();
    const auto r = run_sweep(s);
    const auto m = sweep_manifest(r);
    CHECK(m.at("schema_version") == 1);
    CHECK(m.at("seeds").size() == s.seeds);
    CHECK(m.at("points").size() == s.n_femto.size() * s.variants().size());
    for (const auto& p : m.at("points")) {
        REQUIRE(p.at("runs").size() == s.seeds);
        for (const auto& run : p.at("runs")) CHECK(run.at("trace_digest").get<std::string>().size() == 40);
    }
    CHECK(m.at("config_digest").get<std::string>().size() == 40);
}

TEST_CASE("overhead column is the closed form for CL and zero for IL")
{
    const auto r = run_sweep(tiny());
    for (const auto& run : r.runs) {
        REQUIRE(run.ok);
        const auto expect = run.variant.paradigm == Paradigm::CL ? expected_shared_entries(60, 6, 4, 18) : 0;
        CHECK(run.summary.shared_entries == expect);
    }
}

TEST_CASE("a failing run is recorded and the sweep continues")
{
    auto s = tiny();
    const auto r = run_sweep(s, [](const SimConfig& cfg) {
        if (cfg.rng_seed == 2 && cfg.paradigm == Paradigm::CL) throw std::runtime_error("injected");
        return run_episode(cfg);
    });
    CHECK(r.failures() == 2);
    for (const auto& run : r.runs) {
        if (!run.ok) CHECK(run.error == "injected");
    }
    const auto cap = r.datasets[0];
    for (const auto& ser : cap.series) {
        const bool cl = ser.label.find("-CL") != std::string::npos;
        CHECK(ser.points[0].count == (cl ? 2u : 3u));
    }
    const auto m = sweep_manifest(r);
    CHECK(m.at("failures") == 2);
    CHECK(runs_to_csv(r).find(",0,,,,,,") != std::string::npos);
}

TEST_CASE("mean and sample deviation")
{
    const auto p = summarize_values(4, {1.0, 2.0, 3.0, 4.0});
    CHECK(p.mean == doctest::Approx(2.5));
    CHECK(p.stddev == doctest::Approx(std::sqrt(5.0 / 3.0)));
    CHECK(summarize_values(4, {7.0}).stddev == 0.0);
    CHECK(std::isnan(summarize_values(4, {}).mean));
}

}  // TEST_SUITE
