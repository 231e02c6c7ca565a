#include "femtoq/radio_env.hpp"
#include "femtoq/units.hpp"

#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <limits>

using namespace femtoq;

namespace {

constexpr double kNoise = 1e-7;
// Gains must be positive; this one is negligible next to every other term.
constexpr double kNone = 1e-300;

// Two femtocells on one subcarrier with gains chosen so every SINR term is a
// round multiple of the noise power.
struct Hand {
    ChannelMatrix ch{2, 1, 2.0};
    PowerAllocation pa{2, 1, 0.0, 0.0, 15.0};

    Hand()
    {
        for (std::size_t tx = 0; tx < 3; ++tx) {
            for (std::size_t rx = 0; rx < 3; ++rx) ch.set_gain(tx, rx, 0, kNone);
        }
        pa.set_macro_mw(0, 1.0);
        pa.set_femto_mw(0, 0, 1.0);
        pa.set_femto_mw(1, 0, 1.0);
    }
};

double log2_1p(double x) { return std::log2(1.0 + x); }

}  // namespace

TEST_SUITE("radio_env") {

TEST_CASE("path loss is d^-k")
{
    CHECK(path_loss_gain(100.0, 2.0) == doctest::Approx(1e-4).epsilon(1e-15));
    CHECK(path_loss_gain(1.0, 2.0) == 1.0);
    CHECK(path_loss_gain(80.0, 2.0) == doctest::Approx(1.5625e-4).epsilon(1e-15));
    CHECK_THROWS_AS(path_loss_gain(0.0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(path_loss_gain(-3.0, 2.0), std::invalid_argument);
}

TEST_CASE("macro capacity hand cases")
{
    Hand h;
    // Femtos silent, h_oo P_o = sigma^2.
    h.pa.set_femto_mw(0, 0, 0.0);
    h.pa.set_femto_mw(1, 0, 0.0);
    h.ch.set_gain(0, 0, 0, kNoise);
    CHECK(macro_capacity(h.ch, h.pa, 0, kNoise) == doctest::Approx(1.0));

    h.pa.set_macro_mw(0, 0.0);
    CHECK(macro_capacity(h.ch, h.pa, 0, kNoise) == 0.0);
    h.pa.set_macro_mw(0, 1.0);

    // One interferer at sigma^2 and signal at 2 sigma^2: SINR 1.
    h.ch.set_gain(0, 0, 0, 2 * kNoise);
    h.pa.set_femto_mw(0, 0, 1.0);
    h.ch.set_gain(1, 0, 0, kNoise);
    CHECK(macro_capacity(h.ch, h.pa, 0, kNoise) == doctest::Approx(1.0));
}

TEST_CASE("femto capacity hand cases")
{
    Hand h;
    h.ch.set_gain(1, 1, 0, 3 * kNoise);
    CHECK(femto_capacity(h.ch, h.pa, 0, 0, kNoise) == doctest::Approx(2.0));

    h.pa.set_femto_mw(0, 0, 0.0);
    CHECK(femto_capacity(h.ch, h.pa, 0, 0, kNoise) == 0.0);

    // Cross-femto and macro interference both enter the denominator.
    h.pa.set_femto_mw(0, 0, 1.0);
    h.ch.set_gain(2, 1, 0, 1 * kNoise);  // femto 1 -> femto user 0
    h.ch.set_gain(0, 1, 0, 1 * kNoise);  // macro -> femto user 0
    CHECK(femto_capacity(h.ch, h.pa, 0, 0, kNoise) == doctest::Approx(log2_1p(1.0)));
}

TEST_CASE("capacities against an independent evaluation on a random layout")
{
    const auto topo = generate_topology(5, 11);
    const auto ch = channel_gains(topo, 2.0, 3);
    PowerAllocation pa(5, 3, -20.0);
    for (std::size_t i = 0; i < 5; ++i) {
        for (std::size_t n = 0; n < 3; ++n) pa.set_femto_dbm(i, n, -20.0 + 2.0 * static_cast<double>((i + 2 * n) % 17));
    }
    const auto report = evaluate_capacities(ch, pa, kNoise);
    auto g = [](Point a, Point b) { return std::pow(std::hypot(a.x - b.x, a.y - b.y), -2.0); };
    for (std::size_t n = 0; n < 3; ++n) {
        const double p_o = std::pow(10.0, 4.3) / 3.0;
        double interference = kNoise;
        for (std::size_t i = 0; i < 5; ++i) interference += g(topo.fbs[i], topo.macro_user) * pa.femto_mw(i, n);
        CHECK(report.macro_at(n) == doctest::Approx(log2_1p(g(topo.mbs, topo.macro_user) * p_o / interference)));
        for (std::size_t i = 0; i < 5; ++i) {
            double den = kNoise + g(topo.mbs, topo.femto_users[i]) * p_o;
            for (std::size_t j = 0; j < 5; ++j) {
                if (j != i) den += g(topo.fbs[j], topo.femto_users[i]) * pa.femto_mw(j, n);
            }
            const double expect = log2_1p(g(topo.fbs[i], topo.femto_users[i]) * pa.femto_mw(i, n) / den);
            CHECK(report.femto_at(i, n) == doctest::Approx(expect).epsilon(1e-12));
        }
    }
}

TEST_CASE("macro budget is split equally in linear power")
{
    PowerAllocation pa(3, 6, -20.0, 43.0, 15.0);
    double total = 0.0;
    for (std::size_t n = 0; n < 6; ++n) {
        CHECK(pa.macro_mw(n) == doctest::Approx(dbm_to_mw(43.0) / 6.0));
        total += pa.macro_mw(n);
    }
    CHECK(total == doctest::Approx(dbm_to_mw(43.0)));
    CHECK(pa.macro_total_mw() == doctest::Approx(dbm_to_mw(43.0)));
}

TEST_CASE("dBm and linear mirrors stay consistent")
{
    PowerAllocation pa(2, 2, -20.0);
    pa.set_femto_dbm(1, 1, 7.0);
    CHECK(pa.femto_mw(1, 1) == doctest::Approx(dbm_to_mw(7.0)).epsilon(1e-12));
    pa.set_femto_mw(0, 1, 0.0);
    CHECK(std::isinf(pa.femto_dbm(0, 1)));
    CHECK(pa.femto_dbm(0, 1) < 0);
    CHECK_THROWS(pa.set_femto_mw(0, 0, -1.0));
}

TEST_CASE("femto budget compares linear sums")
{
    PowerAllocation pa(1, 6, 7.0);  // 6 x 5.01 mW = 30.1 mW, below 31.6 mW
    CHECK(pa.femto_total_mw(0) == doctest::Approx(6.0 * dbm_to_mw(7.0)));
    CHECK(pa.within_femto_budget(0));
    pa.set_femto_dbm(0, 0, 9.0);  // 33.0 mW
    CHECK_FALSE(pa.within_femto_budget(0));
}

TEST_CASE("generated topologies satisfy every constraint")
{
    for (auto [n, seed] : {std::pair<std::size_t, std::uint64_t>{4, 42}, {15, 7}, {1, 3}, {11, 99}}) {
        CAPTURE(n);
        const auto topo = generate_topology(n, seed);
        CHECK(topo.femto_count() == n);
        CHECK(topo.femto_users.size() == n);
        CHECK(topo.mbs == Point{0.0, 0.0});
        CHECK(topology_violations(topo).empty());
        // Same checks written out independently.
        PlacementLimits lim;
        CHECK(distance(topo.mbs, topo.macro_user) <= lim.mbs_to_macro_user);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(distance(topo.mbs, topo.femto_users[i]) <= 800.0);
            CHECK(distance(topo.fbs[i], topo.femto_users[i]) <= 80.0);
            CHECK(distance(topo.fbs[i], topo.macro_user) <= 800.0);
            CHECK(distance(topo.fbs[i], topo.femto_users[i]) >= 1.0);
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i) CHECK(distance(topo.fbs[i], topo.femto_users[j]) <= 300.0);
            }
        }
    }
}

TEST_CASE("placement is deterministic per seed")
{
    CHECK(generate_topology(6, 5) == generate_topology(6, 5));
    CHECK_FALSE(generate_topology(6, 5) == generate_topology(6, 6));
}

TEST_CASE("infeasible limits fail with a diagnostic")
{
    PlacementLimits lim;
    lim.fbs_to_other_user = 0.5;  // below the minimum separation
    lim.attempts_per_femto = 50;
    lim.max_restarts = 2;
    CHECK_THROWS_AS(generate_topology(3, 1, lim), std::runtime_error);
}

TEST_CASE("violations are reported")
{
    auto topo = generate_topology(3, 2);
    topo.femto_users[1] = {5000.0, 0.0};
    CHECK_FALSE(topology_violations(topo).empty());
}

TEST_CASE("topology text round trip keeps 6 significant digits")
{
    const auto topo = generate_topology(4, 9);
    const auto text = topology_to_text(topo);
    CHECK(text.rfind("femtoq-topology 1\n", 0) == 0);
    const auto back = topology_from_text(text);
    REQUIRE(back.femto_count() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(back.fbs[i].x == doctest::Approx(topo.fbs[i].x).epsilon(1e-5));
        CHECK(back.femto_users[i].y == doctest::Approx(topo.femto_users[i].y).epsilon(1e-5));
    }
    CHECK(topology_to_text(back) == text);
    CHECK_THROWS(topology_from_text("femtoq-topology 2\n"));
    CHECK_THROWS(topology_from_text("femtoq-topology 1\nmbs 0 0\nmacro_user 1 1\nfemto 1 0 0 1 1\n"));
}

TEST_CASE("channel gains match path loss and ignore the subcarrier")
{
    const auto topo = generate_topology(4, 13);
    const auto ch = channel_gains(topo, 2.0, 6);
    for (std::size_t n = 0; n < 6; ++n) {
        CHECK(ch.macro_to_macro_user(n) == path_loss_gain(distance(topo.mbs, topo.macro_user), 2.0));
        for (std::size_t i = 0; i < 4; ++i) {
            CHECK(ch.femto_to_macro_user(i, n) == ch.femto_to_macro_user(i, 0));
            CHECK(ch.macro_to_femto_user(i, n) == path_loss_gain(distance(topo.mbs, topo.femto_users[i]), 2.0));
            for (std::size_t j = 0; j < 4; ++j) {
                const double g = ch.femto_to_femto_user(j, i, n);
                CHECK(g > 0.0);
                CHECK(std::isfinite(g));
                CHECK(g == path_loss_gain(distance(topo.fbs[j], topo.femto_users[i]), 2.0));
            }
        }
    }
}

TEST_CASE("capacity monotonicity on random layouts")
{
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto topo = generate_topology(5, seed);
        const auto ch = channel_gains(topo, 2.0, 1);
        PowerAllocation base(5, 1, -4.0);
        for (std::size_t j = 0; j < 5; ++j) {
            PowerAllocation up = base;
            up.set_femto_dbm(j, 0, 10.0);
            CHECK(macro_capacity(ch, up, 0, kNoise) < macro_capacity(ch, base, 0, kNoise));
            for (std::size_t i = 0; i < 5; ++i) {
                const double before = femto_capacity(ch, base, i, 0, kNoise);
                const double after = femto_capacity(ch, up, i, 0, kNoise);
                if (i == j) {
                    CHECK(after > before);
                } else {
                    CHECK(after <= before);
                }
            }
        }
    }
}

TEST_CASE("every grid allocation yields finite non-negative capacities")
{
    const auto topo = generate_topology(4, 21);
    const auto ch = channel_gains(topo, 2.0, 2);
    for (double lo : {-20.0, 0.0, 14.0, 15.0}) {
        PowerAllocation pa(4, 2, lo);
        const auto r = evaluate_capacities(ch, pa, kNoise);
        for (double c : r.macro) CHECK((std::isfinite(c) && c >= 0.0));
        for (double c : r.femto) CHECK((std::isfinite(c) && c >= 0.0));
        // dBm-derived and linear-derived inputs agree.
        PowerAllocation lin(4, 2, -20.0);
        for (std::size_t i = 0; i < 4; ++i) {
            for (std::size_t n = 0; n < 2; ++n) lin.set_femto_mw(i, n, dbm_to_mw(lo));
        }
        const auto r2 = evaluate_capacities(ch, lin, kNoise);
        for (std::size_t k = 0; k < r.femto.size(); ++k) CHECK(r2.femto[k] == doctest::Approx(r.femto[k]).epsilon(1e-12));
    }
}

TEST_CASE("no femtocells leaves the noise-limited macro link")
{
    Topology topo;
    topo.macro_user = {300.0, 400.0};
    const auto ch = channel_gains(topo, 2.0, 6);
    PowerAllocation pa(0, 6, -20.0);
    const double p_o = dbm_to_mw(43.0) / 6.0;
    CHECK(macro_capacity(ch, pa, 0, kNoise) == doctest::Approx(std::log2(1.0 + p_o / (500.0 * 500.0) / kNoise)));
}

}  // TEST_SUITE
