#include "femtoq/radio_env.hpp"

#include "femtoq/random.hpp"
#include "femtoq/units.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace femtoq {

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

namespace {

Point uniform_in_disc(Rng& rng, Point centre, double radius)
{
    const double r = radius * std::sqrt(uniform01(rng));
    const double theta = 2.0 * std::numbers::pi * uniform01(rng);
    return {centre.x + r * std::cos(theta), centre.y + r * std::sin(theta)};
}

bool within(double d, double max_d, double min_d) { return d >= min_d && d <= max_d; }

// Constraints between femtocell `k` (fbs, user) and everything placed before it.
bool femto_fits(const Topology& t, Point fbs, Point user, const PlacementLimits& lim)
{
    const double lo = lim.min_separation;
    if (!within(distance(fbs, user), lim.fbs_to_own_user, lo)) return false;
    if (!within(distance(t.mbs, user), lim.mbs_to_femto_user, lo)) return false;
    if (!within(distance(fbs, t.macro_user), lim.fbs_to_macro_user, lo)) return false;
    for (std::size_t j = 0; j < t.fbs.size(); ++j) {
        if (!within(distance(fbs, t.femto_users[j]), lim.fbs_to_other_user, lo)) return false;
        if (!within(distance(t.fbs[j], user), lim.fbs_to_other_user, lo)) return false;
    }
    return true;
}

}  // namespace

std::vector<std::string> topology_violations(const Topology& t, const PlacementLimits& lim)
{
    std::vector<std::string> out;
    const double lo = lim.min_separation;
    auto check = [&](double d, double max_d, const std::string& what) {
        if (!within(d, max_d, lo)) {
            std::ostringstream os;
            os << what << " distance " << d << " m outside [" << lo << ", " << max_d << "]";
            out.push_back(os.str());
        }
    };
    if (t.fbs.size() != t.femto_users.size()) {
        out.emplace_back("fbs and femto user counts differ");
        return out;
    }
    check(distance(t.mbs, t.macro_user), lim.mbs_to_macro_user, "mbs-macro_user");
    for (std::size_t i = 0; i < t.fbs.size(); ++i) {
        const std::string tag = std::to_string(i);
        check(distance(t.mbs, t.femto_users[i]), lim.mbs_to_femto_user, "mbs-femto_user" + tag);
        check(distance(t.fbs[i], t.femto_users[i]), lim.fbs_to_own_user, "fbs" + tag + "-own_user");
        check(distance(t.fbs[i], t.macro_user), lim.fbs_to_macro_user, "fbs" + tag + "-macro_user");
        for (std::size_t j = 0; j < t.fbs.size(); ++j) {
            if (j != i) {
                check(distance(t.fbs[i], t.femto_users[j]), lim.fbs_to_other_user,
                      "fbs" + tag + "-femto_user" + std::to_string(j));
            }
        }
    }
    return out;
}

Topology generate_topology(std::size_t n_femto, std::uint64_t seed, const PlacementLimits& lim)
{
    if (n_femto < 1) throw std::invalid_argument("generate_topology: n_femto must be >= 1");
    Rng rng(seed);
    for (std::size_t restart = 0; restart < lim.max_restarts; ++restart) {
        Topology t;
        t.mbs = {0.0, 0.0};
        do {
            t.macro_user = uniform_in_disc(rng, t.mbs, lim.mbs_to_macro_user);
        } while (distance(t.mbs, t.macro_user) < lim.min_separation);

        bool placed_all = true;
        for (std::size_t i = 0; i < n_femto && placed_all; ++i) {
            placed_all = false;
            for (std::size_t attempt = 0; attempt < lim.attempts_per_femto; ++attempt) {
                const Point fbs = uniform_in_disc(rng, t.macro_user, lim.fbs_to_macro_user);
                const Point user = uniform_in_disc(rng, fbs, lim.fbs_to_own_user);
                if (femto_fits(t, fbs, user, lim)) {
                    t.fbs.push_back(fbs);
                    t.femto_users.push_back(user);
                    placed_all = true;
                    break;
                }
            }
        }
        if (placed_all) return t;
    }
    throw std::runtime_error("generate_topology: placement constraints not satisfied after " +
                             std::to_string(lim.max_restarts) + " restarts with " + std::to_string(n_femto) +
                             " femtocells");
}

std::string topology_to_text(const Topology& t)
{
    std::ostringstream os;
    os << std::setprecision(6);
    os << "femtoq-topology 1\n";
    os << "mbs " << t.mbs.x << ' ' << t.mbs.y << '\n';
    os << "macro_user " << t.macro_user.x << ' ' << t.macro_user.y << '\n';
    for (std::size_t i = 0; i < t.fbs.size(); ++i) {
        os << "femto " << i << ' ' << t.fbs[i].x << ' ' << t.fbs[i].y << ' ' << t.femto_users[i].x << ' '
           << t.femto_users[i].y << '\n';
    }
    return os.str();
}

Topology topology_from_text(std::string_view text)
{
    std::istringstream is{std::string(text)};
    std::string magic;
    int version = 0;
    if (!(is >> magic >> version) || magic != "femtoq-topology" || version != 1) {
        throw std::runtime_error("topology: missing 'femtoq-topology 1' header");
    }
    Topology t;
    bool have_mbs = false, have_macro = false;
    std::string key;
    while (is >> key) {
        if (key == "mbs") {
            is >> t.mbs.x >> t.mbs.y;
            have_mbs = true;
        } else if (key == "macro_user") {
            is >> t.macro_user.x >> t.macro_user.y;
            have_macro = true;
        } else if (key == "femto") {
            std::size_t idx = 0;
            Point f, u;
            is >> idx >> f.x >> f.y >> u.x >> u.y;
            if (idx != t.fbs.size()) throw std::runtime_error("topology: femto entries out of order");
            t.fbs.push_back(f);
            t.femto_users.push_back(u);
        } else {
            throw std::runtime_error("topology: unknown record '" + key + "'");
        }
        if (!is) throw std::runtime_error("topology: malformed '" + key + "' record");
    }
    if (!have_mbs || !have_macro) throw std::runtime_error("topology: mbs and macro_user records are required");
    return t;
}

double path_loss_gain(double distance_m, double exponent)
{
    if (!(distance_m > 0.0)) throw std::invalid_argument("path_loss_gain: distance must be positive");
    return std::pow(distance_m, -exponent);
}

ChannelMatrix::ChannelMatrix(std::size_t n_femto, std::size_t n_sub, double path_loss_exponent)
    : n_femto_(n_femto),
      n_sub_(n_sub),
      exponent_(path_loss_exponent),
      gains_((n_femto + 1) * (n_femto + 1) * n_sub, 0.0)
{
}

std::size_t ChannelMatrix::index(std::size_t tx, std::size_t rx, std::size_t n) const
{
    return (tx * (n_femto_ + 1) + rx) * n_sub_ + n;
}

void ChannelMatrix::set_gain(std::size_t tx, std::size_t rx, std::size_t n, double g)
{
    if (!(g > 0.0) || !std::isfinite(g)) throw std::invalid_argument("ChannelMatrix: gain must be finite and > 0");
    gains_[index(tx, rx, n)] = g;
}

ChannelMatrix channel_gains(const Topology& topo, double k, std::size_t n_sub)
{
    const std::size_t nf = topo.femto_count();
    ChannelMatrix ch(nf, n_sub, k);
    // tx node 0 = MBS, tx node i+1 = FBS i; rx node 0 = macro user, rx node i+1 = femto user i.
    auto tx_pos = [&](std::size_t node) { return node == 0 ? topo.mbs : topo.fbs[node - 1]; };
    auto rx_pos = [&](std::size_t node) { return node == 0 ? topo.macro_user : topo.femto_users[node - 1]; };
    for (std::size_t tx = 0; tx <= nf; ++tx) {
        for (std::size_t rx = 0; rx <= nf; ++rx) {
            const double g = path_loss_gain(distance(tx_pos(tx), rx_pos(rx)), k);
            for (std::size_t n = 0; n < n_sub; ++n) ch.set_gain(tx, rx, n, g);
        }
    }
    return ch;
}

PowerAllocation::PowerAllocation(std::size_t n_femto, std::size_t n_sub, double initial_femto_dbm,
                                 double macro_budget_dbm, double femto_budget_dbm)
    : n_femto_(n_femto),
      n_sub_(n_sub),
      macro_budget_dbm_(macro_budget_dbm),
      femto_budget_dbm_(femto_budget_dbm),
      femto_dbm_(n_femto * n_sub, initial_femto_dbm),
      femto_mw_(n_femto * n_sub, dbm_to_mw(initial_femto_dbm)),
      macro_dbm_(n_sub),
      macro_mw_(n_sub)
{
    if (n_sub == 0) throw std::invalid_argument("PowerAllocation: need at least one subcarrier");
    const double share = dbm_to_mw(macro_budget_dbm) / static_cast<double>(n_sub);
    for (std::size_t n = 0; n < n_sub; ++n) set_macro_mw(n, share);
}

void PowerAllocation::set_femto_dbm(std::size_t i, std::size_t n, double dbm)
{
    femto_dbm_[i * n_sub_ + n] = dbm;
    femto_mw_[i * n_sub_ + n] = dbm_to_mw(dbm);
}

void PowerAllocation::set_femto_mw(std::size_t i, std::size_t n, double mw)
{
    if (mw < 0.0) throw std::invalid_argument("PowerAllocation: negative power");
    femto_mw_[i * n_sub_ + n] = mw;
    femto_dbm_[i * n_sub_ + n] = mw > 0.0 ? mw_to_dbm(mw) : -std::numeric_limits<double>::infinity();
}

void PowerAllocation::set_macro_mw(std::size_t n, double mw)
{
    if (mw < 0.0) throw std::invalid_argument("PowerAllocation: negative power");
    macro_mw_[n] = mw;
    macro_dbm_[n] = mw > 0.0 ? mw_to_dbm(mw) : -std::numeric_limits<double>::infinity();
}

double PowerAllocation::femto_total_mw(std::size_t i) const
{
    double sum = 0.0;
    for (std::size_t n = 0; n < n_sub_; ++n) sum += femto_mw(i, n);
    return sum;
}

double PowerAllocation::macro_total_mw() const
{
    double sum = 0.0;
    for (double p : macro_mw_) sum += p;
    return sum;
}

bool PowerAllocation::within_femto_budget(std::size_t i) const
{
    return femto_total_mw(i) <= dbm_to_mw(femto_budget_dbm_);
}

double CapacityReport::femto_total(std::size_t i) const
{
    double sum = 0.0;
    for (std::size_t n = 0; n < n_sub; ++n) sum += femto_at(i, n);
    return sum;
}

double macro_capacity(const ChannelMatrix& ch, const PowerAllocation& pa, std::size_t n, double noise_mw)
{
    double interference = noise_mw;
    for (std::size_t i = 0; i < pa.femto_count(); ++i) interference += ch.femto_to_macro_user(i, n) * pa.femto_mw(i, n);
    return std::log2(1.0 + ch.macro_to_macro_user(n) * pa.macro_mw(n) / interference);
}

double femto_capacity(const ChannelMatrix& ch, const PowerAllocation& pa, std::size_t i, std::size_t n,
                      double noise_mw)
{
    double interference = noise_mw + ch.macro_to_femto_user(i, n) * pa.macro_mw(n);
    for (std::size_t j = 0; j < pa.femto_count(); ++j) {
        if (j != i) interference += ch.femto_to_femto_user(j, i, n) * pa.femto_mw(j, n);
    }
    return std::log2(1.0 + ch.femto_to_femto_user(i, i, n) * pa.femto_mw(i, n) / interference);
}

CapacityReport evaluate_capacities(const ChannelMatrix& ch, const PowerAllocation& pa, double noise_mw)
{
    CapacityReport rep;
    rep.n_femto = pa.femto_count();
    rep.n_sub = pa.subcarrier_count();
    rep.noise_mw = noise_mw;
    rep.macro.resize(rep.n_sub);
    rep.femto.resize(rep.n_femto * rep.n_sub);
    for (std::size_t n = 0; n < rep.n_sub; ++n) {
        rep.macro[n] = macro_capacity(ch, pa, n, noise_mw);
        for (std::size_t i = 0; i < rep.n_femto; ++i) rep.femto[i * rep.n_sub + n] = femto_capacity(ch, pa, i, n, noise_mw);
    }
    return rep;
}

}  // namespace femtoq
