#pragma once

// Downlink radio model for one macrocell underlaid with N femtocells:
// random placement, path-loss channel gains and per-subcarrier Shannon
// capacities for the macro user and every femto user.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace femtoq {

struct Point {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Point&) const = default;
};

double distance(Point a, Point b);

/// Maximum link distances (meters) a generated topology must respect.
struct PlacementLimits {
    double mbs_to_macro_user = 1000.0;
    double mbs_to_femto_user = 800.0;
    double fbs_to_own_user = 80.0;
    double fbs_to_other_user = 300.0;
    double fbs_to_macro_user = 800.0;
    /// Lower bound on every distance that enters a gain computation.
    double min_separation = 1.0;
    /// Cap on candidate draws for a single femtocell before the whole
    /// layout is discarded and drawn again.
    std::size_t attempts_per_femto = 20000;
    /// Cap on full layout restarts.
    std::size_t max_restarts = 200;
};

/// One macro user (U_m = 1) and one user per femtocell (U_f = 1).
struct Topology {
    Point mbs;
    Point macro_user;
    std::vector<Point> fbs;
    std::vector<Point> femto_users;

    std::size_t femto_count() const { return fbs.size(); }
    bool operator==(const Topology&) const = default;
};

/// Human-readable list of violated placement constraints; empty if valid.
std::vector<std::string> topology_violations(const Topology& topo, const PlacementLimits& limits = {});

/// Rejection-sampled placement with the MBS at the origin. Deterministic in
/// (n_femto, seed). Throws std::runtime_error when the attempt caps are hit.
Topology generate_topology(std::size_t n_femto, std::uint64_t seed, const PlacementLimits& limits = {});

/// Plain-text form, positions in meters with 6 significant digits:
///
///   femtoq-topology 1
///   mbs <x> <y>
///   macro_user <x> <y>
///   femto <i> <fbs_x> <fbs_y> <user_x> <user_y>
std::string topology_to_text(const Topology& topo);
Topology topology_from_text(std::string_view text);

/// h = d^(-k). Throws std::invalid_argument for d <= 0.
double path_loss_gain(double distance_m, double exponent);

/// Gains indexed by (transmitter, receiver, subcarrier). Node 0 is the macro
/// tier (MBS when transmitting, macro user when receiving); node i + 1 is
/// femtocell i (its FBS or its user).
class ChannelMatrix {
public:
    static constexpr std::size_t kMacroNode = 0;
    static constexpr std::size_t femto_node(std::size_t i) { return i + 1; }

    ChannelMatrix(std::size_t n_femto, std::size_t n_sub, double path_loss_exponent);

    double gain(std::size_t tx, std::size_t rx, std::size_t n) const { return gains_[index(tx, rx, n)]; }
    void set_gain(std::size_t tx, std::size_t rx, std::size_t n, double g);

    // Shorthands in femto-index space.
    double macro_to_macro_user(std::size_t n) const { return gain(kMacroNode, kMacroNode, n); }
    double macro_to_femto_user(std::size_t i, std::size_t n) const { return gain(kMacroNode, femto_node(i), n); }
    double femto_to_macro_user(std::size_t i, std::size_t n) const { return gain(femto_node(i), kMacroNode, n); }
    double femto_to_femto_user(std::size_t j, std::size_t i, std::size_t n) const
    {
        return gain(femto_node(j), femto_node(i), n);
    }

    std::size_t femto_count() const { return n_femto_; }
    std::size_t subcarrier_count() const { return n_sub_; }
    double path_loss_exponent() const { return exponent_; }

private:
    std::size_t index(std::size_t tx, std::size_t rx, std::size_t n) const;

    std::size_t n_femto_;
    std::size_t n_sub_;
    double exponent_;
    std::vector<double> gains_;
};

/// Pure path-loss gains for every link the capacity formulas use. Identical
/// across subcarriers.
ChannelMatrix channel_gains(const Topology& topo, double path_loss_exponent, std::size_t n_sub);

/// Femto and macro transmit powers. The dBm fields are authoritative; the
/// milliwatt mirror is refreshed on every write.
class PowerAllocation {
public:
    /// Femto powers start at `initial_femto_dbm` everywhere; the macro budget
    /// is split equally (in linear power) across subcarriers.
    PowerAllocation(std::size_t n_femto, std::size_t n_sub, double initial_femto_dbm, double macro_budget_dbm = 43.0,
                    double femto_budget_dbm = 15.0);

    std::size_t femto_count() const { return n_femto_; }
    std::size_t subcarrier_count() const { return n_sub_; }

    double femto_dbm(std::size_t i, std::size_t n) const { return femto_dbm_[i * n_sub_ + n]; }
    double femto_mw(std::size_t i, std::size_t n) const { return femto_mw_[i * n_sub_ + n]; }
    void set_femto_dbm(std::size_t i, std::size_t n, double dbm);
    /// Linear write used when a femtocell is switched off (0 mW, -inf dBm).
    void set_femto_mw(std::size_t i, std::size_t n, double mw);

    double macro_dbm(std::size_t n) const { return macro_dbm_[n]; }
    double macro_mw(std::size_t n) const { return macro_mw_[n]; }
    void set_macro_mw(std::size_t n, double mw);

    /// Sum of femto i's linear powers over all subcarriers.
    double femto_total_mw(std::size_t i) const;
    double macro_total_mw() const;

    double femto_budget_dbm() const { return femto_budget_dbm_; }
    double macro_budget_dbm() const { return macro_budget_dbm_; }
    bool within_femto_budget(std::size_t i) const;

    bool operator==(const PowerAllocation&) const = default;

private:
    std::size_t n_femto_;
    std::size_t n_sub_;
    double macro_budget_dbm_;
    double femto_budget_dbm_;
    std::vector<double> femto_dbm_;
    std::vector<double> femto_mw_;
    std::vector<double> macro_dbm_;
    std::vector<double> macro_mw_;
};

/// Capacities in bits/sec/Hz.
struct CapacityReport {
    std::size_t n_femto = 0;
    std::size_t n_sub = 0;
    double noise_mw = 0.0;
    std::vector<double> macro;  // [n]
    std::vector<double> femto;  // [i * n_sub + n]

    double macro_at(std::size_t n) const { return macro[n]; }
    double femto_at(std::size_t i, std::size_t n) const { return femto[i * n_sub + n]; }
    double femto_total(std::size_t i) const;
};

/// log2(1 + h_oo P_o / (sum_i h_io P_i + noise)).
double macro_capacity(const ChannelMatrix& ch, const PowerAllocation& pa, std::size_t n, double noise_mw);

/// log2(1 + h_ii P_i / (sum_{j != i} h_ji P_j + h_oi P_o + noise)).
double femto_capacity(const ChannelMatrix& ch, const PowerAllocation& pa, std::size_t i, std::size_t n,
                      double noise_mw);

CapacityReport evaluate_capacities(const ChannelMatrix& ch, const PowerAllocation& pa, double noise_mw);

}  // namespace femtoq
