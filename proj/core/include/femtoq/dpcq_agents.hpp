#pragma once

// Femtocell agents: the (interference, power level) state, the dBm action
// grid, the three reward shapes and the independent / cooperative action
// rules. A femtocell keeps one 6 x |A| table shared by all its subcarriers.

#include "femtoq/random.hpp"
#include "femtoq/tabular_q.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace femtoq {

inline constexpr std::size_t kStateCount = 6;

struct AgentState {
    int interference = 0;  // 1 when the macro user is below its target capacity
    int power_level = 0;   // 0 below, 1 inside, 2 above the femto power window

    std::size_t id() const { return static_cast<std::size_t>(interference * 3 + power_level); }
    static AgentState from_id(std::size_t id);
    bool operator==(const AgentState&) const = default;
};

/// Transmit power levels (dBm) available to every femtocell, ascending.
class ActionSet {
public:
    /// -20 dBm up to 15 dBm in 2 dB steps: -20, -18, ..., 14 (18 levels).
    static ActionSet standard();
    /// Arbitrary ascending levels; throws std::invalid_argument otherwise.
    explicit ActionSet(std::vector<double> levels_dbm);

    std::size_t size() const { return levels_.size(); }
    double dbm(std::size_t action) const { return levels_.at(action); }
    std::span<const double> levels() const { return levels_; }
    bool contains_dbm(double dbm) const;

    bool operator==(const ActionSet&) const = default;

private:
    std::vector<double> levels_;
};

enum class RewardKind { RF1, RF2, RF3 };

std::string_view to_string(RewardKind kind);
RewardKind reward_kind_from_string(std::string_view s);

struct RewardSpec {
    RewardKind kind = RewardKind::RF1;
    double target_capacity = 6.0;  // bits/sec/Hz
    double k = 80.0;               // RF2 offset

    void validate() const;
    /// "RF1", "RF2(K=80)", "RF3".
    std::string label() const;
    bool operator==(const RewardSpec&) const = default;
};

/// Power-level window: level 0 below (budget - a1), level 1 within
/// [budget - a2, budget], level 2 above budget. Compared in milliwatts.
struct PowerLevelThresholds {
    double budget_dbm = 15.0;
    double a1_db = 5.0;
    double a2_db = 5.0;
};

int power_level(double total_femto_mw, const PowerLevelThresholds& thresholds = {});

AgentState encode_state(double macro_capacity, double total_femto_mw, double target_capacity,
                        const PowerLevelThresholds& thresholds = {});

inline AgentState encode_state(double macro_capacity, double total_femto_mw, const RewardSpec& spec,
                               const PowerLevelThresholds& thresholds = {})
{
    return encode_state(macro_capacity, total_femto_mw, spec.target_capacity, thresholds);
}

/// exp(-(C_o - target)^2), or -1 over budget.
double reward_rf1(double macro_capacity, bool budget_ok, double target);
/// K - (C_o - target)^2, or 0 over budget.
double reward_rf2(double macro_capacity, bool budget_ok, double target, double k);
/// exp(-(C_o - target)^2) - exp(-C_i), or -3 over budget.
double reward_rf3(double macro_capacity, double femto_capacity, bool budget_ok, double target);

/// Dispatches on spec.kind and checks the result against reward_in_bounds;
/// an out-of-range value throws std::logic_error.
double compute_reward(const RewardSpec& spec, double macro_capacity, double femto_capacity, bool budget_ok);

/// RF1: {-1} u (0,1]. RF2: {0} u (-inf,K]. RF3: {-3} u (-1,1).
bool reward_in_bounds(const RewardSpec& spec, double reward);

/// The current-state Q-row one femtocell shares with its peers.
struct SharedQRow {
    std::size_t sender = 0;
    std::size_t subcarrier = 0;
    std::vector<double> row;

    /// "sender,subcarrier,q0,...,q{|A|-1}" with round-trip precision.
    std::string serialize() const;
    static SharedQRow parse(std::string_view text);
    bool operator==(const SharedQRow&) const = default;
};

/// Independent learner: epsilon gate, then argmax of the agent's own row.
std::size_t select_action_il(const QTable& table, AgentState s, const LearningParams& params, std::size_t t,
                             std::size_t t_total, Rng& rng);

/// Cooperative rule without exploration: argmax over a of the sum of every
/// agent's current-state row, lowest index on ties. `received` must hold
/// exactly one row from each of the other agent_count - 1 agents on the same
/// subcarrier; anything else throws std::invalid_argument.
std::size_t select_action_cl(const SharedQRow& own, std::span<const SharedQRow> received, std::size_t agent_count);

/// Cooperative learner with the same epsilon gate as the independent one.
std::size_t select_action_cl(const SharedQRow& own, std::span<const SharedQRow> received, std::size_t agent_count,
                             const LearningParams& params, std::size_t t, std::size_t t_total, Rng& rng);

}  // namespace femtoq
