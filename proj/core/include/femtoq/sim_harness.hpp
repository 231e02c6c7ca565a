#pragma once

// The multi-agent episode: every Q-iteration each femtocell picks a power on
// each subcarrier (optionally after exchanging Q-rows), the joint allocation
// is evaluated once, and every (agent, subcarrier) pair is rewarded and
// updated from that shared outcome.

#include "femtoq/dpcq_agents.hpp"
#include "femtoq/radio_env.hpp"
#include "femtoq/tabular_q.hpp"
#include "femtoq/trace.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace femtoq {

enum class Paradigm { IL, CL };

std::string_view to_string(Paradigm p);
Paradigm paradigm_from_string(std::string_view s);

std::vector<double> standard_action_levels();

/// When rewards are computed relative to the acting order.
///  - Joint: every agent acts on every subcarrier, then one evaluation
///    rewards all of them.
///  - Sequential: each agent is rewarded, observes and updates right after
///    its own commit, so later agents see the state it left behind.
enum class CommitOrder { Joint, Sequential };

std::string_view to_string(CommitOrder c);
CommitOrder commit_order_from_string(std::string_view s);

struct SimConfig {
    std::size_t n_femto = 4;
    std::size_t n_sub = 6;
    std::size_t q_iterations = 3000;
    Paradigm paradigm = Paradigm::IL;
    CommitOrder commit_order = CommitOrder::Joint;
    RewardSpec reward;
    LearningParams learning;
    double noise_power = 1e-7;  // mW
    double path_loss_exponent = 2.0;
    double femto_budget_dbm = 15.0;
    double macro_budget_dbm = 43.0;
    double power_window_a1_db = 5.0;
    double power_window_a2_db = 5.0;
    double initial_power_dbm = -20.0;
    std::vector<double> action_levels_dbm = standard_action_levels();
    std::uint64_t rng_seed = 1;
    /// Placement seed; falls back to rng_seed when unset.
    std::optional<std::uint64_t> topology_seed;
    /// Fixed layout; overrides random placement when set.
    std::optional<Topology> topology;

    /// Throws std::invalid_argument on out-of-range fields.
    void validate() const;
    ActionSet actions() const { return ActionSet(action_levels_dbm); }
    PowerLevelThresholds thresholds() const { return {femto_budget_dbm, power_window_a1_db, power_window_a2_db}; }
    std::uint64_t placement_seed() const { return topology_seed.value_or(rng_seed); }
    bool operator==(const SimConfig&) const = default;
};

/// Lossless, zero-delay, all-to-all delivery of shared Q-rows with a running
/// count of what was sent.
class CooperationBus {
public:
    /// rows[i] must come from agent i. Returns, for each agent, the rows of
    /// every other agent in ascending sender order.
    std::vector<std::vector<SharedQRow>> exchange(std::span<const SharedQRow> rows);

    std::uint64_t rows_delivered() const { return rows_; }
    std::uint64_t entries_delivered() const { return entries_; }
    void restore(std::uint64_t rows, std::uint64_t entries)
    {
        rows_ = rows;
        entries_ = entries;
    }

private:
    std::uint64_t rows_ = 0;
    std::uint64_t entries_ = 0;
};

/// N * (N - 1) * |A| Q-values per exchange.
std::uint64_t entries_per_exchange(std::size_t n_agents, std::size_t action_count);

struct InitialCondition {
    PowerAllocation powers;
    CapacityReport capacities;
    std::vector<AgentState> states;  // [i * n_sub + n]
};

/// Every femto power at cfg.initial_power_dbm, capacities evaluated, states encoded.
InitialCondition initial_state(const SimConfig& cfg, const Topology& topo, const ChannelMatrix& channels);

/// One episode, steppable and checkpointable.
class Episode {
public:
    explicit Episode(SimConfig cfg);

    /// Restores an episode saved with checkpoint(); continuing it produces
    /// the same records an uninterrupted run would.
    static Episode restore(std::string_view checkpoint_json);
    std::string checkpoint() const;

    bool finished() const { return iteration_ >= cfg_.q_iterations; }
    std::size_t iteration() const { return iteration_; }

    /// Runs one Q-iteration and returns its record.
    IterationRecord step();

    /// Steps to the end; the trace holds the records produced by this call.
    RunTrace run();

    const SimConfig& config() const { return cfg_; }
    const Topology& topology() const { return topo_; }
    const ChannelMatrix& channels() const { return channels_; }
    const PowerAllocation& powers() const { return powers_; }
    const CapacityReport& capacities() const { return caps_; }
    const ActionSet& actions() const { return actions_; }
    const std::vector<QTable>& tables() const { return tables_; }
    AgentState state(std::size_t i, std::size_t n) const { return states_[i * cfg_.n_sub + n]; }
    const CooperationBus& bus() const { return bus_; }
    /// Q-updates applied to agent i's table so far.
    std::uint64_t update_count(std::size_t i) const { return updates_.at(i); }

private:
    Episode(SimConfig cfg, Topology topo);
    void refresh_states();
    void refresh_state(std::size_t i, std::size_t n);
    std::size_t choose(std::size_t i, std::size_t n, const std::vector<SharedQRow>& shared,
                       const std::vector<std::vector<SharedQRow>>& inbox);
    void act_joint(IterationRecord& rec);
    void act_sequential(IterationRecord& rec);
    void learn(std::size_t i, std::size_t n, const AgentStep& st);

    SimConfig cfg_;
    Topology topo_;
    ChannelMatrix channels_;
    ActionSet actions_;
    PowerAllocation powers_;
    CapacityReport caps_;
    std::vector<AgentState> states_;
    std::vector<QTable> tables_;
    CooperationBus bus_;
    std::vector<std::uint64_t> updates_;
    Rng rng_;
    std::size_t iteration_ = 0;
};

/// Full episode plus run-level summary metrics.
RunTrace run_episode(const SimConfig& cfg);

}  // namespace femtoq
