#pragma once

// Environment-agnostic tabular Q-learning: the table, the one-step update,
// greedy and epsilon-greedy selection, and a flat text format for tables.

#include "femtoq/random.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace femtoq {

struct LearningParams {
    double alpha = 0.5;
    double gamma = 0.9;
    double epsilon = 0.1;
    /// Exploration applies during the first `epsilon_active_fraction` of the
    /// iterations; afterwards selection is purely greedy.
    double epsilon_active_fraction = 0.8;

    /// Throws std::invalid_argument if any field is out of range.
    void validate() const;
    bool operator==(const LearningParams&) const = default;
};

class QTable {
public:
    QTable() = default;
    QTable(std::size_t states, std::size_t actions);

    std::size_t state_count() const { return states_; }
    std::size_t action_count() const { return actions_; }

    double at(std::size_t s, std::size_t a) const;
    void set(std::size_t s, std::size_t a, double value);
    std::span<const double> row(std::size_t s) const;
    double max_value(std::size_t s) const;
    std::span<const double> values() const { return values_; }

    /// Q(s,a) := (1 - alpha) Q(s,a) + alpha (r + gamma max_b Q(s',b)).
    /// Touches exactly one entry. Throws std::out_of_range on bad indices.
    void update(std::size_t s, std::size_t a, double reward, std::size_t s_next, double alpha, double gamma);

    bool operator==(const QTable&) const = default;

private:
    void check_state(std::size_t s) const;

    std::size_t states_ = 0;
    std::size_t actions_ = 0;
    std::vector<double> values_;
};

inline void q_update(QTable& table, std::size_t s, std::size_t a, double reward, std::size_t s_next,
                     const LearningParams& params)
{
    table.update(s, a, reward, s_next, params.alpha, params.gamma);
}

/// Index of the largest entry; ties go to the lowest index.
std::size_t argmax_lowest(std::span<const double> values);

std::size_t select_action_greedy(const QTable& table, std::size_t s);

/// True while iteration t lies in the exploration window.
bool exploration_active(const LearningParams& params, std::size_t t, std::size_t t_total);

/// The epsilon gate on its own: a uniformly random action with probability
/// epsilon inside the exploration window, otherwise nullopt. Consumes one
/// draw per call inside the window when epsilon > 0 and a second one when
/// it explores.
std::optional<std::size_t> explore(const LearningParams& params, std::size_t t, std::size_t t_total,
                                   std::size_t action_count, Rng& rng);

std::size_t select_action_epsilon(const QTable& table, std::size_t s, const LearningParams& params, std::size_t t,
                                  std::size_t t_total, Rng& rng);

/// Flat text: a "<states> <actions>" line followed by one row per state,
/// values written with round-trip precision.
void write_qtable(std::ostream& os, const QTable& table);
QTable read_qtable(std::istream& is);

}  // namespace femtoq
