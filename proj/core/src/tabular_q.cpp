#include "femtoq/tabular_q.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace femtoq {

void LearningParams::validate() const
{
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("learning: alpha must lie in [0, 1]");
    if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("learning: gamma must lie in [0, 1)");
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("learning: epsilon must lie in [0, 1]");
    if (!(epsilon_active_fraction >= 0.0 && epsilon_active_fraction <= 1.0)) {
        throw std::invalid_argument("learning: epsilon_active_fraction must lie in [0, 1]");
    }
}

QTable::QTable(std::size_t states, std::size_t actions)
    : states_(states), actions_(actions), values_(states * actions, 0.0)
{
    if (states == 0 || actions == 0) throw std::invalid_argument("QTable: needs at least one state and one action");
}

void QTable::check_state(std::size_t s) const
{
    if (s >= states_) throw std::out_of_range("QTable: state " + std::to_string(s) + " out of range");
}

double QTable::at(std::size_t s, std::size_t a) const
{
    check_state(s);
    if (a >= actions_) throw std::out_of_range("QTable: action " + std::to_string(a) + " out of range");
    return values_[s * actions_ + a];
}

void QTable::set(std::size_t s, std::size_t a, double value)
{
    check_state(s);
    if (a >= actions_) throw std::out_of_range("QTable: action " + std::to_string(a) + " out of range");
    values_[s * actions_ + a] = value;
}

std::span<const double> QTable::row(std::size_t s) const
{
    check_state(s);
    return std::span<const double>(values_).subspan(s * actions_, actions_);
}

double QTable::max_value(std::size_t s) const
{
    const auto r = row(s);
    return *std::max_element(r.begin(), r.end());
}

void QTable::update(std::size_t s, std::size_t a, double reward, std::size_t s_next, double alpha, double gamma)
{
    check_state(s_next);
    const double target = reward + gamma * max_value(s_next);
    const double old = at(s, a);
    values_[s * actions_ + a] = (1.0 - alpha) * old + alpha * target;
}

std::size_t argmax_lowest(std::span<const double> values)
{
    if (values.empty()) throw std::invalid_argument("argmax_lowest: empty row");
    std::size_t best = 0;
    for (std::size_t a = 1; a < values.size(); ++a) {
        if (values[a] > values[best]) best = a;
    }
    return best;
}

std::size_t select_action_greedy(const QTable& table, std::size_t s) { return argmax_lowest(table.row(s)); }

bool exploration_active(const LearningParams& params, std::size_t t, std::size_t t_total)
{
    return static_cast<double>(t) < params.epsilon_active_fraction * static_cast<double>(t_total);
}

std::optional<std::size_t> explore(const LearningParams& params, std::size_t t, std::size_t t_total,
                                   std::size_t action_count, Rng& rng)
{
    if (params.epsilon <= 0.0 || !exploration_active(params, t, t_total)) return std::nullopt;
    if (uniform01(rng) < params.epsilon) return uniform_index(rng, action_count);
    return std::nullopt;
}

std::size_t select_action_epsilon(const QTable& table, std::size_t s, const LearningParams& params, std::size_t t,
                                  std::size_t t_total, Rng& rng)
{
    if (auto a = explore(params, t, t_total, table.action_count(), rng)) return *a;
    return select_action_greedy(table, s);
}

void write_qtable(std::ostream& os, const QTable& table)
{
    const auto old_precision = os.precision(std::numeric_limits<double>::max_digits10);
    os << table.state_count() << ' ' << table.action_count() << '\n';
    for (std::size_t s = 0; s < table.state_count(); ++s) {
        const auto r = table.row(s);
        for (std::size_t a = 0; a < r.size(); ++a) os << (a ? " " : "") << r[a];
        os << '\n';
    }
    os.precision(old_precision);
}

QTable read_qtable(std::istream& is)
{
    std::size_t states = 0, actions = 0;
    if (!(is >> states >> actions)) throw std::runtime_error("read_qtable: missing dimensions");
    QTable table(states, actions);
    for (std::size_t s = 0; s < states; ++s) {
        for (std::size_t a = 0; a < actions; ++a) {
            double v = 0.0;
            if (!(is >> v)) throw std::runtime_error("read_qtable: truncated table");
            if (!std::isfinite(v)) throw std::runtime_error("read_qtable: non-finite entry");
            table.set(s, a, v);
        }
    }
    return table;
}

}  // namespace femtoq
