#include "femtoq/dpcq_agents.hpp"

#include "femtoq/units.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace femtoq {

AgentState AgentState::from_id(std::size_t id)
{
    if (id >= kStateCount) throw std::out_of_range("AgentState: id out of range");
    return AgentState{static_cast<int>(id / 3), static_cast<int>(id % 3)};
}

ActionSet ActionSet::standard()
{
    std::vector<double> levels;
    for (int dbm = -20; dbm <= 15; dbm += 2) levels.push_back(dbm);
    return ActionSet(std::move(levels));
}

ActionSet::ActionSet(std::vector<double> levels_dbm) : levels_(std::move(levels_dbm))
{
    if (levels_.empty()) throw std::invalid_argument("ActionSet: no levels");
    for (std::size_t k = 1; k < levels_.size(); ++k) {
        if (!(levels_[k] > levels_[k - 1])) throw std::invalid_argument("ActionSet: levels must be strictly ascending");
    }
}

bool ActionSet::contains_dbm(double dbm) const
{
    return std::find(levels_.begin(), levels_.end(), dbm) != levels_.end();
}

std::string_view to_string(RewardKind kind)
{
    switch (kind) {
    case RewardKind::RF1: return "RF1";
    case RewardKind::RF2: return "RF2";
    case RewardKind::RF3: return "RF3";
    }
    return "?";
}

RewardKind reward_kind_from_string(std::string_view s)
{
    if (s == "RF1") return RewardKind::RF1;
    if (s == "RF2") return RewardKind::RF2;
    if (s == "RF3") return RewardKind::RF3;
    throw std::invalid_argument("unknown reward kind '" + std::string(s) + "'");
}

void RewardSpec::validate() const
{
    if (!(target_capacity > 0.0)) throw std::invalid_argument("reward: target_capacity must be > 0");
    if (kind == RewardKind::RF2 && !(k > 0.0)) throw std::invalid_argument("reward: K must be > 0 for RF2");
}

std::string RewardSpec::label() const
{
    if (kind != RewardKind::RF2) return std::string(to_string(kind));
    std::ostringstream os;
    os << "RF2(K=" << k << ')';
    return os.str();
}

int power_level(double total_femto_mw, const PowerLevelThresholds& th)
{
    if (total_femto_mw < dbm_to_mw(th.budget_dbm - th.a1_db)) return 0;
    // Overlap (a2 > a1) resolves to level 0 above; a gap (a2 < a1) folds into level 1.
    if (total_femto_mw <= dbm_to_mw(th.budget_dbm)) return 1;
    return 2;
}

AgentState encode_state(double macro_capacity, double total_femto_mw, double target_capacity,
                        const PowerLevelThresholds& th)
{
    return AgentState{macro_capacity < target_capacity ? 1 : 0, power_level(total_femto_mw, th)};
}

double reward_rf1(double c_o, bool budget_ok, double target)
{
    if (!budget_ok) return -1.0;
    const double d = c_o - target;
    return std::exp(-d * d);
}

double reward_rf2(double c_o, bool budget_ok, double target, double k)
{
    if (!budget_ok) return 0.0;
    const double d = c_o - target;
    return k - d * d;
}

double reward_rf3(double c_o, double c_i, bool budget_ok, double target)
{
    if (!budget_ok) return -3.0;
    const double d = c_o - target;
    return std::exp(-d * d) - std::exp(-c_i);
}

bool reward_in_bounds(const RewardSpec& spec, double r)
{
    if (std::isnan(r)) return false;
    switch (spec.kind) {
    case RewardKind::RF1: return r == -1.0 || (r > 0.0 && r <= 1.0);
    case RewardKind::RF2: return r == 0.0 || r <= spec.k;
    case RewardKind::RF3: return r == -3.0 || (r > -1.0 && r < 1.0);
    }
    return false;
}

double compute_reward(const RewardSpec& spec, double c_o, double c_i, bool budget_ok)
{
    double r = 0.0;
    switch (spec.kind) {
    case RewardKind::RF1: r = reward_rf1(c_o, budget_ok, spec.target_capacity); break;
    case RewardKind::RF2: r = reward_rf2(c_o, budget_ok, spec.target_capacity, spec.k); break;
    case RewardKind::RF3: r = reward_rf3(c_o, c_i, budget_ok, spec.target_capacity); break;
    }
    if (!reward_in_bounds(spec, r)) {
        std::ostringstream os;
        os << spec.label() << " reward " << r << " outside its range (C_o=" << c_o << ", C_i=" << c_i << ')';
        throw std::logic_error(os.str());
    }
    return r;
}

std::string SharedQRow::serialize() const
{
    std::ostringstream os;
    os.precision(std::numeric_limits<double>::max_digits10);
    os << sender << ',' << subcarrier;
    for (double q : row) os << ',' << q;
    return os.str();
}

SharedQRow SharedQRow::parse(std::string_view text)
{
    std::vector<std::string> fields;
    std::string cur;
    for (char c : text) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\n' && c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    if (fields.size() < 3) throw std::invalid_argument("SharedQRow: expected sender, subcarrier and values");

    auto to_index = [](const std::string& f) {
        std::size_t v = 0;
        auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
        if (ec != std::errc{} || p != f.data() + f.size()) throw std::invalid_argument("SharedQRow: bad index '" + f + "'");
        return v;
    };
    SharedQRow out;
    out.sender = to_index(fields[0]);
    out.subcarrier = to_index(fields[1]);
    for (std::size_t k = 2; k < fields.size(); ++k) {
        std::size_t used = 0;
        const double v = std::stod(fields[k], &used);
        if (used != fields[k].size() || !std::isfinite(v)) throw std::invalid_argument("SharedQRow: bad value");
        out.row.push_back(v);
    }
    return out;
}

std::size_t select_action_il(const QTable& table, AgentState s, const LearningParams& params, std::size_t t,
                             std::size_t t_total, Rng& rng)
{
    return select_action_epsilon(table, s.id(), params, t, t_total, rng);
}

std::size_t select_action_cl(const SharedQRow& own, std::span<const SharedQRow> received, std::size_t agent_count)
{
    if (received.size() + 1 != agent_count) {
        throw std::invalid_argument("cooperation: expected " + std::to_string(agent_count - 1) + " peer rows, got " +
                                    std::to_string(received.size()));
    }
    std::vector<bool> seen(agent_count, false);
    if (own.sender >= agent_count) throw std::invalid_argument("cooperation: own sender id out of range");
    seen[own.sender] = true;
    std::vector<double> sum = own.row;
    for (const auto& peer : received) {
        if (peer.sender >= agent_count || seen[peer.sender]) {
            throw std::invalid_argument("cooperation: missing or duplicate row from agent " + std::to_string(peer.sender));
        }
        if (peer.subcarrier != own.subcarrier) throw std::invalid_argument("cooperation: row from another subcarrier");
        if (peer.row.size() != sum.size()) throw std::invalid_argument("cooperation: row length mismatch");
        seen[peer.sender] = true;
        for (std::size_t a = 0; a < sum.size(); ++a) sum[a] += peer.row[a];
    }
    return argmax_lowest(sum);
}

std::size_t select_action_cl(const SharedQRow& own, std::span<const SharedQRow> received, std::size_t agent_count,
                             const LearningParams& params, std::size_t t, std::size_t t_total, Rng& rng)
{
    if (auto a = explore(params, t, t_total, own.row.size(), rng)) return *a;
    return select_action_cl(own, received, agent_count);
}

}  // namespace femtoq
