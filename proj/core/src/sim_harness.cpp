#include "femtoq/sim_harness.hpp"

#include "femtoq/config_io.hpp"
#include "femtoq/metrics.hpp"

#include <nlohmann/json.hpp>

#include <limits>
#include <sstream>
#include <stdexcept>

namespace femtoq {

std::string_view to_string(Paradigm p) { return p == Paradigm::IL ? "IL" : "CL"; }

Paradigm paradigm_from_string(std::string_view s)
{
    if (s == "IL") return Paradigm::IL;
    if (s == "CL") return Paradigm::CL;
    throw std::invalid_argument("unknown paradigm '" + std::string(s) + "' (expected IL or CL)");
}

std::string_view to_string(CommitOrder c) { return c == CommitOrder::Joint ? "joint" : "sequential"; }

CommitOrder commit_order_from_string(std::string_view s)
{
    if (s == "joint") return CommitOrder::Joint;
    if (s == "sequential") return CommitOrder::Sequential;
    throw std::invalid_argument("unknown commit_order '" + std::string(s) + "' (expected joint or sequential)");
}

std::vector<double> standard_action_levels()
{
    const auto set = ActionSet::standard();
    return {set.levels().begin(), set.levels().end()};
}

void SimConfig::validate() const
{
    if (n_femto < 1) throw std::invalid_argument("config: n_femto must be >= 1");
    if (n_sub < 1) throw std::invalid_argument("config: n_sub must be >= 1");
    if (q_iterations < 1) throw std::invalid_argument("config: q_iterations must be >= 1");
    if (!(noise_power > 0.0)) throw std::invalid_argument("config: noise_power must be > 0");
    if (!(path_loss_exponent > 0.0)) throw std::invalid_argument("config: path_loss_exponent must be > 0");
    if (action_levels_dbm.size() > 255) throw std::invalid_argument("config: at most 255 action levels");
    reward.validate();
    learning.validate();
    (void)actions();
    if (topology && topology->femto_count() != n_femto) {
        throw std::invalid_argument("config: topology has " + std::to_string(topology->femto_count()) +
                                    " femtocells but n_femto is " + std::to_string(n_femto));
    }
}

std::vector<std::vector<SharedQRow>> CooperationBus::exchange(std::span<const SharedQRow> rows)
{
    const std::size_t n = rows.size();
    std::vector<std::vector<SharedQRow>> inbox(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].sender != i) throw std::invalid_argument("cooperation bus: rows must be ordered by sender");
        inbox[i].reserve(n > 0 ? n - 1 : 0);
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            inbox[i].push_back(rows[j]);
            ++rows_;
            entries_ += rows[j].row.size();
        }
    }
    return inbox;
}

std::uint64_t entries_per_exchange(std::size_t n_agents, std::size_t action_count)
{
    return n_agents < 2 ? 0 : static_cast<std::uint64_t>(n_agents) * (n_agents - 1) * action_count;
}

InitialCondition initial_state(const SimConfig& cfg, const Topology& topo, const ChannelMatrix& channels)
{
    const std::size_t nf = topo.femto_count();
    InitialCondition init{PowerAllocation(nf, cfg.n_sub, cfg.initial_power_dbm, cfg.macro_budget_dbm,
                                          cfg.femto_budget_dbm),
                          {},
                          {}};
    init.capacities = evaluate_capacities(channels, init.powers, cfg.noise_power);
    init.states.reserve(nf * cfg.n_sub);
    for (std::size_t i = 0; i < nf; ++i) {
        const double total = init.powers.femto_total_mw(i);
        for (std::size_t n = 0; n < cfg.n_sub; ++n) {
            init.states.push_back(
                encode_state(init.capacities.macro_at(n), total, cfg.reward.target_capacity, cfg.thresholds()));
        }
    }
    return init;
}

namespace {

Topology resolve_topology(const SimConfig& cfg)
{
    cfg.validate();
    return cfg.topology ? *cfg.topology : generate_topology(cfg.n_femto, cfg.placement_seed());
}

// Decorrelates the learning stream from the placement stream when both use
// the same seed.
std::uint64_t learning_seed(std::uint64_t seed) { return seed ^ 0x9e3779b97f4a7c15ULL; }

}  // namespace

Episode::Episode(SimConfig cfg) : Episode(cfg, resolve_topology(cfg)) {}

Episode::Episode(SimConfig cfg, Topology topo)
    : cfg_(std::move(cfg)),
      topo_(std::move(topo)),
      channels_(channel_gains(topo_, cfg_.path_loss_exponent, cfg_.n_sub)),
      actions_(cfg_.actions()),
      powers_(0, 1, 0.0),
      rng_(learning_seed(cfg_.rng_seed))
{
    auto init = initial_state(cfg_, topo_, channels_);
    powers_ = std::move(init.powers);
    caps_ = std::move(init.capacities);
    states_ = std::move(init.states);
    tables_.assign(cfg_.n_femto, QTable(kStateCount, actions_.size()));
    updates_.assign(cfg_.n_femto, 0);
}

void Episode::refresh_states()
{
    for (std::size_t i = 0; i < cfg_.n_femto; ++i) {
        const double total = powers_.femto_total_mw(i);
        for (std::size_t n = 0; n < cfg_.n_sub; ++n) {
            states_[i * cfg_.n_sub + n] =
                encode_state(caps_.macro_at(n), total, cfg_.reward.target_capacity, cfg_.thresholds());
        }
    }
}

void Episode::refresh_state(std::size_t i, std::size_t n)
{
    states_[i * cfg_.n_sub + n] = encode_state(caps_.macro_at(n), powers_.femto_total_mw(i),
                                               cfg_.reward.target_capacity, cfg_.thresholds());
}

std::size_t Episode::choose(std::size_t i, std::size_t n, const std::vector<SharedQRow>& shared,
                            const std::vector<std::vector<SharedQRow>>& inbox)
{
    if (cfg_.paradigm == Paradigm::IL) {
        return select_action_il(tables_[i], state(i, n), cfg_.learning, iteration_, cfg_.q_iterations, rng_);
    }
    return select_action_cl(shared[i], inbox[i], cfg_.n_femto, cfg_.learning, iteration_, cfg_.q_iterations, rng_);
}

namespace {

// Every agent's current-state row on subcarrier n, pushed through the bus.
std::vector<std::vector<SharedQRow>> share_rows(const std::vector<QTable>& tables,
                                                const std::vector<AgentState>& states, std::size_t n_sub,
                                                std::size_t n, CooperationBus& bus, std::vector<SharedQRow>& shared)
{
    for (std::size_t i = 0; i < tables.size(); ++i) {
        const auto row = tables[i].row(states[i * n_sub + n].id());
        shared[i] = SharedQRow{i, n, {row.begin(), row.end()}};
    }
    return bus.exchange(shared);
}

}  // namespace

void Episode::act_joint(IterationRecord& rec)
{
    const std::size_t nf = cfg_.n_femto;
    const std::size_t ns = cfg_.n_sub;

    // Act: subcarriers ascending, agents ascending, all from the states
    // observed after the previous joint commit.
    std::vector<SharedQRow> shared(nf);
    std::vector<std::vector<SharedQRow>> inbox;
    for (std::size_t n = 0; n < ns; ++n) {
        if (cfg_.paradigm == Paradigm::CL) inbox = share_rows(tables_, states_, ns, n, bus_, shared);
        for (std::size_t i = 0; i < nf; ++i) {
            const std::size_t a = choose(i, n, shared, inbox);
            auto& st = rec.steps[i * ns + n];
            st.state = static_cast<std::uint8_t>(state(i, n).id());
            st.action = static_cast<std::uint8_t>(a);
            powers_.set_femto_dbm(i, n, actions_.dbm(a));
        }
    }

    // One evaluation of the joint allocation rewards every pair.
    caps_ = evaluate_capacities(channels_, powers_, cfg_.noise_power);
    refresh_states();
    for (std::size_t n = 0; n < ns; ++n) {
        for (std::size_t i = 0; i < nf; ++i) {
            auto& st = rec.steps[i * ns + n];
            st.reward = compute_reward(cfg_.reward, caps_.macro_at(n), caps_.femto_at(i, n),
                                       powers_.within_femto_budget(i));
            learn(i, n, st);
        }
    }
}

void Episode::act_sequential(IterationRecord& rec)
{
    const std::size_t nf = cfg_.n_femto;
    const std::size_t ns = cfg_.n_sub;

    std::vector<SharedQRow> shared(nf);
    std::vector<std::vector<SharedQRow>> inbox;
    for (std::size_t n = 0; n < ns; ++n) {
        if (cfg_.paradigm == Paradigm::CL) inbox = share_rows(tables_, states_, ns, n, bus_, shared);
        for (std::size_t i = 0; i < nf; ++i) {
            auto& st = rec.steps[i * ns + n];
            st.state = static_cast<std::uint8_t>(state(i, n).id());
            st.action = static_cast<std::uint8_t>(choose(i, n, shared, inbox));
            powers_.set_femto_dbm(i, n, actions_.dbm(st.action));

            // Only subcarrier n's capacities move; agent i's power level
            // moves on all of its subcarriers.
            caps_.macro[n] = macro_capacity(channels_, powers_, n, cfg_.noise_power);
            for (std::size_t j = 0; j < nf; ++j) {
                caps_.femto[j * ns + n] = femto_capacity(channels_, powers_, j, n, cfg_.noise_power);
                refresh_state(j, n);
            }
            for (std::size_t m = 0; m < ns; ++m) refresh_state(i, m);

            st.reward = compute_reward(cfg_.reward, caps_.macro_at(n), caps_.femto_at(i, n),
                                       powers_.within_femto_budget(i));
            learn(i, n, st);
        }
    }
}

void Episode::learn(std::size_t i, std::size_t n, const AgentStep& st)
{
    tables_[i].update(st.state, st.action, st.reward, state(i, n).id(), cfg_.learning.alpha, cfg_.learning.gamma);
    ++updates_[i];
}

IterationRecord Episode::step()
{
    if (finished()) throw std::logic_error("Episode::step: episode already finished");
    IterationRecord rec;
    rec.steps.resize(cfg_.n_femto * cfg_.n_sub);
    if (cfg_.commit_order == CommitOrder::Joint) {
        act_joint(rec);
    } else {
        act_sequential(rec);
    }
    rec.macro_capacity = caps_.macro;
    rec.femto_total.resize(cfg_.n_femto);
    for (std::size_t i = 0; i < cfg_.n_femto; ++i) {
        rec.femto_total[i] = caps_.femto_total(i);
        for (std::size_t n = 0; n < cfg_.n_sub; ++n) rec.steps[i * cfg_.n_sub + n].femto_capacity = caps_.femto_at(i, n);
    }
    rec.shared_entries = bus_.entries_delivered();
    ++iteration_;
    return rec;
}

RunTrace Episode::run()
{
    RunTrace trace;
    trace.n_femto = cfg_.n_femto;
    trace.n_sub = cfg_.n_sub;
    trace.iterations.reserve(cfg_.q_iterations - iteration_);
    while (!finished()) trace.iterations.push_back(step());
    trace.summary = summarize(trace, cfg_.reward.target_capacity);
    return trace;
}

RunTrace run_episode(const SimConfig& cfg) { return Episode(cfg).run(); }

std::string Episode::checkpoint() const
{
    nlohmann::json tables = nlohmann::json::array();
    for (const auto& q : tables_) tables.push_back(std::vector<double>(q.values().begin(), q.values().end()));
    nlohmann::json power = nlohmann::json::array();
    for (std::size_t i = 0; i < cfg_.n_femto; ++i) {
        std::vector<double> row(cfg_.n_sub);
        for (std::size_t n = 0; n < cfg_.n_sub; ++n) row[n] = powers_.femto_dbm(i, n);
        power.push_back(row);
    }
    std::ostringstream rng_state;
    rng_state << rng_;

    nlohmann::json j = {{"format", "femtoq-checkpoint"},
                        {"version", 1},
                        {"config", to_json(cfg_)},
                        {"topology", to_json(topo_)},
                        {"iteration", iteration_},
                        {"q_tables", tables},
                        {"femto_power_dbm", power},
                        {"rng_state", rng_state.str()},
                        {"bus_rows", bus_.rows_delivered()},
                        {"bus_entries", bus_.entries_delivered()},
                        {"update_counts", updates_}};
    return j.dump(1);
}

Episode Episode::restore(std::string_view text)
{
    const auto j = nlohmann::json::parse(text);
    if (j.value("format", "") != "femtoq-checkpoint" || j.value("version", 0) != 1) {
        throw std::runtime_error("checkpoint: unrecognised format");
    }
    Episode ep(sim_config_from_json(j.at("config")), topology_from_json(j.at("topology")));

    ep.iteration_ = j.at("iteration").get<std::size_t>();
    const auto& tables = j.at("q_tables");
    if (tables.size() != ep.cfg_.n_femto) throw std::runtime_error("checkpoint: Q-table count mismatch");
    for (std::size_t i = 0; i < tables.size(); ++i) {
        const auto values = tables[i].get<std::vector<double>>();
        auto& q = ep.tables_[i];
        if (values.size() != q.state_count() * q.action_count()) throw std::runtime_error("checkpoint: Q-table size");
        for (std::size_t s = 0; s < q.state_count(); ++s) {
            for (std::size_t a = 0; a < q.action_count(); ++a) q.set(s, a, values[s * q.action_count() + a]);
        }
    }
    const auto& power = j.at("femto_power_dbm");
    for (std::size_t i = 0; i < ep.cfg_.n_femto; ++i) {
        for (std::size_t n = 0; n < ep.cfg_.n_sub; ++n) ep.powers_.set_femto_dbm(i, n, power.at(i).at(n).get<double>());
    }
    std::istringstream rng_state(j.at("rng_state").get<std::string>());
    rng_state >> ep.rng_;
    if (!rng_state) throw std::runtime_error("checkpoint: bad RNG state");
    ep.updates_ = j.at("update_counts").get<std::vector<std::uint64_t>>();
    if (ep.updates_.size() != ep.cfg_.n_femto) throw std::runtime_error("checkpoint: update count mismatch");
    ep.bus_.restore(j.at("bus_rows").get<std::uint64_t>(), j.at("bus_entries").get<std::uint64_t>());

    // States are a function of the committed powers and the capacities they produce.
    ep.caps_ = evaluate_capacities(ep.channels_, ep.powers_, ep.cfg_.noise_power);
    ep.refresh_states();
    return ep;
}

}  // namespace femtoq
