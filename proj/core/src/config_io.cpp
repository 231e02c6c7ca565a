#include "femtoq/config_io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace femtoq {

using nlohmann::json;

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed, const char* where)
{
    if (!j.is_object()) throw std::invalid_argument(std::string(where) + ": expected an object");
    for (const auto& [key, _] : j.items()) {
        bool known = false;
        for (const char* a : allowed) known = known || key == a;
        if (!known) throw std::invalid_argument(std::string(where) + ": unknown key '" + key + "'");
    }
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

namespace {

template <typename T>
void read_if(const json& j, const char* key, T& out)
{
    if (j.contains(key)) out = j.at(key).get<T>();
}

json point_json(Point p) { return json::array({p.x, p.y}); }
Point point_from(const json& j)
{
    if (!j.is_array() || j.size() != 2) throw std::invalid_argument("topology: points are [x, y] pairs");
    return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

json to_json(const RewardSpec& r)
{
    return {{"kind", std::string(to_string(r.kind))}, {"target_capacity", r.target_capacity}, {"k", r.k}};
}

RewardSpec reward_spec_from_json(const json& j)
{
    reject_unknown_keys(j, {"kind", "target_capacity", "k"}, "reward");
    RewardSpec r;
    if (j.contains("kind")) r.kind = reward_kind_from_string(j.at("kind").get<std::string>());
    read_if(j, "target_capacity", r.target_capacity);
    read_if(j, "k", r.k);
    r.validate();
    return r;
}

json to_json(const LearningParams& p)
{
    return {{"alpha", p.alpha},
            {"gamma", p.gamma},
            {"epsilon", p.epsilon},
            {"epsilon_active_fraction", p.epsilon_active_fraction}};
}

LearningParams learning_params_from_json(const json& j)
{
    reject_unknown_keys(j, {"alpha", "gamma", "epsilon", "epsilon_active_fraction"}, "learning");
    LearningParams p;
    read_if(j, "alpha", p.alpha);
    read_if(j, "gamma", p.gamma);
    read_if(j, "epsilon", p.epsilon);
    read_if(j, "epsilon_active_fraction", p.epsilon_active_fraction);
    p.validate();
    return p;
}

json to_json(const Topology& t)
{
    json fbs = json::array(), users = json::array();
    for (std::size_t i = 0; i < t.femto_count(); ++i) {
        fbs.push_back(point_json(t.fbs[i]));
        users.push_back(point_json(t.femto_users[i]));
    }
    return {{"mbs", point_json(t.mbs)},
            {"macro_user", point_json(t.macro_user)},
            {"fbs", fbs},
            {"femto_users", users}};
}

Topology topology_from_json(const json& j)
{
    reject_unknown_keys(j, {"mbs", "macro_user", "fbs", "femto_users"}, "topology");
    Topology t;
    t.mbs = point_from(j.at("mbs"));
    t.macro_user = point_from(j.at("macro_user"));
    for (const auto& p : j.at("fbs")) t.fbs.push_back(point_from(p));
    for (const auto& p : j.at("femto_users")) t.femto_users.push_back(point_from(p));
    if (t.fbs.size() != t.femto_users.size()) throw std::invalid_argument("topology: fbs/femto_users length mismatch");
    return t;
}

json to_json(const SimConfig& c)
{
    json j = {{"n_femto", c.n_femto},
              {"n_sub", c.n_sub},
              {"q_iterations", c.q_iterations},
              {"paradigm", std::string(to_string(c.paradigm))},
              {"commit_order", std::string(to_string(c.commit_order))},
              {"reward", to_json(c.reward)},
              {"learning", to_json(c.learning)},
              {"noise_power", c.noise_power},
              {"path_loss_exponent", c.path_loss_exponent},
              {"femto_budget_dbm", c.femto_budget_dbm},
              {"macro_budget_dbm", c.macro_budget_dbm},
              {"power_window_a1_db", c.power_window_a1_db},
              {"power_window_a2_db", c.power_window_a2_db},
              {"initial_power_dbm", c.initial_power_dbm},
              {"action_levels_dbm", c.action_levels_dbm},
              {"rng_seed", c.rng_seed}};
    if (c.topology_seed) j["topology_seed"] = *c.topology_seed;
    if (c.topology) j["topology"] = to_json(*c.topology);
    return j;
}

SimConfig sim_config_from_json(const json& j, const std::string& base_dir)
{
    reject_unknown_keys(j,
                        {"n_femto", "n_sub", "q_iterations", "paradigm", "commit_order", "reward", "learning", "noise_power",
                         "path_loss_exponent", "femto_budget_dbm", "macro_budget_dbm", "power_window_a1_db",
                         "power_window_a2_db", "initial_power_dbm", "action_levels_dbm", "rng_seed",
                         "topology_seed", "topology", "topology_file"},
                        "config");
    SimConfig c;
    read_if(j, "n_femto", c.n_femto);
    read_if(j, "n_sub", c.n_sub);
    read_if(j, "q_iterations", c.q_iterations);
    if (j.contains("paradigm")) c.paradigm = paradigm_from_string(j.at("paradigm").get<std::string>());
    if (j.contains("commit_order")) c.commit_order = commit_order_from_string(j.at("commit_order").get<std::string>());
    if (j.contains("reward")) c.reward = reward_spec_from_json(j.at("reward"));
    if (j.contains("learning")) c.learning = learning_params_from_json(j.at("learning"));
    read_if(j, "noise_power", c.noise_power);
    read_if(j, "path_loss_exponent", c.path_loss_exponent);
    read_if(j, "femto_budget_dbm", c.femto_budget_dbm);
    read_if(j, "macro_budget_dbm", c.macro_budget_dbm);
    read_if(j, "power_window_a1_db", c.power_window_a1_db);
    read_if(j, "power_window_a2_db", c.power_window_a2_db);
    read_if(j, "initial_power_dbm", c.initial_power_dbm);
    read_if(j, "action_levels_dbm", c.action_levels_dbm);
    read_if(j, "rng_seed", c.rng_seed);
    if (j.contains("topology_seed")) c.topology_seed = j.at("topology_seed").get<std::uint64_t>();
    if (j.contains("topology") && j.contains("topology_file")) {
        throw std::invalid_argument("config: give either 'topology' or 'topology_file', not both");
    }
    if (j.contains("topology")) c.topology = topology_from_json(j.at("topology"));
    if (j.contains("topology_file")) {
        const auto path = std::filesystem::path(base_dir) / j.at("topology_file").get<std::string>();
        c.topology = topology_from_text(read_file(path.string()));
    }
    c.validate();
    return c;
}

}  // namespace femtoq
