#include "femtoq/mdp_oracle.hpp"

#include "femtoq/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace femtoq {

void ToyMdp::validate() const
{
    if (states == 0 || actions == 0) throw std::invalid_argument("ToyMdp: empty state or action set");
    if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("ToyMdp: gamma must lie in [0, 1)");
    if (transition.size() != states * actions * states || reward.size() != states * actions) {
        throw std::invalid_argument("ToyMdp: table sizes do not match dimensions");
    }
    for (std::size_t sa = 0; sa < states * actions; ++sa) {
        double sum = 0.0;
        for (std::size_t s2 = 0; s2 < states; ++s2) {
            const double v = transition[sa * states + s2];
            if (v < 0.0) throw std::invalid_argument("ToyMdp: negative transition probability");
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("ToyMdp: transition row does not sum to 1");
    }
}

ToyMdp random_toy_mdp(std::size_t states, std::size_t actions, double gamma, std::uint64_t seed,
                      std::size_t branching)
{
    if (branching == 0 || branching > states) throw std::invalid_argument("random_toy_mdp: bad branching factor");
    Rng rng(seed);
    ToyMdp mdp;
    mdp.states = states;
    mdp.actions = actions;
    mdp.gamma = gamma;
    mdp.transition.assign(states * actions * states, 0.0);
    mdp.reward.resize(states * actions);

    std::vector<std::size_t> order(states);
    for (std::size_t sa = 0; sa < states * actions; ++sa) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        // Partial Fisher-Yates picks `branching` distinct successors.
        for (std::size_t k = 0; k < branching; ++k) {
            std::swap(order[k], order[k + uniform_index(rng, states - k)]);
        }
        std::vector<double> w(branching);
        for (auto& x : w) x = 0.05 + uniform01(rng);
        const double total = std::accumulate(w.begin(), w.end(), 0.0);
        for (std::size_t k = 0; k < branching; ++k) mdp.transition[sa * states + order[k]] = w[k] / total;
        mdp.reward[sa] = uniform01(rng);
    }
    return mdp;
}

OracleSolution value_iteration_oracle(const ToyMdp& mdp, double tol)
{
    mdp.validate();
    OracleSolution sol;
    sol.values.assign(mdp.states, 0.0);
    sol.q = QTable(mdp.states, mdp.actions);

    auto backup = [&](const std::vector<double>& v, std::size_t s, std::size_t a) {
        double q = mdp.r(s, a);
        for (std::size_t s2 = 0; s2 < mdp.states; ++s2) q += mdp.gamma * mdp.p(s, a, s2) * v[s2];
        return q;
    };

    std::vector<double> next(mdp.states);
    for (;;) {
        ++sol.sweeps;
        double change = 0.0;
        for (std::size_t s = 0; s < mdp.states; ++s) {
            double best = backup(sol.values, s, 0);
            for (std::size_t a = 1; a < mdp.actions; ++a) best = std::max(best, backup(sol.values, s, a));
            next[s] = best;
            change = std::max(change, std::abs(best - sol.values[s]));
        }
        sol.values.swap(next);
        if (change < tol) break;
    }
    for (std::size_t s = 0; s < mdp.states; ++s) {
        for (std::size_t a = 0; a < mdp.actions; ++a) sol.q.set(s, a, backup(sol.values, s, a));
        sol.policy.push_back(select_action_greedy(sol.q, s));
    }
    return sol;
}

QTable learn_on_mdp(const ToyMdp& mdp, const MdpLearningOptions& opt)
{
    mdp.validate();
    Rng rng(opt.seed);
    QTable q(mdp.states, mdp.actions);
    std::vector<std::size_t> visits(mdp.states * mdp.actions, 0);
    std::size_t s = 0;
    for (std::size_t t = 0; t < opt.steps; ++t) {
        std::size_t a = select_action_greedy(q, s);
        if (uniform01(rng) < opt.epsilon) a = uniform_index(rng, mdp.actions);

        // Sample s' from the row by inverse CDF.
        const double u = uniform01(rng);
        std::size_t s_next = mdp.states - 1;
        double cdf = 0.0;
        for (std::size_t s2 = 0; s2 < mdp.states; ++s2) {
            cdf += mdp.p(s, a, s2);
            if (u < cdf) {
                s_next = s2;
                break;
            }
        }
        auto& n = visits[s * mdp.actions + a];
        const double alpha = std::pow(1.0 + static_cast<double>(n), -opt.rate_exponent);
        ++n;
        q.update(s, a, mdp.r(s, a), s_next, alpha, mdp.gamma);
        s = s_next;
    }
    return q;
}

OracleComparison compare_with_oracle(const QTable& learned, const OracleSolution& oracle)
{
    OracleComparison cmp;
    double err = 0.0, scale = 0.0;
    for (std::size_t s = 0; s < learned.state_count(); ++s) {
        cmp.learned_policy.push_back(select_action_greedy(learned, s));
        err = std::max(err, std::abs(learned.max_value(s) - oracle.values[s]));
        scale = std::max(scale, std::abs(oracle.values[s]));
    }
    cmp.optimal_policy = oracle.policy;
    cmp.policy_match = cmp.learned_policy == cmp.optimal_policy;
    cmp.relative_value_error = scale > 0.0 ? err / scale : err;
    return cmp;
}

}  // namespace femtoq
