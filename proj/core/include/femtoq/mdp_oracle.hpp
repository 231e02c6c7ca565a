#pragma once

// Small fully-known MDPs, their exact solution by value iteration, and a
// model-free Q-learning run on the same MDP. Comparing the two is how the
// Q-learning core is checked for correctness.

#include "femtoq/tabular_q.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace femtoq {

struct ToyMdp {
    std::size_t states = 0;
    std::size_t actions = 0;
    double gamma = 0.9;
    std::vector<double> transition;  // [(s * actions + a) * states + s']
    std::vector<double> reward;      // [s * actions + a], expected reward

    double p(std::size_t s, std::size_t a, std::size_t s_next) const
    {
        return transition[(s * actions + a) * states + s_next];
    }
    double r(std::size_t s, std::size_t a) const { return reward[s * actions + a]; }

    /// Throws std::invalid_argument unless every transition row sums to 1
    /// within 1e-9 and gamma lies in [0, 1).
    void validate() const;
};

/// Random MDP in the Garnet style: each (s, a) leads to `branching`
/// distinct successor states with random weights; rewards uniform in [0, 1).
ToyMdp random_toy_mdp(std::size_t states, std::size_t actions, double gamma, std::uint64_t seed,
                      std::size_t branching);

struct OracleSolution {
    std::vector<double> values;        // V*
    std::vector<std::size_t> policy;   // greedy w.r.t. Q*, lowest index on ties
    QTable q;                          // Q*
    std::size_t sweeps = 0;
};

/// Iterates V(s) <- max_a (r(s,a) + gamma sum_s' P(s'|s,a) V(s')) until the
/// sup-norm change drops below tol.
OracleSolution value_iteration_oracle(const ToyMdp& mdp, double tol);

struct MdpLearningOptions {
    std::size_t steps = 100000;
    double epsilon = 0.2;
    /// alpha = (1 + visits(s,a))^(-rate_exponent); 1 gives the harmonic
    /// schedule 1 / (1 + visits).
    double rate_exponent = 1.0;
    std::uint64_t seed = 1;
};

/// Single trajectory of epsilon-greedy Q-learning from state 0.
QTable learn_on_mdp(const ToyMdp& mdp, const MdpLearningOptions& options);

struct OracleComparison {
    bool policy_match = false;
    /// max_s |max_a Q(s,a) - V*(s)| / max_s |V*(s)|
    double relative_value_error = 0.0;
    std::vector<std::size_t> learned_policy;
    std::vector<std::size_t> optimal_policy;
};

OracleComparison compare_with_oracle(const QTable& learned, const OracleSolution& oracle);

}  // namespace femtoq
