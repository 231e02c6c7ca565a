#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace femtoq {

/// What one femtocell did on one subcarrier in one iteration. `state` is the
/// state the action was chosen in.
struct AgentStep {
    std::uint8_t state = 0;
    std::uint8_t action = 0;
    double reward = 0.0;
    double femto_capacity = 0.0;  // C_i on this subcarrier after the joint commit

    bool operator==(const AgentStep&) const = default;
};

struct IterationRecord {
    std::vector<double> macro_capacity;  // [n]
    std::vector<double> femto_total;     // [i], summed over subcarriers
    std::vector<AgentStep> steps;        // [i * n_sub + n]
    std::uint64_t shared_entries = 0;    // cumulative Q-values delivered by the bus

    bool operator==(const IterationRecord&) const = default;
};

struct RunSummary {
    double aggregate_femto_capacity = 0.0;
    double jain_index = 1.0;
    bool converged = false;
    std::size_t convergence_iteration = 0;
    double terminal_deviation = 0.0;
    std::uint64_t shared_entries = 0;

    bool operator==(const RunSummary&) const = default;
};

struct RunTrace {
    std::size_t n_femto = 0;
    std::size_t n_sub = 0;
    std::vector<IterationRecord> iterations;
    RunSummary summary;

    std::size_t size() const { return iterations.size(); }
    const AgentStep& step(std::size_t t, std::size_t i, std::size_t n) const { return iterations[t].steps[i * n_sub + n]; }

    bool operator==(const RunTrace&) const = default;
};

}  // namespace femtoq
