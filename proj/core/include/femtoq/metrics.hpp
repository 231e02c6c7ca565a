#pragma once

#include "femtoq/trace.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace femtoq {

/// (sum x)^2 / (n sum x^2). An all-zero input returns 1 (every femtocell
/// equally starved). Throws std::invalid_argument on empty input or a
/// negative value.
double jain_index(std::span<const double> values);

/// Half-open iteration range [begin, end).
struct IterationWindow {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t size() const { return end - begin; }
};

/// The final `fraction` of a trace of the given length, at least one iteration.
IterationWindow tail_window(std::size_t trace_length, double fraction = 0.1);

/// Mean over the window of sum_i sum_n C_i. Throws on an empty or
/// out-of-range window.
double aggregate_femto_capacity(const RunTrace& trace, IterationWindow window);
double aggregate_femto_capacity(const RunTrace& trace);

/// Per-femtocell capacity (summed over subcarriers) averaged over the window.
std::vector<double> mean_femto_capacity(const RunTrace& trace, IterationWindow window);

/// Mean |C_o - target| per subcarrier over the window.
std::vector<double> macro_deviation(const RunTrace& trace, double target, IterationWindow window);

struct ConvergenceResult {
    bool converged = false;
    std::size_t iteration = 0;
    /// Mean |C_o - target| over every subcarrier in the last 10% of iterations.
    double terminal_deviation = 0.0;
};

/// First iteration that starts `hold` consecutive iterations with every
/// subcarrier inside target +- band.
ConvergenceResult convergence_metrics(const RunTrace& trace, double target, double band = 0.5, std::size_t hold = 100);

/// Run-level numbers over the default tail window.
RunSummary summarize(const RunTrace& trace, double target);

/// Closed form T * n_sub * N * (N - 1) * |A|.
std::uint64_t expected_shared_entries(std::size_t iterations, std::size_t n_sub, std::size_t n_agents,
                                      std::size_t action_count);

}  // namespace femtoq
