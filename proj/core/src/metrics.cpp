#include "femtoq/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace femtoq {

double jain_index(std::span<const double> values)
{
    if (values.empty()) throw std::invalid_argument("jain_index: empty input");
    double sum = 0.0, sum_sq = 0.0;
    for (double x : values) {
        if (x < 0.0) throw std::invalid_argument("jain_index: negative value");
        sum += x;
        sum_sq += x * x;
    }
    if (sum_sq == 0.0) return 1.0;
    return sum * sum / (static_cast<double>(values.size()) * sum_sq);
}

IterationWindow tail_window(std::size_t trace_length, double fraction)
{
    auto len = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(trace_length)));
    len = std::clamp<std::size_t>(len, 1, std::max<std::size_t>(trace_length, 1));
    return {trace_length >= len ? trace_length - len : 0, trace_length};
}

namespace {

void check_window(const RunTrace& trace, IterationWindow w)
{
    if (w.begin >= w.end) throw std::invalid_argument("metrics: empty iteration window");
    if (w.end > trace.size()) throw std::invalid_argument("metrics: window extends past the trace");
}

}  // namespace

std::vector<double> mean_femto_capacity(const RunTrace& trace, IterationWindow w)
{
    check_window(trace, w);
    std::vector<double> mean(trace.n_femto, 0.0);
    for (std::size_t t = w.begin; t < w.end; ++t) {
        const auto& rec = trace.iterations[t];
        for (std::size_t i = 0; i < trace.n_femto; ++i) mean[i] += rec.femto_total[i];
    }
    for (auto& m : mean) m /= static_cast<double>(w.size());
    return mean;
}

double aggregate_femto_capacity(const RunTrace& trace, IterationWindow w)
{
    double total = 0.0;
    for (double m : mean_femto_capacity(trace, w)) total += m;
    return total;
}

double aggregate_femto_capacity(const RunTrace& trace)
{
    return aggregate_femto_capacity(trace, tail_window(trace.size()));
}

std::vector<double> macro_deviation(const RunTrace& trace, double target, IterationWindow w)
{
    check_window(trace, w);
    std::vector<double> dev(trace.n_sub, 0.0);
    for (std::size_t t = w.begin; t < w.end; ++t) {
        for (std::size_t n = 0; n < trace.n_sub; ++n) dev[n] += std::abs(trace.iterations[t].macro_capacity[n] - target);
    }
    for (auto& d : dev) d /= static_cast<double>(w.size());
    return dev;
}

ConvergenceResult convergence_metrics(const RunTrace& trace, double target, double band, std::size_t hold)
{
    if (!(band > 0.0)) throw std::invalid_argument("convergence_metrics: band must be > 0");
    if (hold < 1) throw std::invalid_argument("convergence_metrics: hold must be >= 1");

    ConvergenceResult out;
    std::size_t run = 0;
    for (std::size_t t = 0; t < trace.size(); ++t) {
        const auto& cap = trace.iterations[t].macro_capacity;
        const bool inside =
            std::all_of(cap.begin(), cap.end(), [&](double c) { return std::abs(c - target) <= band; });
        run = inside ? run + 1 : 0;
        if (run == hold) {
            out.converged = true;
            out.iteration = t + 1 - hold;
            break;
        }
    }
    if (trace.size() > 0 && trace.n_sub > 0) {
        const auto dev = macro_deviation(trace, target, tail_window(trace.size()));
        double sum = 0.0;
        for (double d : dev) sum += d;
        out.terminal_deviation = sum / static_cast<double>(dev.size());
    }
    return out;
}

RunSummary summarize(const RunTrace& trace, double target)
{
    RunSummary s;
    if (trace.size() == 0) return s;
    const auto window = tail_window(trace.size());
    if (trace.n_femto > 0) {
        const auto per_femto = mean_femto_capacity(trace, window);
        for (double c : per_femto) s.aggregate_femto_capacity += c;
        s.jain_index = jain_index(per_femto);
    }
    const auto conv = convergence_metrics(trace, target);
    s.converged = conv.converged;
    s.convergence_iteration = conv.iteration;
    s.terminal_deviation = conv.terminal_deviation;
    s.shared_entries = trace.iterations.back().shared_entries;
    return s;
}

std::uint64_t expected_shared_entries(std::size_t iterations, std::size_t n_sub, std::size_t n_agents,
                                      std::size_t action_count)
{
    if (n_agents < 2) return 0;
    return static_cast<std::uint64_t>(iterations) * n_sub * n_agents * (n_agents - 1) * action_count;
}

}  // namespace femtoq
