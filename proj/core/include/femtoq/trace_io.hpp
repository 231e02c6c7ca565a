#pragma once

// Per-episode trace CSV. One row per (iteration, subcarrier, agent):
//
//   schema_version,iteration,subcarrier,agent,state,action,reward,C_o,C_i,shared_entries
//
// `state` is the state id the action was chosen in, `action` the action
// index, C_o / C_i the capacities after that iteration's commit and
// shared_entries the cumulative Q-values moved by the cooperation bus.

#include "femtoq/trace.hpp"

#include <iosfwd>
#include <string>

namespace femtoq {

inline constexpr int kTraceSchemaVersion = 1;

/// `first_iteration` numbers the rows of a trace that starts mid-episode.
void write_trace_csv(std::ostream& os, const RunTrace& trace, std::size_t first_iteration = 0);
std::string trace_to_csv(const RunTrace& trace, std::size_t first_iteration = 0);

/// Rebuilds iterations, capacities and steps from a trace CSV, renumbered
/// from 0. The run summary is left default; recompute it with summarize().
RunTrace read_trace_csv(std::istream& is);

/// Shortest round-trip decimal form.
std::string format_number(double v);

}  // namespace femtoq
