#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "polarsim/summary.hpp"

namespace polarsim {

/// Fixed-point rendering with four decimals, e.g. "6.3636".
std::string decimal(const Rational& value);

/// Plain-text delta aggregate table, one row per (party, target, kind).
std::string format_delta_table(const StudySummary& summary);

/// Writes deltas.csv, agent_deltas.csv, degrees.csv, adoption.csv, words.csv
/// and counts.csv into `dir`. With `charts`, also one SVG box/strip plot per
/// affect kind of the out-group deltas by party, drawn from agent_deltas rows.
/// Returns the files written, in a stable order.
std::vector<std::filesystem::path> write_report(const StudySummary& summary, const std::filesystem::path& dir,
                                                bool charts);

/// SVG box/strip plot of out-group deltas of one kind, one column per party.
/// Returns an empty string when there are no such rows.
std::string render_out_group_chart(const std::vector<AgentDelta>& rows, AffectKind kind);

}  // namespace polarsim
