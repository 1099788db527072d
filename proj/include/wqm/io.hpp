#pragma once

// Text formats: run configuration, time-stamp series, hidden-variable traces,
// and the summary / scan / diff reports written by the command-line tool.
// Every writer is locale-independent and byte-stable.

#include "wqm/bell_stats.hpp"
#include "wqm/sica.hpp"
#include "wqm/sim_engine.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wqm {

inline constexpr std::string_view kTimeStampHeader = "# wqm-tsv v1";
inline constexpr std::string_view kTraceHeader = "# wqm-trace v1";
inline constexpr std::string_view kSummaryHeader = "# wqm-summary v1";
inline constexpr std::string_view kScanHeader = "# wqm-scan v1";
inline constexpr std::string_view kDiffHeader = "# wqm-diff v1";

/// Shortest decimal form that parses back to the same double.
std::string format_double(double x);

/// Radians as a decimal ("0.3927") or a multiple of pi ("pi/8", "3pi/8",
/// "-0.5*pi"). Degree notation is rejected with ConfigError.
double parse_angle(std::string_view text);

/// Comma-separated list of parse_angle values.
std::vector<double> parse_angle_list(std::string_view text);

/// Parses `key = value` lines ('#' starts a comment). Unknown or repeated keys
/// and non-finite angles are rejected with ConfigError naming the line.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Inverse of parse_config. Custom schedules have no text form and throw.
std::string serialize_config(const RunConfig& config);

void write_timestamps(std::ostream& os, std::span<const SlotRecord> slots);
std::string format_timestamps(std::span<const SlotRecord> slots);
std::vector<SlotRecord> read_timestamps(std::istream& is);
std::vector<SlotRecord> parse_timestamps(std::string_view text);

struct TraceFile {
    RunConfig config;
    HvTrace trace;
};

std::string format_trace(const RunConfig& config, const HvTrace& trace);
TraceFile parse_trace(std::string_view text);

/// Counts, correlators, S, J and singles fractions in stable key order.
/// Statistics a series cannot define are written as "undefined".
std::string format_summary(std::span<const SlotRecord> slots);

std::string format_scan(std::span<const CurvePoint> points);

std::string format_diff(const LocalityDiff& diff);

std::string format_condense(const CondenseResult& result);

std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace wqm
