#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "blendkit/metrics.hpp"
#include "blendkit/optimizer.hpp"

namespace blendkit {

/// What produced a report: enough to re-run the command and get the same
/// bytes back.
struct RunManifest {
  std::string subcommand;
  std::map<std::string, nlohmann::ordered_json> flags;  ///< resolved values, sorted by name
  std::map<std::string, std::string> input_digests;     ///< flag name -> "sha256:<hex>"
  std::string tool_version;
};

inline constexpr const char* kToolVersion = "blendkit 1.0.0";

nlohmann::ordered_json to_json(const LossBreakdown& loss);
nlohmann::ordered_json to_json(const RunManifest& manifest);

/// Report fields in declaration order; infinite PSNR becomes "inf" and
/// absent optional fields become null.
nlohmann::ordered_json to_json(const MetricReport& report);
nlohmann::ordered_json to_json(const MetricReport& report, const RunManifest& manifest);

/// Pretty-printed JSON with a trailing newline. Throws UnwritableError.
void write_json(const nlohmann::ordered_json& doc, const std::filesystem::path& path);

/// CSV with header iter,grad,style,content,sat,total. `iteration_offset` is
/// added to each entry's iteration so several stages can share one file.
void append_history_csv(std::string& out, const std::vector<HistoryEntry>& history,
                        int iteration_offset);
std::string history_csv_header();

/// Shortest round-trip decimal form of a double.
std::string format_number(double v);

void write_text(const std::string& text, const std::filesystem::path& path);

}  // namespace blendkit
