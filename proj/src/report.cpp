#include "blendkit/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "blendkit/error.hpp"

namespace blendkit {

using nlohmann::ordered_json;

namespace {

ordered_json number_or_null(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

ordered_json to_json(const LossBreakdown& loss) {
  ordered_json j;
  j["total"] = number_or_null(loss.total);
  j["grad"] = number_or_null(loss.grad);
  j["style"] = number_or_null(loss.style);
  j["content"] = number_or_null(loss.content);
  j["sat"] = number_or_null(loss.sat);
  j["sat_raw"] = number_or_null(loss.sat_raw);
  return j;
}

ordered_json to_json(const RunManifest& m) {
  ordered_json j;
  j["subcommand"] = m.subcommand;
  ordered_json flags = ordered_json::object();
  for (const auto& [k, v] : m.flags) flags[k] = v;
  j["flags"] = flags;
  ordered_json digests = ordered_json::object();
  for (const auto& [k, v] : m.input_digests) digests[k] = v;
  j["input_digests"] = digests;
  j["tool_version"] = m.tool_version;
  return j;
}

ordered_json to_json(const MetricReport& r) {
  ordered_json j;
  j["psnr_db"] = number_or_null(r.psnr_db);
  j["ssim"] = number_or_null(r.ssim);
  j["mse"] = number_or_null(r.mse);
  j["l_sat_raw"] = number_or_null(r.l_sat_raw);
  j["l_sat_hinged"] = number_or_null(r.l_sat_hinged);
  j["iou"] = r.iou ? number_or_null(*r.iou) : ordered_json(nullptr);
  j["stage1_final_loss"] = r.stage1_final_loss ? to_json(*r.stage1_final_loss) : ordered_json(nullptr);
  j["stage2_final_loss"] = r.stage2_final_loss ? to_json(*r.stage2_final_loss) : ordered_json(nullptr);
  if (r.wall_times) {
    j["wall_times"] = {{"stage1", r.wall_times->stage1}, {"stage2", r.wall_times->stage2}};
  } else {
    j["wall_times"] = nullptr;
  }
  j["reference"] = r.reference;
  j["flags"] = r.flags;
  return j;
}

ordered_json to_json(const MetricReport& report, const RunManifest& manifest) {
  ordered_json j = to_json(report);
  j["manifest"] = to_json(manifest);
  return j;
}

void write_text(const std::string& text, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw UnwritableError("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw UnwritableError("failed to write " + path.string());
}

void write_json(const ordered_json& doc, const std::filesystem::path& path) {
  write_text(doc.dump(2) + "\n", path);
}

std::string history_csv_header() { return "iter,grad,style,content,sat,total\n"; }

void append_history_csv(std::string& out, const std::vector<HistoryEntry>& history,
                        int iteration_offset) {
  for (const HistoryEntry& e : history) {
    out += std::to_string(e.iteration + iteration_offset);
    for (double v : {e.loss.grad, e.loss.style, e.loss.content, e.loss.sat, e.loss.total}) {
      out += ',';
      out += format_number(v);
    }
    out += '\n';
  }
}

}  // namespace blendkit
