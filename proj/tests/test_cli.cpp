#include "doctest.h"

#include <fstream>
#include <iterator>
#include <sstream>

#include "json.hpp"

#include "blendkit/cli.hpp"
#include "blendkit/png_io.hpp"
#include "support/fixtures.hpp"

using namespace blendkit;
using nlohmann::json;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<std::string> blend_args(const testing::FixtureFiles& f,
                                    const std::filesystem::path& dir) {
  return {"blend",     "--source", f.source.string(), "--target", f.target.string(),
          "--mask",    f.mask.string(), "--offset", f.offset, "--out", (dir / "out.png").string(),
          "--report", (dir / "report.json").string(), "--iters1", "60", "--iters2", "60"};
}

}  // namespace

TEST_CASE("blend writes image, report and history") {
  const auto dir = testing::scratch_dir("cli_blend");
  const auto files = testing::write_fixture(testing::seam_fixture64(), dir);
  auto args = blend_args(files, dir);
  args.insert(args.end(), {"--history", (dir / "hist.csv").string()});
  const Outcome o = run_cli(args);
  REQUIRE_MESSAGE(o.code == 0, o.err);
  CHECK(load_png(dir / "out.png").width() == 64);

  const json report = json::parse(slurp(dir / "report.json"));
  CHECK(report.contains("psnr_db"));
  CHECK(report["reference"] == "copy-paste");
  const json& flags = report["manifest"]["flags"];
  CHECK(flags["w-grad1"] == 1e4);
  CHECK(flags["w-style1"] == 1e3);
  CHECK(flags["w-content1"] == 1.0);
  CHECK(flags["w-sat1"] == 0.0);
  CHECK(flags["w-grad2"] == 0.0);
  CHECK(flags["w-style2"] == 1e5);
  CHECK(flags["w-content2"] == 1.0);
  CHECK(flags["w-sat2"] == 1e5);
  CHECK(flags["iters1"] == 60);
  CHECK(report["manifest"]["input_digests"]["source"].get<std::string>().rfind("sha256:", 0) == 0);
  CHECK(report["manifest"]["subcommand"] == "blend");

  const std::string csv = slurp(dir / "hist.csv");
  CHECK(csv.rfind("iter,grad,style,content,sat,total\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') > 60);
}

TEST_CASE("blend exit codes") {
  const auto dir = testing::scratch_dir("cli_codes");
  const auto files = testing::write_fixture(testing::seam_fixture64(), dir);

  auto outside = blend_args(files, dir);
  outside[8] = "40,0";  // --offset value
  const Outcome o1 = run_cli(outside);
  CHECK(o1.code == 2);
  CHECK(json::parse(o1.err)["error"] == "validation");

  auto bad_offset = blend_args(files, dir);
  bad_offset[8] = "abc";
  CHECK(run_cli(bad_offset).code == 2);

  auto missing = blend_args(files, dir);
  missing[2] = (dir / "nope.png").string();
  const Outcome o3 = run_cli(missing);
  CHECK(o3.code == 3);
  CHECK(json::parse(o3.err)["error"] == "unreadable");

  auto unwritable = blend_args(files, dir);
  unwritable[10] = (dir / "no_dir" / "out.png").string();
  CHECK(run_cli(unwritable).code == 3);

  auto bad_weight = blend_args(files, dir);
  bad_weight.insert(bad_weight.end(), {"--w-sat2", "-1"});
  CHECK(run_cli(bad_weight).code == 2);

  CHECK(run_cli({"blend", "--source", files.source.string()}).code == 2);
  CHECK(run_cli({}).code == 2);
  CHECK(run_cli({"--help"}).code == 0);
}

TEST_CASE("refine-mask subcommand") {
  const auto dir = testing::scratch_dir("cli_refine");
  BinaryMask speck(9, 9);
  speck.set(4, 4, true);
  speck.set(0, 0, true);
  save_mask(speck, dir / "speck.png");

  CHECK(run_cli({"refine-mask", "--mask", (dir / "speck.png").string(), "--out",
                 (dir / "same.png").string(), "--erode", "0", "--dilate", "0"})
            .code == 0);
  CHECK(load_mask(dir / "same.png") == speck);

  CHECK(run_cli({"refine-mask", "--mask", (dir / "speck.png").string(), "--out",
                 (dir / "clean.png").string()})
            .code == 0);
  CHECK(load_mask(dir / "clean.png").empty());

  CHECK(run_cli({"refine-mask", "--mask", (dir / "speck.png").string(), "--out",
                 (dir / "r0.png").string(), "--radius", "0"})
            .code == 2);
  CHECK(run_cli({"refine-mask", "--mask", (dir / "missing.png").string(), "--out",
                 (dir / "x.png").string()})
            .code == 3);
}

TEST_CASE("metrics subcommand") {
  const auto dir = testing::scratch_dir("cli_metrics");
  std::mt19937_64 rng(51);
  save_png(testing::random_image(rng, 16, 16), dir / "a.png");
  save_png(testing::random_image(rng, 16, 17), dir / "wide.png");
  BinaryMask ma(4, 4), mb(4, 4);
  for (int y = 0; y < 2; ++y)
    for (int x = 0; x < 2; ++x) {
      ma.set(y, x, true);
      mb.set(y + 1, x + 1, true);
    }
  save_mask(ma, dir / "ma.png");
  save_mask(mb, dir / "mb.png");

  const Outcome self = run_cli({"metrics", "--image", (dir / "a.png").string(), "--reference",
                                (dir / "a.png").string(), "--mask-a", (dir / "ma.png").string(),
                                "--mask-b", (dir / "mb.png").string()});
  REQUIRE_MESSAGE(self.code == 0, self.err);
  const json j = json::parse(self.out);
  CHECK(j["psnr_db"] == "inf");
  CHECK(j["ssim"] == 1.0);
  CHECK(j["mse"] == 0.0);
  CHECK(std::abs(j["iou"].get<double>() - 1.0 / 7.0) <= 1e-12);

  const Outcome no_ref = run_cli({"metrics", "--image", (dir / "a.png").string()});
  CHECK(no_ref.code == 2);
  CHECK(no_ref.err.find("usage") != std::string::npos);

  CHECK(run_cli({"metrics", "--image", (dir / "a.png").string(), "--reference",
                 (dir / "wide.png").string()})
            .code == 2);

  const auto report_path = dir / "m.json";
  CHECK(run_cli({"metrics", "--image", (dir / "a.png").string(), "--reference",
                 (dir / "a.png").string(), "--report", report_path.string()})
            .code == 0);
  CHECK(json::parse(slurp(report_path))["manifest"]["subcommand"] == "metrics");
}

TEST_CASE("poisson subcommand") {
  const auto dir = testing::scratch_dir("cli_poisson");
  const auto f = testing::write_fixture(testing::seam_fixture64(), dir);
  const Outcome o = run_cli({"poisson", "--source", f.source.string(), "--target",
                             f.target.string(), "--mask", f.mask.string(), "--offset", f.offset,
                             "--out", (dir / "p.png").string()});
  REQUIRE_MESSAGE(o.code == 0, o.err);
  CHECK(json::parse(o.out)["manifest"]["subcommand"] == "poisson");

  const Outcome stuck = run_cli({"poisson", "--source", f.source.string(), "--target",
                                 f.target.string(), "--mask", f.mask.string(), "--offset",
                                 f.offset, "--out", (dir / "p.png").string(), "--max-iters", "2",
                                 "--tol", "1e-12"});
  CHECK(stuck.code == 4);
  CHECK(json::parse(stuck.err)["error"] == "not_converged");
}

TEST_CASE("compare emits three reports, a table and a contact sheet") {
  const auto dir = testing::scratch_dir("cli_compare");
  const auto f = testing::write_fixture(testing::seam_fixture64(), dir / "in");
  const auto out = dir / "out";
  const Outcome o = run_cli({"compare", "--source", f.source.string(), "--target",
                             f.target.string(), "--mask", f.mask.string(), "--offset", f.offset,
                             "--out-dir", out.string(), "--iters1", "50", "--iters2", "50"});
  REQUIRE_MESSAGE(o.code == 0, o.err);
  std::vector<std::string> names;
  for (const auto& e : std::filesystem::directory_iterator(out))
    names.push_back(e.path().filename().string());
  std::sort(names.begin(), names.end());
  CHECK(names == std::vector<std::string>{"compare.csv", "contact_sheet.png", "copy-paste.json",
                                          "poisson.json", "two-stage.json"});
  const std::string csv = slurp(out / "compare.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);  // header + 3 methods
  CHECK(load_png(out / "contact_sheet.png").width() == 3 * 64);
  CHECK(json::parse(slurp(out / "copy-paste.json"))["psnr_db"] == "inf");
}
