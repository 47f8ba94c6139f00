#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "elq/cohort.hpp"
#include "elq/errors.hpp"
#include "elq/image_io.hpp"
#include "elq/pipeline.hpp"
#include "test_support.hpp"

using namespace elq;
using elqtest::TempDir;
using elqtest::thrown_code;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(bool(in));
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

bool exists(const std::string& path) { return std::filesystem::exists(path); }

// A small synthetic cohort written to disk: 3+3 subjects, one frame per site,
// plus the manifest that describes it.
struct DiskCohort {
  TempDir tmp;
  CohortManifest manifest;
  RunConfig config;

  explicit DiskCohort(uint64_t seed = 7) {
    CohortRecipe recipe;
    recipe.seed = seed;
    recipe.subjects_non_ulcerated = 3;
    recipe.subjects_ulcerated = 3;
    recipe.frames_per_site = 1;
    const std::vector<CohortFrame> frames = synth_cohort(recipe);
    int i = 0;
    for (const CohortFrame& f : frames) {
      const std::string path = tmp.file("f" + std::to_string(i++) + ".png");
      write_png(path, f.frame.pixels());
      manifest.rows.push_back(ManifestRow{f.meta.subject_id, f.meta.group, f.meta.site, path,
                                          f.meta.frame_index});
    }
    config.colorbar = phantom_layout(cohort_frame_scene(recipe, 0.0, 0, FrameMeta{})).bar;
    config.write_heatmaps = false;
  }
};

}  // namespace

TEST_CASE("a flat scene analyzes to near-zero gradient totals") {
  const FrameResult r = elqtest::analyze_scene(elqtest::homogeneous_scene());
  REQUIRE(r.n_valid_pixels > 100000);
  CHECK(std::abs(r.gradients.total_gx) < 0.005);
  CHECK(std::abs(r.gradients.total_gy) < 0.005);
  CHECK(r.gradients.total_gr < 0.01);
  CHECK(r.column_exclusion_count == 0);
  // defaults leave reported values on image axes
  CHECK(r.reported_gx == r.gradients.total_gx);
  CHECK(r.reported_gy == r.gradients.total_gy);
}

TEST_CASE("a soft-under-stiff scene yields a positive depth gradient") {
  const FrameResult r = elqtest::analyze_scene(elqtest::layered_scene());
  CHECK(r.gradients.total_gy > 0.0005);           // RS steps up 0.5 -> 1.0 with depth
  CHECK(std::abs(r.gradients.total_gx) < 0.001);  // no lateral structure
  CHECK(r.gradients.total_gr >= r.gradients.total_gy);
}

TEST_CASE("reporting conventions flip signs without touching raw totals") {
  const PhantomFrame rendered = render(elqtest::layered_scene());
  RunConfig config = elqtest::config_for(rendered);

  const FrameResult plain = analyze_frame(rendered.frame, config);

  config.report_as_stiffness = true;
  const FrameResult stiff = analyze_frame(rendered.frame, config);
  CHECK(stiff.gradients.total_gy == plain.gradients.total_gy);  // raw: untouched
  CHECK(stiff.reported_gy == -plain.gradients.total_gy);
  CHECK(stiff.reported_gx == -plain.gradients.total_gx);  // stiffness flips both axes
  CHECK(stiff.reported_gr == plain.reported_gr);          // but never the magnitude

  config.report_as_stiffness = false;
  config.anterior_at = AnteriorAt::ImageRight;
  const FrameResult mirrored = analyze_frame(rendered.frame, config);
  CHECK(mirrored.reported_gx == -plain.gradients.total_gx);
  CHECK(mirrored.reported_gy == plain.gradients.total_gy);
}

TEST_CASE("columns with an unreadable reference are excluded and counted") {
  const PhantomFrame rendered = render(elqtest::layered_scene());
  const RunConfig config = elqtest::config_for(rendered);
  const PhantomLayout lay = phantom_layout(elqtest::layered_scene());

  // Paint a saturated but uncalibratable color over ten columns of standoff:
  // those columns keep their tissue but lose their reference.
  Raster<Rgb> pixels = rendered.frame.pixels();
  for (int x = 100; x < 110; ++x)
    for (int y = lay.standoff_y0; y < lay.standoff_y1; ++y)
      pixels.at(x, y) = Rgb{255, 0, 255};
  const ElastogramFrame frame(std::move(pixels), std::nullopt, FrameMeta{});

  const FrameResult r = analyze_frame(frame, config);
  CHECK(r.column_exclusion_count == 10);
  CHECK(std::isfinite(r.gradients.total_gy));
  const FrameResult clean = analyze_frame(rendered.frame, config);
  CHECK(clean.column_exclusion_count == 0);
  CHECK(r.n_valid_pixels < clean.n_valid_pixels);
}

TEST_CASE("an unusable reference everywhere is a hard error") {
  const PhantomFrame rendered = render(elqtest::homogeneous_scene());
  RunConfig config = elqtest::config_for(rendered);
  config.quantify.ref_floor = 200.0;  // nothing can reach this
  CHECK(thrown_code([&] { analyze_frame(rendered.frame, config); }) == Err::NoStandoffFound);
}

TEST_CASE("mean standoff thickness measures the gel pad") {
  const PhantomFrame r = render(elqtest::layered_scene());
  CHECK(mean_standoff_thickness(r.truth.labels) == 80.0);

  Raster<RegionLabel> no_standoff(8, 8, RegionLabel::Tissue);
  CHECK(thrown_code([&] { mean_standoff_thickness(no_standoff); }) == Err::SegmentationFailed);
}

namespace {

ElastogramFrame frame_with_standoff(int thickness, int gap = 4) {
  PhantomScene scene = elqtest::homogeneous_scene();
  scene.standoff_thickness = thickness;
  scene.skin_gap_thickness = gap;
  return render(scene).frame;
}

}  // namespace

TEST_CASE("frame suggestion picks the most compressed frames") {
  const RunConfig config;
  std::vector<ElastogramFrame> seq;
  for (int t : {40, 30, 40, 28, 40}) seq.push_back(frame_with_standoff(t));
  CHECK(suggest_frames(seq, 2, config) == std::vector<int>{1, 3});
  CHECK(suggest_frames(seq, 1, config) == std::vector<int>{3});
  CHECK(suggest_frames(seq, 4, config) == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("frame suggestion spreads ties across the sequence") {
  const RunConfig config;
  std::vector<ElastogramFrame> same;
  for (int i = 0; i < 5; ++i) same.push_back(frame_with_standoff(36));
  CHECK(suggest_frames(same, 3, config) == std::vector<int>{0, 2, 4});
  CHECK(suggest_frames(same, 1, config) == std::vector<int>{0});
  CHECK(suggest_frames(same, 5, config) == std::vector<int>{0, 1, 2, 3, 4});

  std::vector<ElastogramFrame> mixed;
  for (int t : {30, 40, 40, 40, 40}) mixed.push_back(frame_with_standoff(t));
  // 0 is forced; the two remaining slots spread over the tied tail
  CHECK(suggest_frames(mixed, 3, config) == std::vector<int>{0, 2, 4});
}

TEST_CASE("frame suggestion skips unsegmentable frames and validates k") {
  const RunConfig config;
  std::vector<ElastogramFrame> seq;
  seq.push_back(frame_with_standoff(40, 1));  // skin gap too thin to find
  seq.push_back(frame_with_standoff(40));
  seq.push_back(frame_with_standoff(30));
  CHECK(suggest_frames(seq, 2, config) == std::vector<int>{1, 2});
  CHECK(thrown_code([&] { suggest_frames(seq, 3, config); }) == Err::SegmentationFailed);
  CHECK(thrown_code([&] { suggest_frames(seq, 0, config); }) == Err::InvalidArgument);
  CHECK(thrown_code([&] { suggest_frames(seq, 9, config); }) == Err::InvalidArgument);
}

TEST_CASE("cohort run: every frame analyzed, one comparison per site and metric") {
  const DiskCohort cohort;
  const CohortReport report = run_cohort(cohort.manifest, cohort.config);

  CHECK(report.n_ok == 24);
  CHECK(report.n_failed == 0);
  CHECK(cohort_status(report) == RunStatus::Clean);
  REQUIRE(report.comparisons.size() == 12);
  for (const GroupComparison& c : report.comparisons) {
    CHECK(c.error.empty());
    CHECK(c.n_a == 3);
    CHECK(c.n_b == 3);
    CHECK(std::isfinite(c.mean_a));
    CHECK(std::isfinite(c.p_two_tailed));
    CHECK(c.p_two_tailed >= 0.0);
    CHECK(c.p_two_tailed <= 1.0);
  }
  // site-major, metric-minor ordering
  CHECK(report.comparisons[0].site == Site::LeftForefoot);
  CHECK(report.comparisons[0].metric == Metric::TotalGx);
  CHECK(report.comparisons[1].metric == Metric::TotalGy);
  CHECK(report.comparisons[3].site == Site::LeftHeel);
  CHECK(report.comparisons[11].site == Site::RightHeel);
  CHECK(report.comparisons[11].metric == Metric::TotalGr);

  // reruns are byte-identical
  const CohortReport again = run_cohort(cohort.manifest, cohort.config);
  CHECK(frames_csv(report.frames) == frames_csv(again.frames));
  CHECK(comparisons_csv(report.comparisons) == comparisons_csv(again.comparisons));
  CHECK(comparisons_json(report, cohort.config) == comparisons_json(again, cohort.config));
}

TEST_CASE("cohort run marks broken frames and keeps going") {
  DiskCohort cohort;
  cohort.manifest.rows.push_back(
      ManifestRow{"ghost", Group::Ulcerated, Site::LeftHeel, cohort.tmp.file("nope.png"), 9});
  const CohortReport report = run_cohort(cohort.manifest, cohort.config);

  CHECK(report.n_ok == 24);
  CHECK(report.n_failed == 1);
  CHECK(cohort_status(report) == RunStatus::Partial);
  CHECK(int(cohort_status(report)) == 2);
  const FrameOutcome& bad = report.frames.back();
  CHECK_FALSE(bad.ok);
  CHECK(bad.error == "IoError");

  const std::string csv = frames_csv(report.frames);
  CHECK(csv.find("ghost,left_heel,ulcerated,9,") != std::string::npos);
  CHECK(csv.find(",failed,IoError,,,,,\n") != std::string::npos);

  // the failed frame drops out of the stats but not out of the listing
  const nlohmann::json j = nlohmann::json::parse(comparisons_json(report, cohort.config));
  CHECK(j.at("frames").at("analyzed") == 24);
  CHECK(j.at("frames").at("failed") == 1);
  CHECK(j.at("comparisons").size() == 12);
  CHECK(j.at("group_a") == "ulcerated");
  CHECK(j.at("schema_version") == 1);
}

TEST_CASE("cohort run: one-group sites are skipped with a warning") {
  DiskCohort cohort;
  CohortManifest ulcerated_only;
  for (const ManifestRow& row : cohort.manifest.rows)
    if (row.group == Group::Ulcerated) ulcerated_only.rows.push_back(row);

  const CohortReport report = run_cohort(ulcerated_only, cohort.config);
  CHECK(report.n_ok == 12);
  CHECK(report.comparisons.empty());
  CHECK(report.warnings.size() == 4);  // every site lacks the other group
  CHECK(report.warnings[0].find("skipped") != std::string::npos);
  CHECK(cohort_status(report) == RunStatus::Clean);
}

TEST_CASE("cohort run refuses empty or hopeless inputs") {
  const DiskCohort cohort;
  CHECK(thrown_code([&] { run_cohort(CohortManifest{}, cohort.config); }) == Err::EmptyManifest);

  CohortManifest hopeless;
  hopeless.rows.push_back(
      ManifestRow{"s1", Group::Ulcerated, Site::LeftHeel, cohort.tmp.file("no1.png"), 0});
  hopeless.rows.push_back(
      ManifestRow{"s2", Group::NonUlcerated, Site::LeftHeel, cohort.tmp.file("no2.png"), 0});
  CHECK(thrown_code([&] { run_cohort(hopeless, cohort.config); }) == Err::AllFramesFailed);
}

TEST_CASE("cohort outputs land on disk with the config echo") {
  const DiskCohort cohort;
  const CohortReport report = run_cohort(cohort.manifest, cohort.config);
  TempDir out;
  write_cohort_outputs(report, cohort.config, out.str());

  CHECK(slurp(out.file("frames.csv")) == frames_csv(report.frames));
  CHECK(slurp(out.file("comparisons.csv")) == comparisons_csv(report.comparisons));
  CHECK(slurp(out.file("comparisons.json")) == comparisons_json(report, cohort.config));
  CHECK(slurp(out.file("run_config.cfg")) == cohort.config.to_config_text());
  CHECK(exists(out.file("compare_total_gx.png")));
  CHECK(exists(out.file("compare_total_gy.png")));
  CHECK(exists(out.file("compare_total_gr.png")));

  const std::string log = slurp(out.file("run.log"));
  CHECK(log.find("24 frames, 24 analyzed, 0 failed") != std::string::npos);
  CHECK(log.find("status 0") != std::string::npos);
  // round-trip: the echoed config drives an identical rerun
  const RunConfig echoed = RunConfig::load(out.file("run_config.cfg"));
  CHECK(echoed.to_config_text() == cohort.config.to_config_text());
}

TEST_CASE("frame outputs: metrics, profiles and optional heatmaps") {
  const PhantomFrame rendered = render(elqtest::layered_scene());
  RunConfig config = elqtest::config_for(rendered);
  const FrameResult result = analyze_frame(rendered.frame, config);

  TempDir out;
  config.write_heatmaps = true;
  write_frame_outputs(result, config, out.str(), "frame1", "input/frame1.png");
  CHECK(slurp(out.file("frame1_metrics.csv")) == frame_result_csv(result, "input/frame1.png"));
  CHECK(slurp(out.file("frame1_profiles.csv")) == profiles_csv(result.gradients));
  CHECK(exists(out.file("frame1_profiles.png")));
  CHECK(exists(out.file("frame1_rs.png")));
  CHECK(exists(out.file("frame1_gr.png")));
  CHECK(slurp(out.file("run_config.cfg")) == config.to_config_text());

  TempDir lean;
  config.write_heatmaps = false;
  write_frame_outputs(result, config, lean.str(), "frame1", "input/frame1.png");
  CHECK(exists(lean.file("frame1_metrics.csv")));
  CHECK_FALSE(exists(lean.file("frame1_rs.png")));
  CHECK_FALSE(exists(lean.file("frame1_gr.png")));

  // the metrics row carries the header and one data line
  const std::string csv = frame_result_csv(result, "input/frame1.png");
  CHECK(csv.find("subject_id,site,group,frame_index,frame_path,status,error,") == 0);
  CHECK(csv.find(",ok,,") != std::string::npos);
}

TEST_CASE("profile csv lines up row and column means") {
  const FrameResult r = elqtest::analyze_scene(elqtest::layered_scene());
  const std::string csv = profiles_csv(r.gradients);
  CHECK(csv.find("index,row_mean_gx,col_mean_gy\n") == 0);
  // one line per index up to the longer profile, plus the header
  const size_t lines = size_t(std::count(csv.begin(), csv.end(), '\n'));
  CHECK(lines == 1 + std::max(r.gradients.row_mean_gx.size(), r.gradients.col_mean_gy.size()));
}

#ifdef ELQ_CLI_BIN

#include <sys/wait.h>

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(ELQ_CLI_BIN) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return rc < 0 ? rc : WEXITSTATUS(rc);
}

}  // namespace

TEST_CASE("cli maps outcomes to exit codes") {
  CHECK(run_cli("version") == 0);
  CHECK(run_cli("--no-such-flag") == 3);
  CHECK(run_cli("analyze") == 3);  // missing required input
  TempDir tmp;
  CHECK(run_cli("cohort --manifest " + tmp.file("absent.csv") + " --out " + tmp.str()) == 3);
}

#endif  // ELQ_CLI_BIN
