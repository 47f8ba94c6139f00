// elq — quantitative strain-elastography analysis from the command line.
//
// Exit codes: 0 clean, 2 some frames failed (cohort mode), 3 fatal.

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "elq/cohort.hpp"
#include "elq/config.hpp"
#include "elq/errors.hpp"
#include "elq/ground_truth_io.hpp"
#include "elq/image_io.hpp"
#include "elq/manifest.hpp"
#include "elq/phantom.hpp"
#include "elq/pipeline.hpp"

namespace fs = std::filesystem;
using namespace elq;

namespace {

constexpr const char* kVersion = "1.0.0";

RunConfig config_from(const std::string& path) {
  return path.empty() ? RunConfig{} : RunConfig::load(path);
}

std::string metric_text(double v) {
  if (std::isnan(v)) return "undefined";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::FILE* f = std::fopen(path.string().c_str(), "wb");
  if (!f) fail(Err::IoError, "cannot write '" + path.string() + "'");
  std::fwrite(content.data(), 1, content.size(), f);
  std::fclose(f);
}

Raster<Rgb> gray_to_rgb(const Raster<uint8_t>& gray) {
  Raster<Rgb> out(gray.width(), gray.height());
  for (int y = 0; y < gray.height(); ++y)
    for (int x = 0; x < gray.width(); ++x) {
      const uint8_t g = gray.at(x, y);
      out.at(x, y) = Rgb{g, g, g};
    }
  return out;
}

int cmd_analyze(const std::string& config_path, const std::string& image_path,
                const std::string& bmode_path, const std::string& out_dir,
                const std::string& stem_opt, const std::string& subject, const std::string& site,
                const std::string& group, int frame_index, bool no_heatmaps) {
  RunConfig config = config_from(config_path);
  if (no_heatmaps) config.write_heatmaps = false;

  Raster<Rgb> image = read_image(image_path);
  std::optional<Raster<uint8_t>> bmode;
  if (!bmode_path.empty()) bmode = read_image_gray(bmode_path);
  const FrameMeta meta{subject, parse_site(site), parse_group(group), frame_index};
  const ElastogramFrame frame(std::move(image), std::move(bmode), meta);

  const FrameResult result = analyze_frame(frame, config);

  const std::string dir = out_dir.empty() ? config.output_dir : out_dir;
  const std::string stem =
      stem_opt.empty() ? fs::path(image_path).stem().string() : stem_opt;
  write_frame_outputs(result, config, dir, stem, image_path);

  std::printf("analyzed %s\n", image_path.c_str());
  std::printf("  total_gx = %s\n", metric_text(result.reported_gx).c_str());
  std::printf("  total_gy = %s\n", metric_text(result.reported_gy).c_str());
  std::printf("  total_gr = %s\n", metric_text(result.reported_gr).c_str());
  std::printf("  valid tissue pixels = %d, excluded columns = %d\n", result.n_valid_pixels,
              result.column_exclusion_count);
  std::printf("outputs in %s\n", dir.c_str());
  return 0;
}

int cmd_cohort(const std::string& config_path, const std::string& manifest_path,
               const std::string& out_dir) {
  const RunConfig config = config_from(config_path);
  const CohortManifest manifest = CohortManifest::load(manifest_path);
  const CohortReport report = run_cohort(manifest, config);
  const std::string dir = out_dir.empty() ? config.output_dir : out_dir;
  write_cohort_outputs(report, config, dir);

  std::printf("%d frames analyzed, %d failed\n", report.n_ok, report.n_failed);
  for (const GroupComparison& c : report.comparisons)
    if (c.error.empty() && c.p_two_tailed < 0.05)
      std::printf("  significant: %s %s (p = %.4g)\n", to_string(c.site), to_string(c.metric),
                  c.p_two_tailed);
  for (const std::string& w : report.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  std::printf("outputs in %s\n", dir.c_str());
  return int(cohort_status(report));
}

int cmd_suggest(const std::string& config_path, int k, const std::vector<std::string>& paths) {
  const RunConfig config = config_from(config_path);
  std::vector<ElastogramFrame> frames;
  frames.reserve(paths.size());
  for (size_t i = 0; i < paths.size(); ++i)
    frames.emplace_back(read_image(paths[i]), std::nullopt,
                        FrameMeta{.frame_index = int(i)});
  const std::vector<int> picks = suggest_frames(frames, k, config);
  for (int idx : picks) std::printf("%d\t%s\n", idx, paths[size_t(idx)].c_str());
  return 0;
}

int cmd_phantom_render(const std::string& scene_path, const std::string& out_dir,
                       const std::string& stem) {
  const PhantomScene scene = scene_path.empty() ? PhantomScene{} : load_scene_file(scene_path);
  const PhantomFrame rendered = render(scene);

  fs::create_directories(out_dir);
  const fs::path base = fs::path(out_dir) / stem;
  write_png(base.string() + ".png", rendered.frame.pixels());
  if (rendered.frame.bmode())
    write_png(base.string() + "_bmode.png", gray_to_rgb(*rendered.frame.bmode()));
  write_ground_truth(out_dir, stem, rendered.truth, &scene);
  write_text_file(base.string() + "_scene.cfg", scene_to_config(scene));

  RunConfig config;
  config.colorbar = rendered.truth.bar_roi;
  config.output_dir = out_dir;
  config.save((fs::path(out_dir) / "run_config.cfg").string());

  std::printf("rendered %dx%d phantom to %s.png (ground truth + matching run_config.cfg "
              "alongside)\n",
              scene.width, scene.height, base.string().c_str());
  return 0;
}

int cmd_phantom_cohort(const std::string& recipe_path, const std::string& out_dir) {
  const CohortRecipe recipe =
      recipe_path.empty() ? CohortRecipe{} : CohortRecipe::load(recipe_path);
  const std::vector<CohortFrame> frames = synth_cohort(recipe);

  const fs::path frames_dir = fs::path(out_dir) / "frames";
  fs::create_directories(frames_dir);

  CohortManifest manifest;
  manifest.rows.reserve(frames.size());
  for (const CohortFrame& f : frames) {
    char name[128];
    std::snprintf(name, sizeof name, "%s_%s_f%d.png", f.meta.subject_id.c_str(),
                  to_string(f.meta.site), f.meta.frame_index);
    const fs::path path = frames_dir / name;
    write_png(path.string(), f.frame.pixels());
    manifest.rows.push_back(ManifestRow{f.meta.subject_id, f.meta.group, f.meta.site,
                                        path.string(), f.meta.frame_index});
  }
  manifest.save((fs::path(out_dir) / "manifest.csv").string());
  write_text_file(fs::path(out_dir) / "recipe.cfg", recipe.to_config_text());

  RunConfig config;
  config.colorbar =
      phantom_layout(cohort_frame_scene(recipe, 0.0, 0, FrameMeta{})).bar;
  config.output_dir = (fs::path(out_dir) / "analysis").string();
  config.save((fs::path(out_dir) / "run_config.cfg").string());

  std::printf("wrote %zu frames, manifest.csv and run_config.cfg under %s\n", frames.size(),
              out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantitative strain-elastography analysis"};
  app.require_subcommand(1);

  // defaults
  CLI::App* defaults = app.add_subcommand("defaults", "print the default run config");

  // analyze
  std::string a_config, a_image, a_bmode, a_out, a_stem;
  std::string a_subject = "anon", a_site = "left_forefoot", a_group = "non_ulcerated";
  int a_frame_index = 0;
  bool a_no_heatmaps = false;
  CLI::App* analyze = app.add_subcommand("analyze", "analyze a single elastogram frame");
  analyze->add_option("--config", a_config, "run config file (defaults when omitted)");
  analyze->add_option("--image", a_image, "frame image (PNG or BMP)")->required();
  analyze->add_option("--bmode", a_bmode, "matching grayscale B-mode image");
  analyze->add_option("--out", a_out, "output directory (default: config output.dir)");
  analyze->add_option("--stem", a_stem, "output file stem (default: image basename)");
  analyze->add_option("--subject", a_subject, "subject id for the CSV row");
  analyze->add_option("--site", a_site, "site name (e.g. left_forefoot)");
  analyze->add_option("--group", a_group, "group name (ulcerated | non_ulcerated)");
  analyze->add_option("--frame-index", a_frame_index, "frame index within the video");
  analyze->add_flag("--no-heatmaps", a_no_heatmaps, "skip PNG heatmap emission");

  // cohort
  std::string c_config, c_manifest, c_out;
  CLI::App* cohort = app.add_subcommand("cohort", "analyze a manifest of frames and compare groups");
  cohort->add_option("--config", c_config, "run config file (defaults when omitted)");
  cohort->add_option("--manifest", c_manifest, "cohort manifest (CSV/TSV with header)")->required();
  cohort->add_option("--out", c_out, "output directory (default: config output.dir)");

  // suggest
  std::string s_config;
  int s_k = 3;
  std::vector<std::string> s_images;
  CLI::App* suggest = app.add_subcommand("suggest", "suggest max-compression frames from a sequence");
  suggest->add_option("--config", s_config, "run config file (defaults when omitted)");
  suggest->add_option("-k,--count", s_k, "number of frames to pick");
  suggest->add_option("images", s_images, "frame images in sequence order")->required();

  // phantom render / phantom cohort
  CLI::App* phantom = app.add_subcommand("phantom", "synthetic test-image generation");
  phantom->require_subcommand(1);
  std::string pr_scene, pr_out = "elq_out", pr_stem = "phantom";
  CLI::App* p_render = phantom->add_subcommand("render", "render one scene with ground truth");
  p_render->add_option("--scene", pr_scene, "scene file (built-in default scene when omitted)");
  p_render->add_option("--out", pr_out, "output directory");
  p_render->add_option("--stem", pr_stem, "output file stem");
  std::string pc_recipe, pc_out = "elq_out";
  CLI::App* p_cohort = phantom->add_subcommand("cohort", "generate a labeled synthetic cohort");
  p_cohort->add_option("--recipe", pc_recipe, "recipe file (built-in default recipe when omitted)");
  p_cohort->add_option("--out", pc_out, "output directory");

  CLI::App* version = app.add_subcommand("version", "print the version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 3;
  }

  try {
    if (defaults->parsed()) {
      std::fputs(RunConfig{}.to_config_text().c_str(), stdout);
      return 0;
    }
    if (analyze->parsed())
      return cmd_analyze(a_config, a_image, a_bmode, a_out, a_stem, a_subject, a_site, a_group,
                         a_frame_index, a_no_heatmaps);
    if (cohort->parsed()) return cmd_cohort(c_config, c_manifest, c_out);
    if (suggest->parsed()) return cmd_suggest(s_config, s_k, s_images);
    if (phantom->parsed()) {
      if (p_render->parsed()) return cmd_phantom_render(pr_scene, pr_out, pr_stem);
      if (p_cohort->parsed()) return cmd_phantom_cohort(pc_recipe, pc_out);
    }
    if (version->parsed()) {
      std::printf("elq %s\n", kVersion);
      return 0;
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 3;
}
