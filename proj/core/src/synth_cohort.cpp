#include "elq/cohort.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "elq/config.hpp"

namespace elq {

SlopeDistribution& CohortRecipe::slope_for(Site s, Group g) {
  return slopes[size_t(s)][size_t(g)];
}
const SlopeDistribution& CohortRecipe::slope_for(Site s, Group g) const {
  return slopes[size_t(s)][size_t(g)];
}

double CohortRecipe::max_safe_slope() const {
  // Deepest row must stay at or below QS 100 under the strongest load (1.0),
  // with a little headroom for rounding.
  const int d = tissue_thickness - 1;
  if (d <= 0) return 0.0;
  return 0.98 * (double(kQsMax) / standoff_strainability - rs_base) / double(d);
}

double CohortRecipe::min_safe_slope() const {
  // Deepest row must stay at or above QS 1 under the weakest load.
  const int d = tissue_thickness - 1;
  if (d <= 0) return 0.0;
  double min_load = 1.0;
  for (int c = 0; c < frame_width; ++c)
    min_load = std::min(min_load, load_profile.at(c, frame_width));
  return 0.98 * (double(kQsMin) / (standoff_strainability * min_load) - rs_base) / double(d);
}

PhantomScene cohort_frame_scene(const CohortRecipe& r, double slope, uint64_t seed,
                                const FrameMeta& meta) {
  PhantomScene scene;
  scene.width = r.frame_width;
  scene.height = r.frame_height;
  scene.standoff_thickness = r.standoff_thickness;
  scene.skin_gap_thickness = r.skin_gap_thickness;
  scene.tissue_thickness = r.tissue_thickness;
  scene.standoff_strainability = r.standoff_strainability;
  scene.load_profile = r.load_profile;
  scene.color_noise_sigma = r.color_noise_sigma;
  scene.seed = seed;
  scene.meta = meta;

  // One layer per tissue row realizes RS(d) = rs_base + slope*d exactly.
  scene.tissue_layers.clear();
  const int n = r.tissue_thickness;
  for (int d = 0; d < n; ++d) {
    const double rs = r.rs_base + slope * double(d);
    scene.tissue_layers.push_back(TissueLayer{double(d) / double(n), double(d + 1) / double(n),
                                              rs * r.standoff_strainability});
  }
  return scene;
}

std::vector<CohortFrame> synth_cohort(const CohortRecipe& recipe) {
  if (recipe.subjects_non_ulcerated < 0 || recipe.subjects_ulcerated < 0)
    fail(Err::InvalidArgument, "subject counts must be non-negative");
  if (recipe.frames_per_site < 1)
    fail(Err::InvalidArgument, "frames_per_site must be at least 1");

  const double lo = recipe.min_safe_slope(), hi = recipe.max_safe_slope();
  std::mt19937_64 rng(recipe.seed);
  std::normal_distribution<double> unit(0.0, 1.0);

  std::vector<CohortFrame> frames;
  char subject[32];
  for (Site site : kAllSites) {
    for (Group group : kAllGroups) {
      const SlopeDistribution& dist = recipe.slope_for(site, group);
      const int n_subjects = group == Group::Ulcerated ? recipe.subjects_ulcerated
                                                       : recipe.subjects_non_ulcerated;
      for (int s = 0; s < n_subjects; ++s) {
        std::snprintf(subject, sizeof subject, "%s%02d",
                      group == Group::Ulcerated ? "UL" : "NU", s + 1);
        const double subject_offset = dist.subject_sigma * unit(rng);
        for (int f = 0; f < recipe.frames_per_site; ++f) {
          const double slope = std::clamp(
              dist.mean + subject_offset + dist.frame_sigma * unit(rng), lo, hi);
          const uint64_t frame_seed = rng();
          FrameMeta meta{.subject_id = subject, .site = site, .group = group, .frame_index = f};
          PhantomFrame rendered = render(cohort_frame_scene(recipe, slope, frame_seed, meta));
          frames.push_back(CohortFrame{std::move(meta), std::move(rendered.frame), slope});
        }
      }
    }
  }
  return frames;
}

// --- recipe files ------------------------------------------------------------

CohortRecipe CohortRecipe::parse(const std::string& text, const std::string& origin) {
  const KeyValueFile kv = KeyValueFile::parse(text, origin);
  CohortRecipe r;
  r.seed = kv.get_u64("cohort.seed", r.seed);
  r.subjects_non_ulcerated = kv.get_int("cohort.subjects_non_ulcerated", r.subjects_non_ulcerated);
  r.subjects_ulcerated = kv.get_int("cohort.subjects_ulcerated", r.subjects_ulcerated);
  r.frames_per_site = kv.get_int("cohort.frames_per_site", r.frames_per_site);

  r.frame_width = kv.get_int("frame.width", r.frame_width);
  r.frame_height = kv.get_int("frame.height", r.frame_height);
  r.standoff_thickness = kv.get_int("frame.standoff_thickness", r.standoff_thickness);
  r.skin_gap_thickness = kv.get_int("frame.skin_gap_thickness", r.skin_gap_thickness);
  r.tissue_thickness = kv.get_int("frame.tissue_thickness", r.tissue_thickness);
  r.standoff_strainability =
      kv.get_double("frame.standoff_strainability", r.standoff_strainability);
  r.rs_base = kv.get_double("frame.rs_base", r.rs_base);
  r.color_noise_sigma = kv.get_double("frame.color_noise_sigma", r.color_noise_sigma);
  r.load_profile = LoadProfile::parse(kv.get_string("frame.load", r.load_profile.to_string()));

  for (Site site : kAllSites)
    for (Group group : kAllGroups) {
      const std::string prefix =
          std::string("slope.") + to_string(site) + "." + to_string(group) + ".";
      SlopeDistribution& d = r.slope_for(site, group);
      d.mean = kv.get_double(prefix + "mean", d.mean);
      d.subject_sigma = kv.get_double(prefix + "subject_sigma", d.subject_sigma);
      d.frame_sigma = kv.get_double(prefix + "frame_sigma", d.frame_sigma);
    }
  kv.finish();
  return r;
}

CohortRecipe CohortRecipe::load(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) fail(Err::IoError, "cannot open '" + path + "'");
  std::string text;
  char buf[4096];
  size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) text.append(buf, n);
  std::fclose(f);
  return parse(text, path);
}

std::string CohortRecipe::to_config_text() const {
  char buf[256];
  std::string out = "# synthetic cohort recipe\n";
  std::snprintf(buf, sizeof buf, "cohort.seed = %llu\n", (unsigned long long)seed); out += buf;
  std::snprintf(buf, sizeof buf, "cohort.subjects_non_ulcerated = %d\n", subjects_non_ulcerated);
  out += buf;
  std::snprintf(buf, sizeof buf, "cohort.subjects_ulcerated = %d\n", subjects_ulcerated);
  out += buf;
  std::snprintf(buf, sizeof buf, "cohort.frames_per_site = %d\n", frames_per_site); out += buf;
  std::snprintf(buf, sizeof buf, "frame.width = %d\n", frame_width); out += buf;
  std::snprintf(buf, sizeof buf, "frame.height = %d\n", frame_height); out += buf;
  std::snprintf(buf, sizeof buf, "frame.standoff_thickness = %d\n", standoff_thickness);
  out += buf;
  std::snprintf(buf, sizeof buf, "frame.skin_gap_thickness = %d\n", skin_gap_thickness);
  out += buf;
  std::snprintf(buf, sizeof buf, "frame.tissue_thickness = %d\n", tissue_thickness); out += buf;
  std::snprintf(buf, sizeof buf, "frame.standoff_strainability = %.17g\n",
                standoff_strainability); out += buf;
  std::snprintf(buf, sizeof buf, "frame.rs_base = %.17g\n", rs_base); out += buf;
  std::snprintf(buf, sizeof buf, "frame.color_noise_sigma = %.17g\n", color_noise_sigma);
  out += buf;
  std::snprintf(buf, sizeof buf, "frame.load = %s\n", load_profile.to_string().c_str());
  out += buf;
  for (Site site : kAllSites)
    for (Group group : kAllGroups) {
      const SlopeDistribution& d = slope_for(site, group);
      const std::string prefix =
          std::string("slope.") + to_string(site) + "." + to_string(group) + ".";
      std::snprintf(buf, sizeof buf, "%smean = %.17g\n", prefix.c_str(), d.mean); out += buf;
      std::snprintf(buf, sizeof buf, "%ssubject_sigma = %.17g\n", prefix.c_str(),
                    d.subject_sigma); out += buf;
      std::snprintf(buf, sizeof buf, "%sframe_sigma = %.17g\n", prefix.c_str(), d.frame_sigma);
      out += buf;
    }
  return out;
}

}  // namespace elq
