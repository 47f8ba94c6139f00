#pragma once

#include <array>
#include <string>
#include <vector>

#include "elq/phantom.hpp"

namespace elq {

// Distribution of the per-row RS slope painted into a site/group's frames:
// each subject draws an offset, each frame another, around the group mean.
struct SlopeDistribution {
  double mean = 0.0;
  double subject_sigma = 0.006;
  double frame_sigma = 0.02;
};

// Recipe for a whole labeled cohort of phantom frames.  Tissue is painted as
// a per-row RS ramp: RS(depth row d) = rs_base + slope * d, realized through
// strainability layers so the full pipeline (not a shortcut) must recover it.
// Slopes are clamped to the clipping-free range of the frame geometry.
struct CohortRecipe {
  uint64_t seed = 1;
  int subjects_non_ulcerated = 30;
  int subjects_ulcerated = 9;
  int frames_per_site = 3;

  int frame_width = 72, frame_height = 112;
  int standoff_thickness = 16;
  int skin_gap_thickness = 3;
  int tissue_thickness = 12;
  double standoff_strainability = 12.0;
  double rs_base = 2.0;
  double color_noise_sigma = 2.5;
  LoadProfile load_profile = LoadProfile::parabolic(0.85);

  std::array<std::array<SlopeDistribution, 2>, 4> slopes{};  // [site][group]

  SlopeDistribution& slope_for(Site s, Group g);
  const SlopeDistribution& slope_for(Site s, Group g) const;

  // The slope range this geometry can paint without quantization clipping.
  double max_safe_slope() const;
  double min_safe_slope() const;

  static CohortRecipe load(const std::string& path);
  static CohortRecipe parse(const std::string& text, const std::string& origin = "<string>");
  std::string to_config_text() const;
};

struct CohortFrame {
  FrameMeta meta;
  ElastogramFrame frame;
  double painted_slope = 0.0;  // ground-truth per-row RS slope of this frame
};

// Deterministic generation: same recipe (seed included) gives bit-identical
// frames.  Ordering is site-major, then group, subject, frame.
std::vector<CohortFrame> synth_cohort(const CohortRecipe& recipe);

// The scene a single cohort frame uses; exposed so tests can reason about
// geometry and expected values.
PhantomScene cohort_frame_scene(const CohortRecipe& recipe, double slope, uint64_t seed,
                                const FrameMeta& meta);

}  // namespace elq
