#pragma once

#include <optional>
#include <string>
#include <vector>

#include "elq/color_scale.hpp"
#include "elq/types.hpp"

namespace elq {

// Per-column probe-pressure multiplier.  Parabolic mimics a convex probe
// pressing harder at the center of the image: multiplier 1 at the center
// column falling to edge_factor at the outermost content columns.
struct LoadProfile {
  enum class Kind : uint8_t { Uniform, Parabolic };
  Kind kind = Kind::Uniform;
  double edge_factor = 1.0;

  double at(int col, int content_width) const;

  static LoadProfile uniform() { return {}; }
  static LoadProfile parabolic(double edge_factor);
  static LoadProfile parse(const std::string& text);  // "uniform" | "parabolic:<f>"
  std::string to_string() const;
};

struct TissueLayer {
  double depth_from = 0.0;  // fraction of the tissue block, 0 = skin side
  double depth_to = 1.0;    // 1 = deep side
  double strainability = 60.0;
};

struct BoneEllipse {
  double center_x = 0.0, center_y = 0.0;  // frame pixel coordinates
  double radius_x = 0.0, radius_y = 0.0;
};

// A synthetic scene with exact, analytically-known ground truth.  The tissue
// block is a stack of constant-strainability layers addressed by depth
// fraction; an optional bone ellipse renders as flat grayscale (that is how
// bone shows up in real overlays); the load profile multiplies both standoff
// and tissue strainability before quantization, which the RS normalization
// must cancel.
struct PhantomScene {
  int width = 640, height = 480;
  int standoff_thickness = 80;
  int skin_gap_thickness = 4;
  int tissue_thickness = 0;  // rows; 0 = extend to the bottom margin
  double standoff_strainability = 60.0;
  std::vector<TissueLayer> tissue_layers = {TissueLayer{}};
  std::optional<BoneEllipse> bone;
  LoadProfile load_profile;
  double color_noise_sigma = 0.0;
  std::vector<Rgb> colormap;  // empty = default_colormap()
  uint64_t seed = 0;
  bool allow_clipping = false;
  bool emit_bmode = false;
  int colorbar_height = 0;  // rows; 0 = auto (up to 200, space permitting)
  FrameMeta meta;
};

// Where render() will put things, all in frame pixels.  y/x ranges are
// half-open [lo, hi).
struct PhantomLayout {
  int content_x0 = 0, content_x1 = 0;
  int standoff_y0 = 0, standoff_y1 = 0;
  int gap_y0 = 0, gap_y1 = 0;
  int tissue_y0 = 0, tissue_y1 = 0;
  ColorbarROI bar;
};
PhantomLayout phantom_layout(const PhantomScene& scene);  // throws DegenerateScene

struct GroundTruth {
  Raster<RegionLabel> labels;
  Raster<uint8_t> qs;            // loaded + quantized score, 0 = unscored pixel
  Raster<float> strainability;   // unloaded base strainability, 0 = none
  Raster<float> rs;              // analytic relative strainability, 0 = undefined
  Raster<uint8_t> overlay_mask;  // 1 where elastography color was drawn
  ColorbarROI bar_roi;
};

struct PhantomFrame {
  ElastogramFrame frame;
  GroundTruth truth;
};

// Deterministic: the same scene and seed give bit-identical output.  Noise
// only touches the RGB frame, never the ground truth or the B-mode raster.
// Throws ClippingRejected when the loaded quantized score would leave
// [1,100] and the scene did not opt in to clamping.
PhantomFrame render(const PhantomScene& scene);

// Scene files use the same key=value format as run configs.
PhantomScene load_scene_file(const std::string& path);
PhantomScene parse_scene(const std::string& text, const std::string& origin = "<string>");
std::string scene_to_config(const PhantomScene& scene);

}  // namespace elq
