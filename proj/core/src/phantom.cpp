#include "elq/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "elq/config.hpp"

namespace elq {

namespace {

// Frame furniture, in pixels.  Content is inset from the frame border; the
// color bar lives in the right margin with a little clearance all around.
constexpr int kMarginTop = 2;
constexpr int kMarginBottom = 2;
constexpr int kMarginLeft = 4;
constexpr int kMarginRight = 20;  // wide enough for the bar strip
constexpr int kBarWidth = 10;
constexpr int kBarTop = 4;
constexpr int kBarRightInset = 4;

constexpr uint8_t kGapGray = 30;
constexpr uint8_t kBoneGray = 150;
constexpr uint8_t kEchoGray = 90;  // nominal tissue echo for the B-mode raster

// Stateless per-pixel hash, used for B-mode speckle so that the texture does
// not depend on raster traversal order.
uint64_t pixel_hash(uint64_t seed, int x, int y) {
  uint64_t z = seed ^ (uint64_t(uint32_t(x)) << 32 | uint32_t(y));
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

uint8_t speckled_echo(uint64_t seed, int x, int y) {
  const int jitter = int(pixel_hash(seed, x, y) % 51) - 25;
  return uint8_t(std::clamp(kEchoGray + jitter, 0, 255));
}

}  // namespace

double LoadProfile::at(int col, int content_width) const {
  if (content_width <= 0) fail(Err::InvalidArgument, "content width must be positive");
  if (kind == Kind::Uniform) return 1.0;
  if (content_width == 1) return 1.0;
  const double cx = (content_width - 1) / 2.0;
  const double u = (col - cx) / cx;  // -1 at the left edge, +1 at the right
  return 1.0 - (1.0 - edge_factor) * u * u;
}

LoadProfile LoadProfile::parabolic(double edge_factor) {
  if (edge_factor <= 0.0)
    fail(Err::InvalidArgument, "parabolic edge factor must be positive");
  return LoadProfile{.kind = Kind::Parabolic, .edge_factor = edge_factor};
}

LoadProfile LoadProfile::parse(const std::string& text) {
  if (text == "uniform") return uniform();
  const std::string prefix = "parabolic:";
  if (text.rfind(prefix, 0) == 0) {
    errno = 0;
    char* end = nullptr;
    const double f = std::strtod(text.c_str() + prefix.size(), &end);
    if (errno != 0 || *end != '\0' || end == text.c_str() + prefix.size())
      fail(Err::ConfigError, "bad load profile '" + text + "'");
    return parabolic(f);
  }
  fail(Err::ConfigError, "load profile must be 'uniform' or 'parabolic:<edge_factor>', got '" +
                             text + "'");
}

std::string LoadProfile::to_string() const {
  if (kind == Kind::Uniform) return "uniform";
  char buf[64];
  std::snprintf(buf, sizeof buf, "parabolic:%.17g", edge_factor);
  return buf;
}

PhantomLayout phantom_layout(const PhantomScene& scene) {
  auto degenerate = [](const std::string& why) { fail(Err::DegenerateScene, why); };

  if (scene.width < kMinFrameDim || scene.height < kMinFrameDim)
    degenerate("frame must be at least " + std::to_string(kMinFrameDim) + " pixels each way");
  if (scene.standoff_thickness < 1) degenerate("standoff_thickness must be positive");
  if (scene.skin_gap_thickness < 1) degenerate("skin_gap_thickness must be positive");
  if (scene.tissue_thickness < 0) degenerate("tissue_thickness must be non-negative");
  if (scene.standoff_strainability < kQsMin || scene.standoff_strainability > kQsMax)
    degenerate("standoff_strainability must be in [1,100]");
  if (scene.color_noise_sigma < 0.0) degenerate("color_noise_sigma must be non-negative");
  if (!scene.colormap.empty() && scene.colormap.size() != size_t(kQsMax))
    degenerate("colormap must have exactly " + std::to_string(kQsMax) + " entries");

  if (scene.tissue_layers.empty()) degenerate("at least one tissue layer is required");
  double cursor = 0.0;
  for (const TissueLayer& l : scene.tissue_layers) {
    if (std::fabs(l.depth_from - cursor) > 1e-9)
      degenerate("tissue layers must partition [0,1] contiguously");
    if (l.depth_to <= l.depth_from) degenerate("tissue layer range must have positive extent");
    if (l.strainability < kQsMin || l.strainability > kQsMax)
      degenerate("layer strainability must be in [1,100]");
    cursor = l.depth_to;
  }
  if (std::fabs(cursor - 1.0) > 1e-9) degenerate("tissue layers must end at depth fraction 1");

  PhantomLayout lay;
  lay.content_x0 = kMarginLeft;
  lay.content_x1 = scene.width - kMarginRight;
  if (lay.content_x1 - lay.content_x0 < 8) degenerate("frame too narrow for content");

  lay.standoff_y0 = kMarginTop;
  lay.standoff_y1 = lay.standoff_y0 + scene.standoff_thickness;
  lay.gap_y0 = lay.standoff_y1;
  lay.gap_y1 = lay.gap_y0 + scene.skin_gap_thickness;
  lay.tissue_y0 = lay.gap_y1;
  lay.tissue_y1 = scene.tissue_thickness > 0 ? lay.tissue_y0 + scene.tissue_thickness
                                             : scene.height - kMarginBottom;
  if (lay.tissue_y1 > scene.height - kMarginBottom) degenerate("tissue extends past the frame");
  if (lay.tissue_y1 - lay.tissue_y0 < 2) degenerate("tissue needs at least 2 rows");

  int bar_h = scene.colorbar_height;
  if (bar_h == 0) bar_h = std::min(200, scene.height - kBarTop - kMarginBottom - 2);
  if (bar_h < 20) degenerate("color bar would be under 20 rows");
  if (kBarTop + bar_h > scene.height - kMarginBottom) degenerate("color bar exceeds the frame");
  lay.bar = ColorbarROI{.x = scene.width - kBarRightInset - kBarWidth,
                        .y = kBarTop,
                        .width = kBarWidth,
                        .height = bar_h,
                        .orientation = ColorbarROI::Orientation::SoftAtTop};

  if (scene.bone) {
    const BoneEllipse& b = *scene.bone;
    if (b.radius_x <= 0.0 || b.radius_y <= 0.0) degenerate("bone radii must be positive");
  }
  return lay;
}

PhantomFrame render(const PhantomScene& scene) {
  const PhantomLayout lay = phantom_layout(scene);
  const std::vector<Rgb> map = scene.colormap.empty() ? default_colormap() : scene.colormap;
  const int w = scene.width, h = scene.height;
  const int content_w = lay.content_x1 - lay.content_x0;

  Raster<Rgb> rgb(w, h, Rgb{0, 0, 0});
  Raster<uint8_t> gray(w, h, 0);  // grayscale base; doubles as the B-mode raster
  GroundTruth gt{
      .labels = Raster<RegionLabel>(w, h, RegionLabel::NoData),
      .qs = Raster<uint8_t>(w, h, 0),
      .strainability = Raster<float>(w, h, 0.0f),
      .rs = Raster<float>(w, h, 0.0f),
      .overlay_mask = Raster<uint8_t>(w, h, 0),
      .bar_roi = lay.bar,
  };

  // Quantize a loaded strainability to a score, tracking clipping.
  int clipped = 0;
  auto quantize = [&](double loaded) -> int {
    int q = int(std::lround(loaded));
    if (q < kQsMin || q > kQsMax) {
      ++clipped;
      q = std::clamp(q, kQsMin, kQsMax);
    }
    return q;
  };

  auto paint_overlay = [&](int x, int y, int q, double base, double rs) {
    rgb.at(x, y) = map[size_t(q - 1)];
    gray.at(x, y) = speckled_echo(scene.seed, x, y);
    gt.qs.at(x, y) = uint8_t(q);
    gt.strainability.at(x, y) = float(base);
    gt.rs.at(x, y) = float(rs);
    gt.overlay_mask.at(x, y) = 1;
  };

  const double tissue_h = double(lay.tissue_y1 - lay.tissue_y0);
  for (int x = lay.content_x0; x < lay.content_x1; ++x) {
    const double load = scene.load_profile.at(x - lay.content_x0, content_w);
    if (load <= 0.0) fail(Err::DegenerateScene, "load profile must stay positive");

    for (int y = lay.standoff_y0; y < lay.standoff_y1; ++y) {
      gt.labels.at(x, y) = RegionLabel::Standoff;
      paint_overlay(x, y, quantize(scene.standoff_strainability * load),
                    scene.standoff_strainability, 0.0);
    }
    for (int y = lay.gap_y0; y < lay.gap_y1; ++y) {
      gt.labels.at(x, y) = RegionLabel::SkinGap;
      rgb.at(x, y) = Rgb{kGapGray, kGapGray, kGapGray};
      gray.at(x, y) = kGapGray;
    }
    for (int y = lay.tissue_y0; y < lay.tissue_y1; ++y) {
      if (scene.bone) {
        const BoneEllipse& b = *scene.bone;
        const double dx = (x - b.center_x) / b.radius_x;
        const double dy = (y - b.center_y) / b.radius_y;
        if (dx * dx + dy * dy <= 1.0) {
          gt.labels.at(x, y) = RegionLabel::Bone;
          rgb.at(x, y) = Rgb{kBoneGray, kBoneGray, kBoneGray};
          gray.at(x, y) = kBoneGray;
          continue;
        }
      }
      const double depth = (y - lay.tissue_y0 + 0.5) / tissue_h;
      const TissueLayer* layer = &scene.tissue_layers.back();
      for (const TissueLayer& l : scene.tissue_layers)
        if (depth >= l.depth_from && depth < l.depth_to) { layer = &l; break; }
      gt.labels.at(x, y) = RegionLabel::Tissue;
      paint_overlay(x, y, quantize(layer->strainability * load), layer->strainability,
                    layer->strainability / scene.standoff_strainability);
    }
  }

  if (clipped > 0 && !scene.allow_clipping)
    fail(Err::ClippingRejected, std::to_string(clipped) +
                                    " pixels would quantize outside [1,100]; raise/lower the "
                                    "strainabilities or set allow_clipping");

  // Reference bar: level 100 (softest) at the top, equal bands downward.
  for (int j = 0; j < lay.bar.height; ++j) {
    const int q = kQsMax - j * kQsMax / lay.bar.height;
    for (int x = lay.bar.x; x < lay.bar.x + lay.bar.width; ++x) {
      rgb.at(x, lay.bar.y + j) = map[size_t(q - 1)];
      gt.overlay_mask.at(x, lay.bar.y + j) = 1;
    }
  }

  // Channel noise on the RGB frame only, fixed traversal order for
  // reproducibility.
  if (scene.color_noise_sigma > 0.0) {
    std::mt19937_64 rng(scene.seed);
    std::normal_distribution<double> noise(0.0, scene.color_noise_sigma);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        Rgb& c = rgb.at(x, y);
        c.r = uint8_t(std::clamp(long(c.r) + std::lround(noise(rng)), 0l, 255l));
        c.g = uint8_t(std::clamp(long(c.g) + std::lround(noise(rng)), 0l, 255l));
        c.b = uint8_t(std::clamp(long(c.b) + std::lround(noise(rng)), 0l, 255l));
      }
  }

  std::optional<Raster<uint8_t>> bmode;
  if (scene.emit_bmode) bmode = gray;
  return PhantomFrame{ElastogramFrame(std::move(rgb), std::move(bmode), scene.meta),
                      std::move(gt)};
}

// --- scene files -------------------------------------------------------------

namespace {

std::vector<TissueLayer> parse_layers(const std::string& text) {
  // "from:to:strainability, from:to:strainability, ..."
  std::vector<TissueLayer> layers;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    double a, b, s;
    if (std::sscanf(item.c_str(), " %lf : %lf : %lf", &a, &b, &s) != 3)
      fail(Err::ConfigError, "bad tissue layer '" + item + "', want from:to:strainability");
    layers.push_back(TissueLayer{a, b, s});
  }
  if (layers.empty()) fail(Err::ConfigError, "scene.layers is empty");
  return layers;
}

std::string layers_to_string(const std::vector<TissueLayer>& layers) {
  std::string out;
  char buf[128];
  for (const TissueLayer& l : layers) {
    std::snprintf(buf, sizeof buf, "%s%.17g:%.17g:%.17g", out.empty() ? "" : ", ", l.depth_from,
                  l.depth_to, l.strainability);
    out += buf;
  }
  return out;
}

}  // namespace

PhantomScene parse_scene(const std::string& text, const std::string& origin) {
  const KeyValueFile kv = KeyValueFile::parse(text, origin);
  PhantomScene s;
  s.width = kv.get_int("scene.width", s.width);
  s.height = kv.get_int("scene.height", s.height);
  s.standoff_thickness = kv.get_int("scene.standoff_thickness", s.standoff_thickness);
  s.skin_gap_thickness = kv.get_int("scene.skin_gap_thickness", s.skin_gap_thickness);
  s.tissue_thickness = kv.get_int("scene.tissue_thickness", s.tissue_thickness);
  s.standoff_strainability =
      kv.get_double("scene.standoff_strainability", s.standoff_strainability);
  if (kv.has("scene.layers")) s.tissue_layers = parse_layers(kv.get_string("scene.layers", ""));
  if (kv.has("scene.bone")) {
    const std::string b = kv.get_string("scene.bone", "");
    BoneEllipse e;
    if (std::sscanf(b.c_str(), " %lf : %lf : %lf : %lf", &e.center_x, &e.center_y, &e.radius_x,
                    &e.radius_y) != 4)
      fail(Err::ConfigError, "bad scene.bone '" + b + "', want cx:cy:rx:ry");
    s.bone = e;
  }
  s.load_profile = LoadProfile::parse(kv.get_string("scene.load", s.load_profile.to_string()));
  s.color_noise_sigma = kv.get_double("scene.color_noise_sigma", s.color_noise_sigma);
  s.seed = kv.get_u64("scene.seed", s.seed);
  s.allow_clipping = kv.get_bool("scene.allow_clipping", s.allow_clipping);
  s.emit_bmode = kv.get_bool("scene.emit_bmode", s.emit_bmode);
  s.colorbar_height = kv.get_int("scene.colorbar_height", s.colorbar_height);
  kv.finish();
  return s;
}

PhantomScene load_scene_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Err::IoError, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scene(buf.str(), path);
}

std::string scene_to_config(const PhantomScene& s) {
  char buf[256];
  std::string out = "# phantom scene\n";
  std::snprintf(buf, sizeof buf, "scene.width = %d\n", s.width); out += buf;
  std::snprintf(buf, sizeof buf, "scene.height = %d\n", s.height); out += buf;
  std::snprintf(buf, sizeof buf, "scene.standoff_thickness = %d\n", s.standoff_thickness);
  out += buf;
  std::snprintf(buf, sizeof buf, "scene.skin_gap_thickness = %d\n", s.skin_gap_thickness);
  out += buf;
  std::snprintf(buf, sizeof buf, "scene.tissue_thickness = %d\n", s.tissue_thickness); out += buf;
  std::snprintf(buf, sizeof buf, "scene.standoff_strainability = %.17g\n",
                s.standoff_strainability); out += buf;
  std::snprintf(buf, sizeof buf, "scene.layers = %s\n", layers_to_string(s.tissue_layers).c_str());
  out += buf;
  if (s.bone) {
    std::snprintf(buf, sizeof buf, "scene.bone = %.17g:%.17g:%.17g:%.17g\n", s.bone->center_x,
                  s.bone->center_y, s.bone->radius_x, s.bone->radius_y);
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "scene.load = %s\n", s.load_profile.to_string().c_str());
  out += buf;
  std::snprintf(buf, sizeof buf, "scene.color_noise_sigma = %.17g\n", s.color_noise_sigma);
  out += buf;
  std::snprintf(buf, sizeof buf, "scene.seed = %llu\n", (unsigned long long)s.seed); out += buf;
  std::snprintf(buf, sizeof buf, "scene.allow_clipping = %s\n",
                s.allow_clipping ? "true" : "false"); out += buf;
  std::snprintf(buf, sizeof buf, "scene.emit_bmode = %s\n", s.emit_bmode ? "true" : "false");
  out += buf;
  std::snprintf(buf, sizeof buf, "scene.colorbar_height = %d\n", s.colorbar_height); out += buf;
  return out;
}

}  // namespace elq
