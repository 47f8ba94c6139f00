#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "elq/raster.hpp"

namespace elq {

inline constexpr int kQsMin = 1;
inline constexpr int kQsMax = 100;
inline constexpr int kQsNone = 0;  // "no data" sentinel, never a real score
inline constexpr int kMinFrameDim = 64;

inline constexpr double kUndefined = std::numeric_limits<double>::quiet_NaN();

enum class Site : uint8_t { LeftForefoot, LeftHeel, RightForefoot, RightHeel };
enum class Group : uint8_t { Ulcerated, NonUlcerated };
enum class Metric : uint8_t { TotalGx, TotalGy, TotalGr };

inline constexpr std::array<Site, 4> kAllSites = {
    Site::LeftForefoot, Site::LeftHeel, Site::RightForefoot, Site::RightHeel};
inline constexpr std::array<Group, 2> kAllGroups = {Group::Ulcerated, Group::NonUlcerated};
inline constexpr std::array<Metric, 3> kAllMetrics = {Metric::TotalGx, Metric::TotalGy,
                                                      Metric::TotalGr};

const char* to_string(Site s);
const char* to_string(Group g);
const char* to_string(Metric m);
Site parse_site(const std::string& text);      // "left_forefoot" etc.
Group parse_group(const std::string& text);    // "ulcerated" / "non_ulcerated"
Metric parse_metric(const std::string& text);  // "total_gx" / "total_gy" / "total_gr"

// Region classes assigned by segmentation, one per pixel.
enum class RegionLabel : uint8_t {
  NoData = 0,   // outside the usable overlay, or an excluded column
  Standoff = 1, // gel pad between probe and skin (shallow, colored)
  SkinGap = 2,  // thin uncolored band at the skin line
  Tissue = 3,   // plantar soft tissue below the skin
  Bone = 4,     // suppressed bone region inside the tissue block
};
const char* to_string(RegionLabel l);

struct FrameMeta {
  std::string subject_id;
  Site site = Site::LeftForefoot;
  Group group = Group::NonUlcerated;
  int frame_index = 0;
};

// An input frame: the RGB elastogram, optionally the matching grayscale
// B-mode raster (same geometry), plus whatever identity we know.
class ElastogramFrame {
 public:
  ElastogramFrame(Raster<Rgb> pixels, std::optional<Raster<uint8_t>> bmode = std::nullopt,
                  FrameMeta meta = {});

  const Raster<Rgb>& pixels() const { return pixels_; }
  const std::optional<Raster<uint8_t>>& bmode() const { return bmode_; }
  const FrameMeta& meta() const { return meta_; }
  int width() const { return pixels_.width(); }
  int height() const { return pixels_.height(); }

 private:
  Raster<Rgb> pixels_;
  std::optional<Raster<uint8_t>> bmode_;
  FrameMeta meta_;
};

// Per-pixel quantitative strainability (QS).  Values are 1..100 where 100 is
// the most strainable (softest, blue end of the color bar) and 1 the least
// (stiffest, red end); 0 means "no score".  Only Standoff and Tissue pixels
// carry scores.  Construction enforces the column ordering standoff above
// skin gap above tissue.
class QSMap {
 public:
  QSMap(Raster<uint8_t> values, Raster<RegionLabel> labels);

  const Raster<uint8_t>& values() const { return values_; }
  const Raster<RegionLabel>& labels() const { return labels_; }
  int width() const { return values_.width(); }
  int height() const { return values_.height(); }

 private:
  Raster<uint8_t> values_;
  Raster<RegionLabel> labels_;
};

// Relative strainability: tissue QS divided by the column's standoff mean.
// Valid only where a score exists and the column had a usable reference.
class RSMap {
 public:
  RSMap(Raster<double> values, Raster<uint8_t> valid, std::vector<double> column_reference);

  // Fully-valid map from a plain matrix (references all 1).  Handy for tests
  // and benchmarks that exercise the gradient stage directly.
  static RSMap from_matrix(const Raster<double>& values);

  const Raster<double>& values() const { return values_; }
  const Raster<uint8_t>& valid() const { return valid_; }
  const std::vector<double>& column_reference() const { return column_reference_; }
  int width() const { return values_.width(); }
  int height() const { return values_.height(); }
  int valid_count() const;

 private:
  Raster<double> values_;
  Raster<uint8_t> valid_;             // 1 = RS defined at this pixel
  std::vector<double> column_reference_;  // standoff mean per column, 0 = excluded
};

// Backward-difference gradients of an RS map plus their aggregates.  A cell
// is valid only when the difference had both operands; aggregates below the
// support threshold are kUndefined (NaN).
struct GradientField {
  Raster<double> gx, gy, gr;
  Raster<uint8_t> gx_valid, gy_valid, gr_valid;
  double spacing_x = 1.0, spacing_y = 1.0;

  // filled by aggregate()
  std::vector<double> row_mean_gx;  // one per row, NaN where support too thin
  std::vector<double> col_mean_gy;  // one per column
  double total_gx = kUndefined;
  double total_gy = kUndefined;
  double total_gr = kUndefined;
  bool has_aggregates = false;
};

// One group-vs-group significance test (a = ulcerated, b = non-ulcerated).
struct GroupComparison {
  Site site = Site::LeftForefoot;
  Metric metric = Metric::TotalGy;
  int n_a = 0, n_b = 0;
  double mean_a = kUndefined, mean_b = kUndefined;
  double ci95_a = kUndefined, ci95_b = kUndefined;  // half-widths
  double t = kUndefined, df = kUndefined;
  double p_two_tailed = kUndefined, eta_squared = kUndefined;
  bool degenerate = false;   // both groups constant and equal
  std::string error;         // nonempty when the test could not run
};

// --- reporting conventions ---------------------------------------------------

enum class AnteriorAt : uint8_t { ImageLeft, ImageRight };
AnteriorAt parse_anterior_at(const std::string& text);
const char* to_string(AnteriorAt a);

// The fixed geometric and sign conventions everything above assumes.  Raw
// gradients always live in image axes on the strainability scale; the two
// reporting flags only flip signs at the reporting boundary.
struct FrameConventions {
  bool row_zero_at_probe;          // y=0 is the shallow edge (standoff side)
  bool depth_increases_with_y;     // larger y = deeper (toward bone)
  bool qs_increases_with_softness; // QS 100 = most strainable, 1 = stiffest
  AnteriorAt default_anterior_at;  // anatomical anterior on the image x axis
  bool gx_positive_toward_image_right;
  bool gy_positive_toward_depth;
};
FrameConventions coordinate_conventions();

// Sign applied to total_gx when reporting along the anterior->posterior axis,
// optionally on the stiffness scale (stiffness = flipped strainability).
double reported_sign_gx(AnteriorAt anterior_at, bool report_as_stiffness);
// Sign applied to total_gy when reporting along superior->inferior (depth).
double reported_sign_gy(bool report_as_stiffness);

}  // namespace elq
