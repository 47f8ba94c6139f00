#include "elq/color_scale.hpp"

#include <algorithm>
#include <cmath>

namespace elq {

ColorbarROI::Orientation parse_orientation(const std::string& text) {
  if (text == "soft_at_top") return ColorbarROI::Orientation::SoftAtTop;
  if (text == "stiff_at_top") return ColorbarROI::Orientation::StiffAtTop;
  fail(Err::InvalidArgument,
       "orientation must be soft_at_top or stiff_at_top, got '" + text + "'");
}

const char* to_string(ColorbarROI::Orientation o) {
  return o == ColorbarROI::Orientation::SoftAtTop ? "soft_at_top" : "stiff_at_top";
}

ColorScale::ColorScale(std::vector<Rgb> entries, double max_match_distance)
    : entries_(std::move(entries)), max_match_distance_(max_match_distance) {
  if (entries_.size() != size_t(kQsMax))
    fail(Err::InvalidArgument, "a color scale needs exactly " + std::to_string(kQsMax) +
                                   " entries, got " + std::to_string(entries_.size()));
  if (max_match_distance_ < 0.0)
    fail(Err::InvalidArgument, "max_match_distance must be non-negative");

  // A usable bar resolves at least two distinct colors.
  bool distinct = false;
  for (size_t i = 1; i < entries_.size() && !distinct; ++i)
    distinct = !(entries_[i] == entries_[0]);
  if (!distinct)
    fail(Err::DegenerateColorbar, "all scale entries identical, bar carries no information");
}

int ColorScale::invert(const Rgb& color) const {
  int best = 0;
  int best_d2 = 0;
  for (int i = 0; i < int(entries_.size()); ++i) {
    const int d2 = rgb_distance_sq(color, entries_[size_t(i)]);
    if (best == 0 || d2 < best_d2) {  // strict < keeps ties at the lower level
      best = i + 1;
      best_d2 = d2;
    }
  }
  if (std::sqrt(double(best_d2)) > max_match_distance_) return kQsNone;
  return best;
}

const Rgb& ColorScale::color(int qs) const {
  if (qs < kQsMin || qs > kQsMax)
    fail(Err::InvalidArgument, "QS level " + std::to_string(qs) + " out of range");
  return entries_[size_t(qs - 1)];
}

std::vector<Rgb> default_colormap() {
  // Piecewise-linear ramp through the four machine anchor colors, stiff end
  // first.  Level 1 = pure red, level 100 = pure blue.
  static const Rgb anchors[4] = {
      {255, 0, 0},    // stiff
      {255, 255, 0},
      {0, 255, 0},
      {0, 0, 255},    // soft
  };
  std::vector<Rgb> map(static_cast<size_t>(kQsMax));
  for (int i = 0; i < kQsMax; ++i) {
    const double pos = double(i) / double(kQsMax - 1) * 3.0;  // 0..3 across segments
    const int seg = std::min(int(pos), 2);
    const double f = pos - seg;
    const Rgb& a = anchors[seg];
    const Rgb& b = anchors[seg + 1];
    map[size_t(i)] = Rgb{uint8_t(std::lround(a.r + f * (b.r - a.r))),
                         uint8_t(std::lround(a.g + f * (b.g - a.g))),
                         uint8_t(std::lround(a.b + f * (b.b - a.b)))};
  }
  return map;
}

ColorScale extract_color_scale(const ElastogramFrame& frame, const ColorbarROI& roi,
                               double max_match_distance,
                               std::vector<std::string>* warnings) {
  const Raster<Rgb>& px = frame.pixels();
  if (roi.width <= 0 || roi.height <= 0)
    fail(Err::RoiOutOfBounds, "color bar ROI has non-positive size");
  if (roi.x < 0 || roi.y < 0 || roi.x + roi.width > px.width() ||
      roi.y + roi.height > px.height())
    fail(Err::RoiOutOfBounds, "color bar ROI exceeds the frame bounds");

  if (roi.height < kQsMax && warnings)
    warnings->push_back("color bar ROI is only " + std::to_string(roi.height) +
                        " rows for " + std::to_string(kQsMax) + " levels; levels share rows");

  // Middle third of the ROI columns (at least one column).
  int c0 = roi.x + roi.width / 3;
  int c1 = roi.x + roi.width - roi.width / 3;
  if (c1 <= c0) { c0 = roi.x; c1 = roi.x + roi.width; }

  // Mean color per ROI row.
  std::vector<double> row_r(size_t(roi.height)), row_g(size_t(roi.height)),
      row_b(size_t(roi.height));
  for (int j = 0; j < roi.height; ++j) {
    double r = 0, g = 0, b = 0;
    for (int x = c0; x < c1; ++x) {
      const Rgb& c = px.at(x, roi.y + j);
      r += c.r; g += c.g; b += c.b;
    }
    const double n = double(c1 - c0);
    row_r[size_t(j)] = r / n; row_g[size_t(j)] = g / n; row_b[size_t(j)] = b / n;
  }

  // Resample the rows into 100 equal bands along the bar axis, top first.
  std::vector<Rgb> entries(static_cast<size_t>(kQsMax));
  for (int band = 0; band < kQsMax; ++band) {
    int lo = band * roi.height / kQsMax;
    int hi = (band + 1) * roi.height / kQsMax;
    if (hi <= lo) hi = lo + 1;  // short bar: neighboring levels share a row
    double r = 0, g = 0, b = 0;
    for (int j = lo; j < hi; ++j) { r += row_r[size_t(j)]; g += row_g[size_t(j)]; b += row_b[size_t(j)]; }
    const double n = double(hi - lo);
    const Rgb mean{uint8_t(std::lround(r / n)), uint8_t(std::lround(g / n)),
                   uint8_t(std::lround(b / n))};
    const int qs = roi.orientation == ColorbarROI::Orientation::SoftAtTop ? kQsMax - band
                                                                          : band + 1;
    entries[size_t(qs - 1)] = mean;
  }

  return ColorScale(std::move(entries), max_match_distance);
}

}  // namespace elq
