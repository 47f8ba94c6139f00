#pragma once

#include <string>
#include <vector>

#include "elq/types.hpp"

namespace elq {

inline constexpr double kDefaultMaxMatchDistance = 40.0;

// Where the reference color bar sits inside the frame, in pixels.  The ROI is
// always supplied by the operator (machine UIs move, we don't guess).
struct ColorbarROI {
  int x = 0, y = 0;
  int width = 0, height = 0;
  enum class Orientation : uint8_t { SoftAtTop, StiffAtTop };
  Orientation orientation = Orientation::SoftAtTop;
};

ColorbarROI::Orientation parse_orientation(const std::string& text);
const char* to_string(ColorbarROI::Orientation o);

// A calibrated lookup table mapping overlay colors to QS levels 1..100.
// Entry i is the representative color of QS level i+1.
class ColorScale {
 public:
  ColorScale(std::vector<Rgb> entries, double max_match_distance = kDefaultMaxMatchDistance);

  // Nearest-entry inversion in RGB euclidean distance.  Returns the QS level
  // (1..100), or 0 when the nearest entry is farther than
  // max_match_distance.  Ties resolve toward the lower level.
  int invert(const Rgb& color) const;

  const Rgb& color(int qs) const;  // qs in 1..100
  const std::vector<Rgb>& entries() const { return entries_; }
  double max_match_distance() const { return max_match_distance_; }

 private:
  std::vector<Rgb> entries_;
  double max_match_distance_;
};

// The map most machines ship: red (stiff, QS 1) -> yellow -> green -> blue
// (soft, QS 100), sampled at the 100 levels.
std::vector<Rgb> default_colormap();

// Read the color bar out of a frame and build the scale.  The bar is assumed
// linear in QS along its axis; bands of rows are averaged per level over the
// middle third of the ROI columns to dodge border bleed.  A bar shorter than
// 100 rows still works (levels share rows) but earns a warning.
ColorScale extract_color_scale(const ElastogramFrame& frame, const ColorbarROI& roi,
                               double max_match_distance = kDefaultMaxMatchDistance,
                               std::vector<std::string>* warnings = nullptr);

}  // namespace elq
