#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "elq/types.hpp"

namespace elq {

// Tiny software canvas with a built-in 5x7 bitmap font; enough for heatmaps,
// profile strips and bar charts without dragging in a plotting stack.
class Canvas {
 public:
  Canvas(int width, int height, Rgb background);

  void set(int x, int y, Rgb c);  // silently clips
  void fill_rect(int x, int y, int w, int h, Rgb c);
  void draw_rect(int x, int y, int w, int h, Rgb c);
  void hline(int x0, int x1, int y, Rgb c);
  void vline(int x, int y0, int y1, Rgb c);
  void line(int x0, int y0, int x1, int y1, Rgb c);

  // Uppercases letters; unknown characters render as blanks.
  void text(int x, int y, std::string_view s, Rgb c, int scale = 1);
  static int text_width(std::string_view s, int scale = 1);
  static constexpr int kGlyphH = 7;

  const Raster<Rgb>& image() const { return image_; }

 private:
  Raster<Rgb> image_;
};

struct GradientField;
class RSMap;
struct GroupComparison;

// RS map as a false-color image (the elastography map itself: soft = blue);
// invalid pixels dark gray.  A header strip shows the value range.
void save_heatmap_rs(const std::string& path, const RSMap& rs);

// Per-pixel oblique gradient magnitude as a heat ramp (black->red->yellow).
void save_heatmap_gr(const std::string& path, const GradientField& field);

// Row/column aggregate strips: row means of gx against row index and column
// means of gy against column index, one panel each.
void save_profile_plot(const std::string& path, const GradientField& field);

// Grouped bar chart for one metric across sites: mean bars per group with
// 95% CI whiskers, starred when p < 0.05.
void save_group_bar_chart(const std::string& path, Metric metric,
                          const std::vector<GroupComparison>& comparisons);

}  // namespace elq
