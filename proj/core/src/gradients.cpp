#include "elq/gradients.hpp"

#include <cmath>

namespace elq {

GradientField gradient_field(const RSMap& rs, double spacing_x, double spacing_y) {
  if (spacing_x <= 0.0 || spacing_y <= 0.0)
    fail(Err::InvalidArgument, "spacings must be positive");
  if (rs.valid_count() == 0) fail(Err::EmptyField, "RS map has no valid pixels");

  const int w = rs.width(), h = rs.height();
  GradientField f;
  f.spacing_x = spacing_x;
  f.spacing_y = spacing_y;
  f.gx = Raster<double>(w, h, 0.0);
  f.gy = Raster<double>(w, h, 0.0);
  f.gr = Raster<double>(w, h, 0.0);
  f.gx_valid = Raster<uint8_t>(w, h, 0);
  f.gy_valid = Raster<uint8_t>(w, h, 0);
  f.gr_valid = Raster<uint8_t>(w, h, 0);

  const Raster<double>& v = rs.values();
  const Raster<uint8_t>& ok = rs.valid();
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (!ok.at(x, y)) continue;
      if (x > 0 && ok.at(x - 1, y)) {
        f.gx.at(x, y) = (v.at(x, y) - v.at(x - 1, y)) / spacing_x;
        f.gx_valid.at(x, y) = 1;
      }
      if (y > 0 && ok.at(x, y - 1)) {
        f.gy.at(x, y) = (v.at(x, y) - v.at(x, y - 1)) / spacing_y;
        f.gy_valid.at(x, y) = 1;
      }
      if (f.gx_valid.at(x, y) && f.gy_valid.at(x, y)) {
        f.gr.at(x, y) = std::hypot(f.gx.at(x, y), f.gy.at(x, y));
        f.gr_valid.at(x, y) = 1;
      }
    }
  return f;
}

void aggregate(GradientField& field, int agg_min_count) {
  if (agg_min_count < 1) fail(Err::InvalidArgument, "agg_min_count must be at least 1");
  const int w = field.gx.width(), h = field.gx.height();

  field.row_mean_gx.assign(size_t(h), kUndefined);
  field.col_mean_gy.assign(size_t(w), kUndefined);

  for (int y = 0; y < h; ++y) {
    double sum = 0.0;
    int n = 0;
    for (int x = 0; x < w; ++x)
      if (field.gx_valid.at(x, y)) { sum += field.gx.at(x, y); ++n; }
    if (n >= agg_min_count) field.row_mean_gx[size_t(y)] = sum / double(n);
  }
  for (int x = 0; x < w; ++x) {
    double sum = 0.0;
    int n = 0;
    for (int y = 0; y < h; ++y)
      if (field.gy_valid.at(x, y)) { sum += field.gy.at(x, y); ++n; }
    if (n >= agg_min_count) field.col_mean_gy[size_t(x)] = sum / double(n);
  }

  double row_sum = 0.0, col_sum = 0.0;
  int rows = 0, cols = 0;
  for (double m : field.row_mean_gx)
    if (!std::isnan(m)) { row_sum += m; ++rows; }
  for (double m : field.col_mean_gy)
    if (!std::isnan(m)) { col_sum += m; ++cols; }

  if (rows == 0 && cols == 0)
    fail(Err::NoAggregableData, "no row or column reaches " + std::to_string(agg_min_count) +
                                    " valid gradient cells");

  field.total_gx = rows > 0 ? row_sum / double(rows) : kUndefined;
  field.total_gy = cols > 0 ? col_sum / double(cols) : kUndefined;
  field.total_gr = (rows > 0 && cols > 0) ? std::hypot(field.total_gx, field.total_gy)
                                          : kUndefined;
  field.has_aggregates = true;
}

}  // namespace elq
