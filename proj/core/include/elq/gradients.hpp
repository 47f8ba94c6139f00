#pragma once

#include "elq/types.hpp"

namespace elq {

struct GradientParams {
  double spacing_x = 1.0;
  double spacing_y = 1.0;
  int agg_min_count = 5;  // valid cells a row/column needs to contribute a mean
};

// Per-pixel finite differences of the RS field.  Despite sometimes being
// described as right differences, the defining formulas subtract the left /
// upper neighbor, i.e. backward differences, and that literal form is what
// runs here: gx(x,y) = (RS(x,y) - RS(x-1,y)) / spacing_x, gy analogous in y,
// gr = sqrt(gx^2 + gy^2) where both exist.  A cell is valid only when both
// operands of its difference are valid, so the first column never has gx and
// the first row never has gy.  Throws EmptyField on an all-invalid RS map.
GradientField gradient_field(const RSMap& rs, double spacing_x = 1.0, double spacing_y = 1.0);

// Fill in the row/column means and the totals: row_mean_gx[r] is the mean of
// the valid gx cells in row r when there are at least agg_min_count of them
// (NaN otherwise), col_mean_gy likewise per column.  total_gx / total_gy are
// the means of the defined row/column means, and total_gr is
// sqrt(total_gx^2 + total_gy^2) computed from the totals — deliberately not
// the mean of the per-pixel gr field, which is a different number.  Throws
// NoAggregableData only when every row and every column lacks support.
void aggregate(GradientField& field, int agg_min_count = 5);

}  // namespace elq
