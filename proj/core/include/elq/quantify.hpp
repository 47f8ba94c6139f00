#pragma once

#include <vector>

#include "elq/color_scale.hpp"
#include "elq/types.hpp"

namespace elq {

struct QuantifyParams {
  int ref_min_pixels = 3;  // standoff pixels a column needs to give a reference
  double ref_floor = 5.0;  // minimum usable reference mean (QS levels)
};

// Score every Standoff and Tissue pixel by inverting its color through the
// scale; SkinGap, Bone and NoData pixels score 0.  An unmatched color (too
// far from every scale entry) also scores 0 and is treated as missing data
// downstream, not as a stiffness extreme.
QSMap compute_qs(const ElastogramFrame& frame, const Raster<RegionLabel>& labels,
                 const ColorScale& scale);

// Per-column normalization reference: the mean of the column's nonzero
// standoff scores, or 0 when the column has fewer than ref_min_pixels of them
// or the mean falls below ref_floor.  Throws NoStandoffFound when no column
// qualifies at all.
std::vector<double> column_reference(const QSMap& qs, const QuantifyParams& params = {});

// Relative strainability: each scored tissue pixel divided by its column's
// reference.  Pixels without a score, or in excluded columns, come out
// invalid.  Bone and standoff never carry RS.
RSMap compute_rs(const QSMap& qs, const std::vector<double>& reference);

}  // namespace elq
