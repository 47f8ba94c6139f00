#pragma once

#include <vector>

#include "elq/types.hpp"

namespace elq {

struct SegmentationParams {
  // suppress_bmode
  int saturation_threshold = 25;  // max-min channel spread that marks color
  int residual_threshold = 20;    // |rgb - bmode| residual that marks color
  // find_skin_line
  int gap_min = 3;                        // rows of uncolored gap that count as skin
  double min_valid_column_fraction = 0.5; // below this the frame is rejected
  // remove_bone
  double bone_depth_fraction = 0.6;  // candidates live deeper than this in the column span
  double bone_qs_percentile = 10.0;  // stiffest-band threshold over tissue QS
  int bone_min_area = 25;            // connected components smaller than this survive
};

inline constexpr int kNoSkinLine = -1;

// Which pixels carry elastography color rather than grayscale echo.  With a
// B-mode raster present the test is the per-channel residual against it;
// without one it falls back to channel saturation.  1 = colored overlay.
Raster<uint8_t> suppress_bmode(const ElastogramFrame& frame,
                               const SegmentationParams& params = {});

// Per-column skin line: the first row of the first >= gap_min run of
// uncolored pixels that has colored pixels below it again.  Columns with no
// such structure get kNoSkinLine.  Throws NoSkinLineFound when fewer than
// min_valid_column_fraction of the columns resolve.
std::vector<int> find_skin_line(const Raster<uint8_t>& color_mask,
                                const SegmentationParams& params = {});

// Turn mask + skin line into region labels.  Invalid columns are wholly
// NoData; in valid columns colored pixels above the line are Standoff, the
// gap run is SkinGap, colored pixels below are Tissue, everything else NoData.
Raster<RegionLabel> split_standoff_tissue(const Raster<uint8_t>& color_mask,
                                          const std::vector<int>& skin_line);

// Relabel bone inside the tissue block and zero its scores: pixels deeper
// than bone_depth_fraction of their column's tissue span that are either in
// the stiffest bone_qs_percentile of tissue scores or carry no score at all,
// closed by one pixel of dilation, kept only as connected components of at
// least bone_min_area pixels.  Running it on a map that already has Bone
// labels is a no-op, so the operation is idempotent.
QSMap remove_bone(const QSMap& qs, const SegmentationParams& params = {});

}  // namespace elq
