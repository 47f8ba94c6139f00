#pragma once

#include <string>

#include "elq/phantom.hpp"

namespace elq {

// Ground-truth rasters travel as flat little-endian binary so any language
// can read them back for oracle tests.  Layout:
//   bytes 0..3   magic "EQGT"
//   byte  4      format version (1)
//   byte  5      dtype: 1 = uint8, 2 = float32
//   bytes 6..7   reserved, zero
//   bytes 8..11  width  (uint32 LE)
//   bytes 12..15 height (uint32 LE)
//   then width*height values, row-major from the top-left pixel.
void write_gt_u8(const std::string& path, const Raster<uint8_t>& raster);
void write_gt_f32(const std::string& path, const Raster<float>& raster);
Raster<uint8_t> read_gt_u8(const std::string& path);
Raster<float> read_gt_f32(const std::string& path);

// Writes the full bundle under dir with the given stem: labels, qs,
// strainability, rs, overlay mask, plus "<stem>_gt_manifest.json" describing
// the files, dimensions and bar ROI (and echoing the scene when given).
// Returns the manifest path.
std::string write_ground_truth(const std::string& dir, const std::string& stem,
                               const GroundTruth& truth, const PhantomScene* scene = nullptr);

Raster<RegionLabel> labels_from_u8(const Raster<uint8_t>& raw);
Raster<uint8_t> labels_to_u8(const Raster<RegionLabel>& labels);

}  // namespace elq
