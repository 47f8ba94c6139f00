#include "elq/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace elq {

namespace {

void check_params(const SegmentationParams& p) {
  if (p.saturation_threshold < 0 || p.residual_threshold < 0)
    fail(Err::InvalidArgument, "suppression thresholds must be non-negative");
  if (p.gap_min < 1) fail(Err::InvalidArgument, "gap_min must be at least 1");
  if (p.min_valid_column_fraction <= 0.0 || p.min_valid_column_fraction > 1.0)
    fail(Err::InvalidArgument, "min_valid_column_fraction must be in (0,1]");
  if (p.bone_depth_fraction < 0.0 || p.bone_depth_fraction >= 1.0)
    fail(Err::InvalidArgument, "bone_depth_fraction must be in [0,1)");
  if (p.bone_qs_percentile <= 0.0 || p.bone_qs_percentile >= 100.0)
    fail(Err::InvalidArgument, "bone_qs_percentile must be in (0,100)");
  if (p.bone_min_area < 1) fail(Err::InvalidArgument, "bone_min_area must be at least 1");
}

}  // namespace

Raster<uint8_t> suppress_bmode(const ElastogramFrame& frame, const SegmentationParams& params) {
  check_params(params);
  const Raster<Rgb>& px = frame.pixels();
  Raster<uint8_t> mask(px.width(), px.height(), 0);

  if (frame.bmode()) {
    const Raster<uint8_t>& gray = *frame.bmode();
    for (int y = 0; y < px.height(); ++y)
      for (int x = 0; x < px.width(); ++x) {
        const Rgb& c = px.at(x, y);
        const int g = gray.at(x, y);
        const int residual = std::max({std::abs(int(c.r) - g), std::abs(int(c.g) - g),
                                       std::abs(int(c.b) - g)});
        mask.at(x, y) = residual > params.residual_threshold ? 1 : 0;
      }
  } else {
    for (int y = 0; y < px.height(); ++y)
      for (int x = 0; x < px.width(); ++x) {
        const Rgb& c = px.at(x, y);
        const int hi = std::max({c.r, c.g, c.b});
        const int lo = std::min({c.r, c.g, c.b});
        mask.at(x, y) = (hi - lo) > params.saturation_threshold ? 1 : 0;
      }
  }
  return mask;
}

std::vector<int> find_skin_line(const Raster<uint8_t>& color_mask,
                                const SegmentationParams& params) {
  check_params(params);
  const int w = color_mask.width(), h = color_mask.height();
  std::vector<int> skin(size_t(w), kNoSkinLine);

  int valid = 0;
  for (int x = 0; x < w; ++x) {
    // First colored pixel from the top; nothing colored means no anatomy.
    int y = 0;
    while (y < h && !color_mask.at(x, y)) ++y;
    if (y == h) continue;

    // Walk maximal uncolored runs below it until one is both long enough and
    // closed off by color again.
    while (y < h) {
      while (y < h && color_mask.at(x, y)) ++y;
      const int run_start = y;
      while (y < h && !color_mask.at(x, y)) ++y;
      if (y >= h) break;  // run fell off the bottom, never closed
      if (y - run_start >= params.gap_min) {
        skin[size_t(x)] = run_start;
        ++valid;
        break;
      }
    }
  }

  const int needed = int(std::ceil(params.min_valid_column_fraction * double(w)));
  if (valid < needed)
    fail(Err::NoSkinLineFound, "skin line resolved in " + std::to_string(valid) + " of " +
                                   std::to_string(w) + " columns, need " +
                                   std::to_string(needed));
  return skin;
}

Raster<RegionLabel> split_standoff_tissue(const Raster<uint8_t>& color_mask,
                                          const std::vector<int>& skin_line) {
  const int w = color_mask.width(), h = color_mask.height();
  if (int(skin_line.size()) != w)
    fail(Err::InvalidArgument, "skin line length must equal the mask width");

  Raster<RegionLabel> labels(w, h, RegionLabel::NoData);
  for (int x = 0; x < w; ++x) {
    const int gap_start = skin_line[size_t(x)];
    if (gap_start == kNoSkinLine) continue;
    if (gap_start < 0 || gap_start >= h)
      fail(Err::InvalidArgument, "skin line row out of bounds in column " + std::to_string(x));

    int gap_end = gap_start;
    while (gap_end < h && !color_mask.at(x, gap_end)) ++gap_end;

    for (int y = 0; y < gap_start; ++y)
      if (color_mask.at(x, y)) labels.at(x, y) = RegionLabel::Standoff;
    for (int y = gap_start; y < gap_end; ++y) labels.at(x, y) = RegionLabel::SkinGap;
    for (int y = gap_end; y < h; ++y)
      if (color_mask.at(x, y)) labels.at(x, y) = RegionLabel::Tissue;
  }
  return labels;
}

namespace {

struct ColumnSpan {
  int top = -1, bottom = -1;  // inclusive tissue rows, -1 = no tissue
  bool has() const { return top >= 0; }
};

std::vector<ColumnSpan> tissue_spans(const Raster<RegionLabel>& labels) {
  std::vector<ColumnSpan> spans(size_t(labels.width()));
  for (int x = 0; x < labels.width(); ++x)
    for (int y = 0; y < labels.height(); ++y)
      if (labels.at(x, y) == RegionLabel::Tissue) {
        if (spans[size_t(x)].top < 0) spans[size_t(x)].top = y;
        spans[size_t(x)].bottom = y;
      }
  return spans;
}

}  // namespace

QSMap remove_bone(const QSMap& qs, const SegmentationParams& params) {
  check_params(params);
  const Raster<RegionLabel>& labels = qs.labels();
  const int w = labels.width(), h = labels.height();

  // Bone suppression is a one-shot pass; a map that already went through it
  // is returned untouched.
  for (RegionLabel l : labels.data())
    if (l == RegionLabel::Bone) return qs;

  const std::vector<ColumnSpan> spans = tissue_spans(labels);

  // Stiffness threshold: nearest-rank percentile of the positive tissue QS.
  std::vector<uint8_t> scores;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (labels.at(x, y) == RegionLabel::Tissue && qs.values().at(x, y) > kQsNone)
        scores.push_back(qs.values().at(x, y));
  int qs_threshold = 0;  // nothing scored: only no-score candidates remain
  if (!scores.empty()) {
    std::sort(scores.begin(), scores.end());
    const size_t rank =
        size_t(std::ceil(params.bone_qs_percentile / 100.0 * double(scores.size())));
    qs_threshold = scores[std::min(scores.size() - 1, rank > 0 ? rank - 1 : 0)];
  }

  // Seed candidates: deep in the column's tissue span, and either in the
  // stiffest band or carrying no score at all (shadowing reads as bone too).
  Raster<uint8_t> seed(w, h, 0);
  for (int x = 0; x < w; ++x) {
    const ColumnSpan& s = spans[size_t(x)];
    if (!s.has()) continue;
    const double span_len = double(s.bottom - s.top + 1);
    for (int y = s.top; y <= s.bottom; ++y) {
      if (double(y - s.top + 1) / span_len <= params.bone_depth_fraction) continue;
      const RegionLabel l = labels.at(x, y);
      const uint8_t v = qs.values().at(x, y);
      const bool no_score = (l == RegionLabel::Tissue || l == RegionLabel::NoData) && v == kQsNone;
      const bool stiff = l == RegionLabel::Tissue && v > kQsNone && int(v) <= qs_threshold;
      if (no_score || stiff) seed.at(x, y) = 1;
    }
  }

  // Close by one pixel of 8-neighbor dilation, staying inside tissue spans.
  Raster<uint8_t> mask = seed;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (!seed.at(x, y)) continue;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const int nx = x + dx, ny = y + dy;
          if (!mask.in_bounds(nx, ny)) continue;
          const ColumnSpan& s = spans[size_t(nx)];
          if (!s.has() || ny < s.top || ny > s.bottom) continue;
          const RegionLabel l = labels.at(nx, ny);
          if (l == RegionLabel::Tissue || l == RegionLabel::NoData) mask.at(nx, ny) = 1;
        }
    }

  // Keep 8-connected components of at least bone_min_area pixels.
  Raster<uint8_t> out_vals = qs.values();
  Raster<RegionLabel> out_labels = labels;
  Raster<uint8_t> visited(w, h, 0);
  std::vector<std::pair<int, int>> stack, component;
  for (int y0 = 0; y0 < h; ++y0)
    for (int x0 = 0; x0 < w; ++x0) {
      if (!mask.at(x0, y0) || visited.at(x0, y0)) continue;
      stack.assign(1, {x0, y0});
      component.clear();
      visited.at(x0, y0) = 1;
      while (!stack.empty()) {
        const auto [x, y] = stack.back();
        stack.pop_back();
        component.push_back({x, y});
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = x + dx, ny = y + dy;
            if (!mask.in_bounds(nx, ny) || visited.at(nx, ny) || !mask.at(nx, ny)) continue;
            visited.at(nx, ny) = 1;
            stack.push_back({nx, ny});
          }
      }
      if (int(component.size()) < params.bone_min_area) continue;
      for (const auto& [x, y] : component) {
        out_labels.at(x, y) = RegionLabel::Bone;
        out_vals.at(x, y) = kQsNone;
      }
    }

  return QSMap(std::move(out_vals), std::move(out_labels));
}

}  // namespace elq
