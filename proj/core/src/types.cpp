#include "elq/types.hpp"

#include <algorithm>
#include <cmath>

namespace elq {

const char* to_string(Site s) {
  switch (s) {
    case Site::LeftForefoot:  return "left_forefoot";
    case Site::LeftHeel:      return "left_heel";
    case Site::RightForefoot: return "right_forefoot";
    case Site::RightHeel:     return "right_heel";
  }
  return "?";
}

const char* to_string(Group g) {
  return g == Group::Ulcerated ? "ulcerated" : "non_ulcerated";
}

const char* to_string(Metric m) {
  switch (m) {
    case Metric::TotalGx: return "total_gx";
    case Metric::TotalGy: return "total_gy";
    case Metric::TotalGr: return "total_gr";
  }
  return "?";
}

const char* to_string(RegionLabel l) {
  switch (l) {
    case RegionLabel::NoData:   return "no_data";
    case RegionLabel::Standoff: return "standoff";
    case RegionLabel::SkinGap:  return "skin_gap";
    case RegionLabel::Tissue:   return "tissue";
    case RegionLabel::Bone:     return "bone";
  }
  return "?";
}

const char* to_string(AnteriorAt a) {
  return a == AnteriorAt::ImageLeft ? "image_left" : "image_right";
}

namespace {

std::string lowered(const std::string& text) {
  std::string out = text;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return char(std::tolower(c)); });
  return out;
}

}  // namespace

Site parse_site(const std::string& text) {
  const std::string t = lowered(text);
  for (Site s : kAllSites)
    if (t == to_string(s)) return s;
  fail(Err::InvalidArgument, "unknown site '" + text + "'");
}

Group parse_group(const std::string& text) {
  const std::string t = lowered(text);
  for (Group g : kAllGroups)
    if (t == to_string(g)) return g;
  fail(Err::InvalidArgument, "unknown group '" + text + "'");
}

Metric parse_metric(const std::string& text) {
  const std::string t = lowered(text);
  for (Metric m : kAllMetrics)
    if (t == to_string(m)) return m;
  fail(Err::InvalidArgument, "unknown metric '" + text + "'");
}

AnteriorAt parse_anterior_at(const std::string& text) {
  const std::string t = lowered(text);
  if (t == "image_left") return AnteriorAt::ImageLeft;
  if (t == "image_right") return AnteriorAt::ImageRight;
  fail(Err::InvalidArgument, "anterior_at must be image_left or image_right, got '" + text + "'");
}

ElastogramFrame::ElastogramFrame(Raster<Rgb> pixels, std::optional<Raster<uint8_t>> bmode,
                                 FrameMeta meta)
    : pixels_(std::move(pixels)), bmode_(std::move(bmode)), meta_(std::move(meta)) {
  if (pixels_.width() < kMinFrameDim || pixels_.height() < kMinFrameDim)
    fail(Err::InvalidFrame, "frame must be at least " + std::to_string(kMinFrameDim) + "x" +
                                std::to_string(kMinFrameDim) + ", got " +
                                std::to_string(pixels_.width()) + "x" +
                                std::to_string(pixels_.height()));
  if (bmode_ && !bmode_->same_shape(pixels_))
    fail(Err::InvalidFrame, "b-mode raster shape differs from the RGB frame");
}

QSMap::QSMap(Raster<uint8_t> values, Raster<RegionLabel> labels)
    : values_(std::move(values)), labels_(std::move(labels)) {
  if (!values_.same_shape(labels_))
    fail(Err::InvalidArgument, "QS values and labels must have the same shape");

  for (size_t i = 0; i < values_.size(); ++i) {
    const uint8_t v = values_.data()[i];
    const RegionLabel l = labels_.data()[i];
    if (v > kQsMax)
      fail(Err::InvalidArgument, "QS value " + std::to_string(v) + " above " +
                                     std::to_string(kQsMax));
    if (uint8_t(l) > uint8_t(RegionLabel::Bone))
      fail(Err::InvalidArgument, "bad region label value " + std::to_string(int(uint8_t(l))));
    const bool scored = l == RegionLabel::Standoff || l == RegionLabel::Tissue;
    if (!scored && v != kQsNone)
      fail(Err::InvalidArgument, std::string("nonzero QS on a ") + to_string(l) + " pixel");
  }

  // Column stratification: any standoff strictly above any skin gap, any
  // skin gap strictly above any tissue (bone sits inside tissue, exempt).
  for (int x = 0; x < labels_.width(); ++x) {
    int last_standoff = -1, first_gap = labels_.height(), last_gap = -1;
    int first_tissue = labels_.height();
    for (int y = 0; y < labels_.height(); ++y) {
      switch (labels_.at(x, y)) {
        case RegionLabel::Standoff: last_standoff = y; break;
        case RegionLabel::SkinGap:
          first_gap = std::min(first_gap, y);
          last_gap = y;
          break;
        case RegionLabel::Tissue: first_tissue = std::min(first_tissue, y); break;
        default: break;
      }
    }
    const std::string col = "column " + std::to_string(x);
    if (last_gap >= 0 && last_standoff >= first_gap)
      fail(Err::InvalidArgument, col + ": standoff below skin gap");
    if (first_tissue < labels_.height() && last_gap >= first_tissue)
      fail(Err::InvalidArgument, col + ": skin gap below tissue");
    if (first_tissue < labels_.height() && last_standoff >= first_tissue)
      fail(Err::InvalidArgument, col + ": standoff below tissue");
  }
}

RSMap::RSMap(Raster<double> values, Raster<uint8_t> valid, std::vector<double> column_reference)
    : values_(std::move(values)), valid_(std::move(valid)),
      column_reference_(std::move(column_reference)) {
  if (!values_.same_shape(valid_))
    fail(Err::InvalidArgument, "RS values and valid mask must have the same shape");
  if (int(column_reference_.size()) != values_.width())
    fail(Err::InvalidArgument, "RS column reference count must equal the width");
  for (size_t i = 0; i < values_.size(); ++i) {
    if (!valid_.data()[i]) continue;
    const double v = values_.data()[i];
    if (!std::isfinite(v) || v <= 0.0)
      fail(Err::InvalidArgument, "valid RS values must be finite and positive");
  }
}

RSMap RSMap::from_matrix(const Raster<double>& values) {
  Raster<uint8_t> valid(values.width(), values.height(), 1);
  return RSMap(values, std::move(valid), std::vector<double>(size_t(values.width()), 1.0));
}

int RSMap::valid_count() const {
  int n = 0;
  for (uint8_t v : valid_.data()) n += v ? 1 : 0;
  return n;
}

FrameConventions coordinate_conventions() {
  return FrameConventions{
      .row_zero_at_probe = true,
      .depth_increases_with_y = true,
      .qs_increases_with_softness = true,
      .default_anterior_at = AnteriorAt::ImageLeft,
      .gx_positive_toward_image_right = true,
      .gy_positive_toward_depth = true,
  };
}

double reported_sign_gx(AnteriorAt anterior_at, bool report_as_stiffness) {
  // Raw gx is positive toward image-right.  Reported gx is positive toward
  // posterior; with anterior at image-left those already agree.
  const double axis = anterior_at == AnteriorAt::ImageLeft ? 1.0 : -1.0;
  return report_as_stiffness ? -axis : axis;
}

double reported_sign_gy(bool report_as_stiffness) {
  // Raw gy is positive toward depth (inferior), which is already the
  // reported superior->inferior axis.  Stiffness flips the value scale.
  return report_as_stiffness ? -1.0 : 1.0;
}

}  // namespace elq
