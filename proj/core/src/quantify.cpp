#include "elq/quantify.hpp"

namespace elq {

QSMap compute_qs(const ElastogramFrame& frame, const Raster<RegionLabel>& labels,
                 const ColorScale& scale) {
  const Raster<Rgb>& px = frame.pixels();
  if (!px.same_shape(labels))
    fail(Err::InvalidArgument, "label raster shape differs from the frame");

  Raster<uint8_t> values(px.width(), px.height(), uint8_t(kQsNone));
  for (int y = 0; y < px.height(); ++y)
    for (int x = 0; x < px.width(); ++x) {
      const RegionLabel l = labels.at(x, y);
      if (l == RegionLabel::Standoff || l == RegionLabel::Tissue)
        values.at(x, y) = uint8_t(scale.invert(px.at(x, y)));
    }
  return QSMap(std::move(values), labels);
}

std::vector<double> column_reference(const QSMap& qs, const QuantifyParams& params) {
  if (params.ref_min_pixels < 1)
    fail(Err::InvalidArgument, "ref_min_pixels must be at least 1");
  if (params.ref_floor < 0.0)
    fail(Err::InvalidArgument, "ref_floor must be non-negative");

  const int w = qs.width(), h = qs.height();
  std::vector<double> reference(size_t(w), 0.0);
  bool any = false;
  for (int x = 0; x < w; ++x) {
    double sum = 0.0;
    int n = 0;
    for (int y = 0; y < h; ++y)
      if (qs.labels().at(x, y) == RegionLabel::Standoff && qs.values().at(x, y) > kQsNone) {
        sum += qs.values().at(x, y);
        ++n;
      }
    if (n < params.ref_min_pixels) continue;
    const double mean = sum / double(n);
    if (mean < params.ref_floor) continue;
    reference[size_t(x)] = mean;
    any = true;
  }
  if (!any)
    fail(Err::NoStandoffFound, "no column has a usable standoff reference");
  return reference;
}

RSMap compute_rs(const QSMap& qs, const std::vector<double>& reference) {
  const int w = qs.width(), h = qs.height();
  if (int(reference.size()) != w)
    fail(Err::InvalidArgument, "reference vector length must equal the QS map width");

  Raster<double> values(w, h, 0.0);
  Raster<uint8_t> valid(w, h, 0);
  for (int x = 0; x < w; ++x) {
    const double ref = reference[size_t(x)];
    if (ref <= 0.0) continue;
    for (int y = 0; y < h; ++y) {
      if (qs.labels().at(x, y) != RegionLabel::Tissue) continue;
      const uint8_t v = qs.values().at(x, y);
      if (v == kQsNone) continue;
      values.at(x, y) = double(v) / ref;
      valid.at(x, y) = 1;
    }
  }
  return RSMap(std::move(values), std::move(valid), reference);
}

}  // namespace elq
