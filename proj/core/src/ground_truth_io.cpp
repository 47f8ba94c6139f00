#include "elq/ground_truth_io.hpp"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

namespace elq {

namespace {

static_assert(std::endian::native == std::endian::little,
              "ground-truth serialization assumes a little-endian host");
static_assert(sizeof(float) == 4);

constexpr char kMagic[4] = {'E', 'Q', 'G', 'T'};
constexpr uint8_t kVersion = 1;
constexpr uint8_t kDtypeU8 = 1;
constexpr uint8_t kDtypeF32 = 2;

void write_header(std::ofstream& out, uint8_t dtype, uint32_t w, uint32_t h) {
  out.write(kMagic, 4);
  const uint8_t meta[4] = {kVersion, dtype, 0, 0};
  out.write(reinterpret_cast<const char*>(meta), 4);
  out.write(reinterpret_cast<const char*>(&w), 4);
  out.write(reinterpret_cast<const char*>(&h), 4);
}

std::pair<uint32_t, uint32_t> read_header(std::ifstream& in, const std::string& path,
                                          uint8_t want_dtype) {
  char magic[4];
  uint8_t meta[4];
  uint32_t w = 0, h = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(meta), 4);
  in.read(reinterpret_cast<char*>(&w), 4);
  in.read(reinterpret_cast<char*>(&h), 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    fail(Err::IoError, "'" + path + "' is not a ground-truth raster");
  if (meta[0] != kVersion)
    fail(Err::IoError, "'" + path + "': unsupported version " + std::to_string(meta[0]));
  if (meta[1] != want_dtype)
    fail(Err::IoError, "'" + path + "': dtype " + std::to_string(meta[1]) + ", expected " +
                           std::to_string(want_dtype));
  if (w == 0 || h == 0 || w > (1u << 20) || h > (1u << 20))
    fail(Err::IoError, "'" + path + "': implausible dimensions");
  return {w, h};
}

template <typename T>
void write_raster(const std::string& path, const Raster<T>& raster, uint8_t dtype) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Err::IoError, "cannot write '" + path + "'");
  write_header(out, dtype, uint32_t(raster.width()), uint32_t(raster.height()));
  out.write(reinterpret_cast<const char*>(raster.data().data()),
            std::streamsize(raster.size() * sizeof(T)));
  if (!out) fail(Err::IoError, "short write on '" + path + "'");
}

template <typename T>
Raster<T> read_raster(const std::string& path, uint8_t dtype) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Err::IoError, "cannot open '" + path + "'");
  const auto [w, h] = read_header(in, path, dtype);
  Raster<T> raster{int(w), int(h)};
  in.read(reinterpret_cast<char*>(raster.data().data()),
          std::streamsize(raster.size() * sizeof(T)));
  if (!in) fail(Err::IoError, "short read on '" + path + "'");
  return raster;
}

}  // namespace

void write_gt_u8(const std::string& path, const Raster<uint8_t>& raster) {
  write_raster(path, raster, kDtypeU8);
}
void write_gt_f32(const std::string& path, const Raster<float>& raster) {
  write_raster(path, raster, kDtypeF32);
}
Raster<uint8_t> read_gt_u8(const std::string& path) { return read_raster<uint8_t>(path, kDtypeU8); }
Raster<float> read_gt_f32(const std::string& path) { return read_raster<float>(path, kDtypeF32); }

Raster<uint8_t> labels_to_u8(const Raster<RegionLabel>& labels) {
  Raster<uint8_t> out(labels.width(), labels.height());
  for (size_t i = 0; i < labels.size(); ++i) out.data()[i] = uint8_t(labels.data()[i]);
  return out;
}

Raster<RegionLabel> labels_from_u8(const Raster<uint8_t>& raw) {
  Raster<RegionLabel> out(raw.width(), raw.height());
  for (size_t i = 0; i < raw.size(); ++i) {
    if (raw.data()[i] > uint8_t(RegionLabel::Bone))
      fail(Err::IoError, "label value " + std::to_string(raw.data()[i]) + " out of range");
    out.data()[i] = RegionLabel(raw.data()[i]);
  }
  return out;
}

std::string write_ground_truth(const std::string& dir, const std::string& stem,
                               const GroundTruth& truth, const PhantomScene* scene) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto path = [&](const char* suffix) { return (fs::path(dir) / (stem + suffix)).string(); };

  write_gt_u8(path("_gt_labels.bin"), labels_to_u8(truth.labels));
  write_gt_u8(path("_gt_qs.bin"), truth.qs);
  write_gt_f32(path("_gt_strainability.bin"), truth.strainability);
  write_gt_f32(path("_gt_rs.bin"), truth.rs);
  write_gt_u8(path("_gt_overlay.bin"), truth.overlay_mask);

  nlohmann::ordered_json m;
  m["format"] = "EQGT";
  m["version"] = 1;
  m["width"] = truth.labels.width();
  m["height"] = truth.labels.height();
  m["files"] = {
      {{"name", stem + "_gt_labels.bin"}, {"dtype", "uint8"}, {"field", "region_labels"}},
      {{"name", stem + "_gt_qs.bin"}, {"dtype", "uint8"}, {"field", "qs"}},
      {{"name", stem + "_gt_strainability.bin"}, {"dtype", "float32"}, {"field", "strainability"}},
      {{"name", stem + "_gt_rs.bin"}, {"dtype", "float32"}, {"field", "rs"}},
      {{"name", stem + "_gt_overlay.bin"}, {"dtype", "uint8"}, {"field", "overlay_mask"}},
  };
  m["label_values"] = {{"no_data", 0}, {"standoff", 1}, {"skin_gap", 2}, {"tissue", 3},
                       {"bone", 4}};
  m["colorbar_roi"] = {{"x", truth.bar_roi.x},
                       {"y", truth.bar_roi.y},
                       {"width", truth.bar_roi.width},
                       {"height", truth.bar_roi.height},
                       {"orientation", to_string(truth.bar_roi.orientation)}};
  if (scene) m["scene"] = scene_to_config(*scene);

  const std::string manifest_path = path("_gt_manifest.json");
  std::ofstream out(manifest_path, std::ios::binary);
  if (!out) fail(Err::IoError, "cannot write '" + manifest_path + "'");
  out << m.dump(2) << "\n";
  return manifest_path;
}

}  // namespace elq
