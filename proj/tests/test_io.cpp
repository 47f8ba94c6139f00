#include <doctest.h>

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "elq/config.hpp"
#include "elq/errors.hpp"
#include "elq/ground_truth_io.hpp"
#include "elq/image_io.hpp"
#include "elq/manifest.hpp"
#include "elq/phantom.hpp"
#include "test_support.hpp"

using namespace elq;
using elqtest::TempDir;
using elqtest::thrown_code;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(bool(in));
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void spit(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(bool(out));
  out.write(bytes.data(), std::streamsize(bytes.size()));
}

}  // namespace

// --- ground-truth rasters ----------------------------------------------------

TEST_CASE("gt rasters round-trip both dtypes") {
  TempDir tmp;

  Raster<uint8_t> u8(7, 5);
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 7; ++x) u8.at(x, y) = uint8_t(x * 40 + y);
  write_gt_u8(tmp.file("a.bin"), u8);
  CHECK(read_gt_u8(tmp.file("a.bin")) == u8);

  Raster<float> f32(3, 4);
  float v = -2.5f;
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 3; ++x) f32.at(x, y) = (v += 0.625f);
  write_gt_f32(tmp.file("b.bin"), f32);
  CHECK(read_gt_f32(tmp.file("b.bin")) == f32);
}

TEST_CASE("gt raster bytes match the documented layout") {
  TempDir tmp;
  Raster<uint8_t> r(2, 2);
  r.at(0, 0) = 10; r.at(1, 0) = 20; r.at(0, 1) = 30; r.at(1, 1) = 40;
  write_gt_u8(tmp.file("r.bin"), r);

  const std::string want = {'E', 'Q', 'G', 'T',              // magic
                            1,   1,   0,   0,                // version, uint8 dtype, reserved
                            2,   0,   0,   0,                // width, little endian
                            2,   0,   0,   0,                // height
                            10,  20,  30,  40};              // rows from the top-left
  CHECK(slurp(tmp.file("r.bin")) == want);

  // and a hand-built file reads back
  spit(tmp.file("hand.bin"), want);
  CHECK(read_gt_u8(tmp.file("hand.bin")) == r);
}

TEST_CASE("gt readers reject broken files") {
  TempDir tmp;
  Raster<uint8_t> r(2, 2, 7);
  write_gt_u8(tmp.file("ok.bin"), r);
  const std::string good = slurp(tmp.file("ok.bin"));

  CHECK(thrown_code([&] { read_gt_u8(tmp.file("missing.bin")); }) == Err::IoError);

  std::string bad = good;
  bad[0] = 'X';  // magic
  spit(tmp.file("bad.bin"), bad);
  CHECK(thrown_code([&] { read_gt_u8(tmp.file("bad.bin")); }) == Err::IoError);

  bad = good;
  bad[4] = 2;  // version
  spit(tmp.file("bad.bin"), bad);
  CHECK(thrown_code([&] { read_gt_u8(tmp.file("bad.bin")); }) == Err::IoError);

  // dtype mismatch: a u8 file read as f32
  CHECK(thrown_code([&] { read_gt_f32(tmp.file("ok.bin")); }) == Err::IoError);

  bad = good.substr(0, good.size() - 1);  // short payload
  spit(tmp.file("bad.bin"), bad);
  CHECK(thrown_code([&] { read_gt_u8(tmp.file("bad.bin")); }) == Err::IoError);

  bad = good;
  bad[8] = 0;  bad[9] = 0;  // width 0
  spit(tmp.file("bad.bin"), bad);
  CHECK(thrown_code([&] { read_gt_u8(tmp.file("bad.bin")); }) == Err::IoError);
}

TEST_CASE("region labels map to bytes and back, out-of-range bytes rejected") {
  Raster<RegionLabel> labels(5, 1);
  labels.at(0, 0) = RegionLabel::NoData;
  labels.at(1, 0) = RegionLabel::Standoff;
  labels.at(2, 0) = RegionLabel::SkinGap;
  labels.at(3, 0) = RegionLabel::Tissue;
  labels.at(4, 0) = RegionLabel::Bone;
  const Raster<uint8_t> raw = labels_to_u8(labels);
  for (int x = 0; x < 5; ++x) CHECK(raw.at(x, 0) == x);
  CHECK(labels_from_u8(raw) == labels);

  Raster<uint8_t> junk(1, 1, 5);
  CHECK(thrown_code([&] { labels_from_u8(junk); }) == Err::IoError);
}

TEST_CASE("the ground-truth bundle carries every raster and a manifest") {
  TempDir tmp;
  const PhantomScene scene = elqtest::layered_scene();
  const PhantomFrame r = render(scene);
  const std::string manifest_path = write_ground_truth(tmp.str(), "frame", r.truth, &scene);

  CHECK(read_gt_u8(tmp.file("frame_gt_labels.bin")) == labels_to_u8(r.truth.labels));
  CHECK(read_gt_u8(tmp.file("frame_gt_qs.bin")) == r.truth.qs);
  CHECK(read_gt_f32(tmp.file("frame_gt_strainability.bin")) == r.truth.strainability);
  CHECK(read_gt_f32(tmp.file("frame_gt_rs.bin")) == r.truth.rs);
  CHECK(read_gt_u8(tmp.file("frame_gt_overlay.bin")) == r.truth.overlay_mask);

  const nlohmann::json m = nlohmann::json::parse(slurp(manifest_path));
  CHECK(m.at("format") == "EQGT");
  CHECK(m.at("version") == 1);
  CHECK(m.at("width") == 640);
  CHECK(m.at("height") == 480);
  CHECK(m.at("files").size() == 5);
  CHECK(m.at("label_values").at("tissue") == 3);
  CHECK(m.at("colorbar_roi").at("x") == r.truth.bar_roi.x);
  CHECK(m.at("colorbar_roi").at("height") == r.truth.bar_roi.height);
  CHECK(m.at("colorbar_roi").at("orientation") == "soft_at_top");
  // the scene echo parses back to the same geometry
  const PhantomScene echoed = parse_scene(m.at("scene").get<std::string>());
  CHECK(echoed.standoff_thickness == scene.standoff_thickness);
  CHECK(echoed.tissue_layers.size() == scene.tissue_layers.size());
}

// --- images ------------------------------------------------------------------

TEST_CASE("png round trip preserves every pixel") {
  TempDir tmp;
  Raster<Rgb> img(33, 17);
  uint32_t s = 1;
  for (int y = 0; y < 17; ++y)
    for (int x = 0; x < 33; ++x) {
      s = s * 1664525u + 1013904223u;
      img.at(x, y) = Rgb{uint8_t(s >> 8), uint8_t(s >> 16), uint8_t(s >> 24)};
    }
  write_png(tmp.file("img.png"), img);
  CHECK(read_image(tmp.file("img.png")) == img);

  const Raster<uint8_t> gray = read_image_gray(tmp.file("img.png"));
  for (int y = 0; y < 17; ++y)
    for (int x = 0; x < 33; ++x) CHECK(gray.at(x, y) == rgb_luma(img.at(x, y)));
}

namespace {

// Append a little-endian u32/u16 to a byte string.
void put32(std::string& s, uint32_t v) {
  s += char(v & 0xff); s += char(v >> 8 & 0xff); s += char(v >> 16 & 0xff); s += char(v >> 24);
}
void put16(std::string& s, uint16_t v) { s += char(v & 0xff); s += char(v >> 8); }

std::string bmp_bytes(int w, int h_signed, int bpp, const std::vector<uint8_t>& pixel_data) {
  std::string s = "BM";
  put32(s, uint32_t(54 + pixel_data.size()));  // file size
  put32(s, 0);                                 // reserved
  put32(s, 54);                                // pixel data offset
  put32(s, 40);                                // BITMAPINFOHEADER
  put32(s, uint32_t(w));
  put32(s, uint32_t(h_signed));
  put16(s, 1);                                 // planes
  put16(s, uint16_t(bpp));
  put32(s, 0);                                 // BI_RGB
  put32(s, uint32_t(pixel_data.size()));
  put32(s, 2835); put32(s, 2835);              // 72 dpi
  put32(s, 0); put32(s, 0);                    // palette
  s.append(pixel_data.begin(), pixel_data.end());
  return s;
}

}  // namespace

TEST_CASE("bottom-up 24-bit bmp reads with BGR order and row padding") {
  TempDir tmp;
  // 3x2 image; rows are stored bottom first, 9 pixel bytes padded to 12.
  const std::vector<uint8_t> data = {
      // bottom row: (0,1)=(1,2,3) (1,1)=(4,5,6) (2,1)=(7,8,9), BGR on disk
      3, 2, 1, 6, 5, 4, 9, 8, 7, 0, 0, 0,
      // top row: (0,0)=(10,20,30) ...
      30, 20, 10, 60, 50, 40, 90, 80, 70, 0, 0, 0,
  };
  spit(tmp.file("img.bmp"), bmp_bytes(3, 2, 24, data));

  const Raster<Rgb> img = read_image(tmp.file("img.bmp"));
  REQUIRE(img.width() == 3);
  REQUIRE(img.height() == 2);
  CHECK(img.at(0, 0) == Rgb{10, 20, 30});
  CHECK(img.at(2, 0) == Rgb{70, 80, 90});
  CHECK(img.at(0, 1) == Rgb{1, 2, 3});
  CHECK(img.at(2, 1) == Rgb{7, 8, 9});
}

TEST_CASE("top-down 32-bit bmp reads rows in file order") {
  TempDir tmp;
  const std::vector<uint8_t> data = {
      // top row first (negative height), BGRA
      3, 2, 1, 255, 6, 5, 4, 255,
      13, 12, 11, 0, 16, 15, 14, 0,
  };
  spit(tmp.file("img.bmp"), bmp_bytes(2, -2, 32, data));
  const Raster<Rgb> img = read_image(tmp.file("img.bmp"));
  CHECK(img.at(0, 0) == Rgb{1, 2, 3});
  CHECK(img.at(1, 0) == Rgb{4, 5, 6});
  CHECK(img.at(0, 1) == Rgb{11, 12, 13});
  CHECK(img.at(1, 1) == Rgb{14, 15, 16});
}

TEST_CASE("image reader rejects what it cannot parse") {
  TempDir tmp;
  CHECK(thrown_code([&] { read_image(tmp.file("missing.png")); }) == Err::IoError);

  spit(tmp.file("junk.dat"), "this is not an image at all");
  CHECK(thrown_code([&] { read_image(tmp.file("junk.dat")); }) == Err::IoError);

  // 8-bit BMPs are out of scope
  spit(tmp.file("pal.bmp"), bmp_bytes(2, 2, 8, std::vector<uint8_t>(8, 0)));
  CHECK(thrown_code([&] { read_image(tmp.file("pal.bmp")); }) == Err::IoError);

  // truncated pixel data
  std::string cut = bmp_bytes(3, 2, 24, std::vector<uint8_t>(24, 0));
  cut.resize(cut.size() - 5);
  spit(tmp.file("cut.bmp"), cut);
  CHECK(thrown_code([&] { read_image(tmp.file("cut.bmp")); }) == Err::IoError);

  // PNG signature with garbage behind it
  spit(tmp.file("fake.png"), std::string("\x89PNG\r\n\x1a\n gibberish", 18));
  CHECK(thrown_code([&] { read_image(tmp.file("fake.png")); }) == Err::IoError);
}

// --- run configuration -------------------------------------------------------

TEST_CASE("run config: defaults validate and empty input means defaults") {
  const RunConfig def;
  def.validate();
  CHECK(RunConfig::parse("").to_config_text() == def.to_config_text());
  CHECK(def.colorbar.x == 626);
  CHECK(def.colorbar.height == 200);
  CHECK_FALSE(def.welch);
  CHECK(def.anterior_at == AnteriorAt::ImageLeft);
}

TEST_CASE("run config round-trips every field") {
  RunConfig c;
  c.colorbar = ColorbarROI{.x = 1, .y = 2, .width = 3, .height = 44,
                           .orientation = ColorbarROI::Orientation::StiffAtTop};
  c.max_match_distance = 31.5;
  c.segmentation.saturation_threshold = 31;
  c.segmentation.residual_threshold = 17;
  c.segmentation.gap_min = 5;
  c.segmentation.min_valid_column_fraction = 0.25;
  c.segmentation.bone_depth_fraction = 0.75;
  c.segmentation.bone_qs_percentile = 12.5;
  c.segmentation.bone_min_area = 40;
  c.quantify.ref_min_pixels = 7;
  c.quantify.ref_floor = 9.5;
  c.gradients.spacing_x = 0.125;
  c.gradients.spacing_y = 2.5;
  c.gradients.agg_min_count = 9;
  c.welch = true;
  c.report_as_stiffness = true;
  c.anterior_at = AnteriorAt::ImageRight;
  c.write_heatmaps = false;
  c.workers = 3;
  c.output_dir = "some dir/with spaces";

  const RunConfig back = RunConfig::parse(c.to_config_text());
  CHECK(back.to_config_text() == c.to_config_text());
  CHECK(back.colorbar.orientation == ColorbarROI::Orientation::StiffAtTop);
  CHECK(back.segmentation.min_valid_column_fraction == 0.25);
  CHECK(back.gradients.spacing_x == 0.125);
  CHECK(back.welch);
  CHECK(back.anterior_at == AnteriorAt::ImageRight);
  CHECK(back.output_dir == "some dir/with spaces");

  TempDir tmp;
  c.save(tmp.file("run.cfg"));
  CHECK(RunConfig::load(tmp.file("run.cfg")).to_config_text() == c.to_config_text());
}

TEST_CASE("run config rejects unknown keys, bad values and bad syntax") {
  CHECK(thrown_code([] { RunConfig::parse("stats.welsh = true\n"); }) == Err::ConfigError);
  CHECK(thrown_code([] { RunConfig::parse("run.workers = 2\nrun.workers = 3\n"); }) ==
        Err::ConfigError);
  CHECK(thrown_code([] { RunConfig::parse("run.workers = many\n"); }) == Err::ConfigError);
  CHECK(thrown_code([] { RunConfig::parse("stats.welch = maybe\n"); }) == Err::ConfigError);
  CHECK(thrown_code([] { RunConfig::parse("gradients.spacing_x = fast\n"); }) == Err::ConfigError);
  CHECK(thrown_code([] { RunConfig::parse("just some words\n"); }) == Err::ConfigError);
  CHECK(thrown_code([] { RunConfig::parse("= 3\n"); }) == Err::ConfigError);

  // in-range syntax, out-of-range meaning
  CHECK(thrown_code([] { RunConfig::parse("segmentation.gap_min = 0\n"); }) == Err::ConfigError);
  CHECK(thrown_code([] { RunConfig::parse("segmentation.saturation_threshold = 300\n"); }) ==
        Err::ConfigError);
  CHECK(thrown_code([] { RunConfig::parse("segmentation.bone_depth_fraction = 1.0\n"); }) ==
        Err::ConfigError);
  CHECK(thrown_code([] { RunConfig::parse("segmentation.min_valid_column_fraction = 0\n"); }) ==
        Err::ConfigError);
  CHECK(thrown_code([] { RunConfig::parse("colorbar.width = -1\n"); }) == Err::ConfigError);
  CHECK(thrown_code([] { RunConfig::parse("gradients.agg_min_count = 0\n"); }) == Err::ConfigError);
  CHECK(thrown_code([] { RunConfig::parse("colorbar.orientation = sideways\n"); }) ==
        Err::ConfigError);
  CHECK(thrown_code([] { RunConfig::parse("frame.anterior_at = north\n"); }) == Err::ConfigError);
  CHECK(thrown_code([] { RunConfig::parse("run.workers = -1\n"); }) == Err::ConfigError);
  CHECK(thrown_code([] { RunConfig::parse("output.dir =\n"); }) == Err::ConfigError);
}

TEST_CASE("config text tolerates comments and loose whitespace") {
  const RunConfig c = RunConfig::parse(
      "# a comment line\n"
      "\n"
      "   run.workers =   4   # trailing comment\n"
      "\tstats.welch\t=\ttrue\n");
  CHECK(c.workers == 4);
  CHECK(c.welch);
}

// --- cohort manifests ----------------------------------------------------------

TEST_CASE("manifest parses comma files with shuffled, case-loose headers") {
  const CohortManifest m = CohortManifest::parse(
      "frame_path,Subject_ID,FRAME_INDEX,group,site\n"
      "a.png,s1,0,ulcerated,left_heel\n"
      "\"with,comma \"\"x\"\".png\",s1,1,non_ulcerated,right_forefoot\n"
      "\n"
      "b.png,s2,0,ulcerated,left_heel\n");
  REQUIRE(m.rows.size() == 3);
  CHECK(m.rows[0].subject_id == "s1");
  CHECK(m.rows[0].group == Group::Ulcerated);
  CHECK(m.rows[0].site == Site::LeftHeel);
  CHECK(m.rows[0].frame_path == "a.png");
  CHECK(m.rows[0].frame_index == 0);
  CHECK(m.rows[1].frame_path == "with,comma \"x\".png");
  CHECK(m.rows[1].group == Group::NonUlcerated);
  CHECK(m.rows[2].subject_id == "s2");
}

TEST_CASE("manifest sniffs tab delimiters from the header") {
  const CohortManifest m = CohortManifest::parse(
      "subject_id\tgroup\tsite\tframe_path\tframe_index\n"
      "s1\tulcerated\tright_heel\tframes/a.png\t2\n");
  REQUIRE(m.rows.size() == 1);
  CHECK(m.rows[0].site == Site::RightHeel);
  CHECK(m.rows[0].frame_index == 2);
}

TEST_CASE("manifest rejects structural problems") {
  auto code = [](const std::string& text) {
    return thrown_code([&] { CohortManifest::parse(text); });
  };
  const std::string header = "subject_id,group,site,frame_path,frame_index\n";

  CHECK(code("") == Err::ManifestError);  // empty
  CHECK(code("subject_id,group,site,frame_path\n") == Err::ManifestError);        // missing column
  CHECK(code("subject_id,group,site,frame_path,frame_index,extra\n") ==
        Err::ManifestError);                                                      // unknown column
  CHECK(code("subject_id,group,group,frame_path,frame_index\n") ==
        Err::ManifestError);                                                      // duplicate column
  CHECK(code(header + "s1,ulcerated,left_heel,a.png\n") == Err::ManifestError);   // short row
  CHECK(code(header + "s1,sick,left_heel,a.png,0\n") == Err::ManifestError);      // bad group
  CHECK(code(header + "s1,ulcerated,left_hip,a.png,0\n") == Err::ManifestError);  // bad site
  CHECK(code(header + "s1,ulcerated,left_heel,a.png,first\n") == Err::ManifestError);
  CHECK(code(header + "s1,ulcerated,left_heel,a.png,-1\n") == Err::ManifestError);
  CHECK(code(header + ",ulcerated,left_heel,a.png,0\n") == Err::ManifestError);   // empty subject
  CHECK(code(header + "s1,ulcerated,left_heel,,0\n") == Err::ManifestError);      // empty path
  CHECK(code(header + "s1,ulcerated,left_heel,\"a.png,0\n") == Err::ManifestError);  // open quote
  CHECK(code(header + "s1,ulcerated,left_heel,a.png,0\ns1,non_ulcerated,left_heel,b.png,0\n") ==
        Err::ManifestError);  // duplicate (subject, site, index)

  // same subject and index at another site is fine
  CHECK(CohortManifest::parse(header + "s1,ulcerated,left_heel,a.png,0\n"
                                       "s1,ulcerated,right_heel,b.png,0\n")
            .rows.size() == 2);

  CHECK(thrown_code([] { CohortManifest::load("/no/such/manifest.csv"); }) == Err::IoError);
}

TEST_CASE("manifest save/load round-trips awkward paths") {
  TempDir tmp;
  CohortManifest m;
  m.rows.push_back(ManifestRow{"s 1", Group::Ulcerated, Site::LeftForefoot, "dir/plain.png", 0});
  m.rows.push_back(
      ManifestRow{"s,2", Group::NonUlcerated, Site::RightHeel, "odd, \"quoted\".png", 3});
  m.save(tmp.file("m.csv"));

  const CohortManifest back = CohortManifest::load(tmp.file("m.csv"));
  REQUIRE(back.rows.size() == 2);
  CHECK(back.rows[0].subject_id == "s 1");
  CHECK(back.rows[0].frame_path == "dir/plain.png");
  CHECK(back.rows[1].subject_id == "s,2");
  CHECK(back.rows[1].frame_path == "odd, \"quoted\".png");
  CHECK(back.rows[1].group == Group::NonUlcerated);
  CHECK(back.rows[1].site == Site::RightHeel);
  CHECK(back.rows[1].frame_index == 3);
}
