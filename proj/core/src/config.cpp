#include "elq/config.hpp"

#include <cerrno>
#include <climits>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace elq {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Err::IoError, "cannot open '" + path + "'");
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

KeyValueFile KeyValueFile::parse(const std::string& text, const std::string& origin) {
  KeyValueFile kv;
  kv.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      fail(Err::ConfigError, origin + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      fail(Err::ConfigError, origin + ":" + std::to_string(lineno) + ": empty key");
    if (kv.values_.count(key))
      fail(Err::ConfigError, origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
    kv.values_[key] = value;
  }
  return kv;
}

KeyValueFile KeyValueFile::parse_file(const std::string& path) {
  return parse(read_text_file(path), path);
}

bool KeyValueFile::has(const std::string& key) const { return values_.count(key) > 0; }

std::string KeyValueFile::get_string(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  consumed_.insert(key);
  return it->second;
}

int KeyValueFile::get_int(const std::string& key, int fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  consumed_.insert(key);
  errno = 0;
  char* end = nullptr;
  const long v = std::strtol(it->second.c_str(), &end, 10);
  if (errno != 0 || end == it->second.c_str() || *end != '\0' || v < INT_MIN || v > INT_MAX)
    fail(Err::ConfigError, origin_ + ": key '" + key + "' wants an integer, got '" + it->second + "'");
  return int(v);
}

uint64_t KeyValueFile::get_u64(const std::string& key, uint64_t fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  consumed_.insert(key);
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(it->second.c_str(), &end, 10);
  if (errno != 0 || end == it->second.c_str() || *end != '\0')
    fail(Err::ConfigError,
         origin_ + ": key '" + key + "' wants a non-negative integer, got '" + it->second + "'");
  return uint64_t(v);
}

double KeyValueFile::get_double(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  consumed_.insert(key);
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(it->second.c_str(), &end);
  if (errno != 0 || end == it->second.c_str() || *end != '\0')
    fail(Err::ConfigError, origin_ + ": key '" + key + "' wants a number, got '" + it->second + "'");
  return v;
}

bool KeyValueFile::get_bool(const std::string& key, bool fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  consumed_.insert(key);
  const std::string& v = it->second;
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  fail(Err::ConfigError, origin_ + ": key '" + key + "' wants true/false, got '" + v + "'");
}

void KeyValueFile::finish() const {
  std::string unknown;
  for (const auto& [key, value] : values_)
    if (!consumed_.count(key)) unknown += (unknown.empty() ? "" : ", ") + key;
  if (!unknown.empty())
    fail(Err::ConfigError, origin_ + ": unknown keys: " + unknown);
}

void RunConfig::validate() const {
  auto bad = [](const std::string& what) { fail(Err::ConfigError, what); };
  if (colorbar.width <= 0 || colorbar.height <= 0) bad("colorbar ROI must have positive size");
  if (colorbar.x < 0 || colorbar.y < 0) bad("colorbar ROI origin must be non-negative");
  if (max_match_distance < 0.0) bad("calibration.max_match_distance must be non-negative");
  if (segmentation.saturation_threshold < 0 || segmentation.saturation_threshold > 255)
    bad("segmentation.saturation_threshold must be in [0,255]");
  if (segmentation.residual_threshold < 0 || segmentation.residual_threshold > 255)
    bad("segmentation.residual_threshold must be in [0,255]");
  if (segmentation.gap_min < 1) bad("segmentation.gap_min must be at least 1");
  if (segmentation.min_valid_column_fraction <= 0.0 ||
      segmentation.min_valid_column_fraction > 1.0)
    bad("segmentation.min_valid_column_fraction must be in (0,1]");
  if (segmentation.bone_depth_fraction < 0.0 || segmentation.bone_depth_fraction >= 1.0)
    bad("segmentation.bone_depth_fraction must be in [0,1)");
  if (segmentation.bone_qs_percentile <= 0.0 || segmentation.bone_qs_percentile >= 100.0)
    bad("segmentation.bone_qs_percentile must be in (0,100)");
  if (segmentation.bone_min_area < 1) bad("segmentation.bone_min_area must be at least 1");
  if (quantify.ref_min_pixels < 1) bad("quantify.ref_min_pixels must be at least 1");
  if (quantify.ref_floor < 0.0) bad("quantify.ref_floor must be non-negative");
  if (gradients.spacing_x <= 0.0 || gradients.spacing_y <= 0.0)
    bad("gradient spacings must be positive");
  if (gradients.agg_min_count < 1) bad("gradients.agg_min_count must be at least 1");
  if (workers < 0) bad("run.workers must be non-negative");
  if (output_dir.empty()) bad("output.dir must not be empty");
}

namespace {

// Enum parsers raise InvalidArgument; inside a config file that is the file's
// fault, so re-badge the message under the offending key.
template <typename Parse>
auto config_enum(const KeyValueFile& kv, const std::string& key, const char* fallback,
                 Parse parse) {
  const std::string text = kv.get_string(key, fallback);
  try {
    return parse(text);
  } catch (const Error& e) {
    fail(Err::ConfigError, kv.origin() + ": " + key + ": " + e.what());
  }
}

}  // namespace

RunConfig RunConfig::parse(const std::string& text, const std::string& origin) {
  const KeyValueFile kv = KeyValueFile::parse(text, origin);
  RunConfig c;
  c.colorbar.x = kv.get_int("colorbar.x", c.colorbar.x);
  c.colorbar.y = kv.get_int("colorbar.y", c.colorbar.y);
  c.colorbar.width = kv.get_int("colorbar.width", c.colorbar.width);
  c.colorbar.height = kv.get_int("colorbar.height", c.colorbar.height);
  c.colorbar.orientation = config_enum(kv, "colorbar.orientation",
                                       to_string(c.colorbar.orientation), parse_orientation);
  c.max_match_distance = kv.get_double("calibration.max_match_distance", c.max_match_distance);

  SegmentationParams& s = c.segmentation;
  s.saturation_threshold = kv.get_int("segmentation.saturation_threshold", s.saturation_threshold);
  s.residual_threshold = kv.get_int("segmentation.residual_threshold", s.residual_threshold);
  s.gap_min = kv.get_int("segmentation.gap_min", s.gap_min);
  s.min_valid_column_fraction =
      kv.get_double("segmentation.min_valid_column_fraction", s.min_valid_column_fraction);
  s.bone_depth_fraction = kv.get_double("segmentation.bone_depth_fraction", s.bone_depth_fraction);
  s.bone_qs_percentile = kv.get_double("segmentation.bone_qs_percentile", s.bone_qs_percentile);
  s.bone_min_area = kv.get_int("segmentation.bone_min_area", s.bone_min_area);

  c.quantify.ref_min_pixels = kv.get_int("quantify.ref_min_pixels", c.quantify.ref_min_pixels);
  c.quantify.ref_floor = kv.get_double("quantify.ref_floor", c.quantify.ref_floor);

  c.gradients.spacing_x = kv.get_double("gradients.spacing_x", c.gradients.spacing_x);
  c.gradients.spacing_y = kv.get_double("gradients.spacing_y", c.gradients.spacing_y);
  c.gradients.agg_min_count = kv.get_int("gradients.agg_min_count", c.gradients.agg_min_count);

  c.welch = kv.get_bool("stats.welch", c.welch);
  c.report_as_stiffness = kv.get_bool("stats.report_as_stiffness", c.report_as_stiffness);
  c.anterior_at =
      config_enum(kv, "frame.anterior_at", to_string(c.anterior_at), parse_anterior_at);

  c.write_heatmaps = kv.get_bool("output.heatmaps", c.write_heatmaps);
  c.output_dir = kv.get_string("output.dir", c.output_dir);
  c.workers = kv.get_int("run.workers", c.workers);

  kv.finish();
  c.validate();
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  return parse(read_text_file(path), path);
}

std::string RunConfig::to_config_text() const {
  char buf[256];
  std::string out;
  out += "# analysis run configuration\n";
  out += "# color bar location in the frame (pixels) and orientation\n";
  std::snprintf(buf, sizeof buf, "colorbar.x = %d\n", colorbar.x); out += buf;
  std::snprintf(buf, sizeof buf, "colorbar.y = %d\n", colorbar.y); out += buf;
  std::snprintf(buf, sizeof buf, "colorbar.width = %d\n", colorbar.width); out += buf;
  std::snprintf(buf, sizeof buf, "colorbar.height = %d\n", colorbar.height); out += buf;
  std::snprintf(buf, sizeof buf, "colorbar.orientation = %s\n", to_string(colorbar.orientation));
  out += buf;
  std::snprintf(buf, sizeof buf, "calibration.max_match_distance = %.17g\n", max_match_distance);
  out += buf;
  out += "# overlay detection and region extraction\n";
  std::snprintf(buf, sizeof buf, "segmentation.saturation_threshold = %d\n",
                segmentation.saturation_threshold); out += buf;
  std::snprintf(buf, sizeof buf, "segmentation.residual_threshold = %d\n",
                segmentation.residual_threshold); out += buf;
  std::snprintf(buf, sizeof buf, "segmentation.gap_min = %d\n", segmentation.gap_min); out += buf;
  std::snprintf(buf, sizeof buf, "segmentation.min_valid_column_fraction = %.17g\n",
                segmentation.min_valid_column_fraction); out += buf;
  std::snprintf(buf, sizeof buf, "segmentation.bone_depth_fraction = %.17g\n",
                segmentation.bone_depth_fraction); out += buf;
  std::snprintf(buf, sizeof buf, "segmentation.bone_qs_percentile = %.17g\n",
                segmentation.bone_qs_percentile); out += buf;
  std::snprintf(buf, sizeof buf, "segmentation.bone_min_area = %d\n", segmentation.bone_min_area);
  out += buf;
  out += "# column normalization guards\n";
  std::snprintf(buf, sizeof buf, "quantify.ref_min_pixels = %d\n", quantify.ref_min_pixels);
  out += buf;
  std::snprintf(buf, sizeof buf, "quantify.ref_floor = %.17g\n", quantify.ref_floor); out += buf;
  out += "# gradient evaluation\n";
  std::snprintf(buf, sizeof buf, "gradients.spacing_x = %.17g\n", gradients.spacing_x); out += buf;
  std::snprintf(buf, sizeof buf, "gradients.spacing_y = %.17g\n", gradients.spacing_y); out += buf;
  std::snprintf(buf, sizeof buf, "gradients.agg_min_count = %d\n", gradients.agg_min_count);
  out += buf;
  out += "# group statistics and reporting conventions\n";
  std::snprintf(buf, sizeof buf, "stats.welch = %s\n", welch ? "true" : "false"); out += buf;
  std::snprintf(buf, sizeof buf, "stats.report_as_stiffness = %s\n",
                report_as_stiffness ? "true" : "false"); out += buf;
  std::snprintf(buf, sizeof buf, "frame.anterior_at = %s\n", to_string(anterior_at)); out += buf;
  out += "# outputs\n";
  std::snprintf(buf, sizeof buf, "output.dir = %s\n", output_dir.c_str()); out += buf;
  std::snprintf(buf, sizeof buf, "output.heatmaps = %s\n", write_heatmaps ? "true" : "false");
  out += buf;
  std::snprintf(buf, sizeof buf, "run.workers = %d\n", workers); out += buf;
  return out;
}

void RunConfig::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Err::IoError, "cannot write '" + path + "'");
  out << to_config_text();
}

}  // namespace elq
