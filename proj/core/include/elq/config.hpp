#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "elq/color_scale.hpp"
#include "elq/gradients.hpp"
#include "elq/quantify.hpp"
#include "elq/segmentation.hpp"
#include "elq/types.hpp"

namespace elq {

// Plain "key = value" files: one pair per line, '#' starts a comment, blank
// lines ignored.  Reads are tracked so that finish() can reject any key the
// caller never asked about — typos in a config are errors, not silence.
class KeyValueFile {
 public:
  static KeyValueFile parse(const std::string& text, const std::string& origin = "<string>");
  static KeyValueFile parse_file(const std::string& path);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  int get_int(const std::string& key, int fallback) const;
  uint64_t get_u64(const std::string& key, uint64_t fallback) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  // Throws ConfigError naming every key that was present but never consumed.
  void finish() const;
  const std::string& origin() const { return origin_; }

 private:
  std::string origin_;
  std::map<std::string, std::string> values_;
  mutable std::set<std::string> consumed_;
};

// Everything a run needs beyond the inputs themselves.  Every key has a
// documented default; an echo of the effective config is written next to
// every output so a run can be reproduced from its artifacts alone.
struct RunConfig {
  ColorbarROI colorbar{.x = 626, .y = 4, .width = 10, .height = 200};  // matches 640x480 phantoms
  double max_match_distance = kDefaultMaxMatchDistance;
  SegmentationParams segmentation;
  QuantifyParams quantify;
  GradientParams gradients;
  bool welch = false;
  bool report_as_stiffness = false;
  AnteriorAt anterior_at = AnteriorAt::ImageLeft;
  bool write_heatmaps = true;
  int workers = 0;  // 0 = one per hardware thread
  std::string output_dir = "elq_out";

  void validate() const;  // throws ConfigError on out-of-range values

  static RunConfig load(const std::string& path);
  static RunConfig parse(const std::string& text, const std::string& origin = "<string>");
  std::string to_config_text() const;  // load(to_config_text()) round-trips
  void save(const std::string& path) const;
};

}  // namespace elq
