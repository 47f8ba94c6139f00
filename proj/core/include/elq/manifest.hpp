#pragma once

#include <string>
#include <vector>

#include "elq/types.hpp"

namespace elq {

struct ManifestRow {
  std::string subject_id;
  Group group = Group::NonUlcerated;
  Site site = Site::LeftForefoot;
  std::string frame_path;
  int frame_index = 0;
};

// Cohort listing: delimited text with a header row naming exactly
// subject_id, group, site, frame_path, frame_index (any order).  The
// delimiter is sniffed from the header: tab wins if present, else comma.
// Fields may be double-quoted ("" escapes a quote inside).  Duplicate
// (subject_id, site, frame_index) triples are rejected.
struct CohortManifest {
  std::vector<ManifestRow> rows;

  static CohortManifest load(const std::string& path);
  static CohortManifest parse(const std::string& text, const std::string& origin = "<string>");
  void save(const std::string& path) const;  // comma-delimited
};

}  // namespace elq
