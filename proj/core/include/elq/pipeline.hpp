#pragma once

#include <optional>
#include <string>
#include <vector>

#include "elq/config.hpp"
#include "elq/gradients.hpp"
#include "elq/manifest.hpp"
#include "elq/quantify.hpp"
#include "elq/segmentation.hpp"
#include "elq/stats.hpp"
#include "elq/types.hpp"

namespace elq {

// Everything one frame produces.  reported_* carry the sign conventions
// (anterior_at, report_as_stiffness) applied at the reporting boundary; the
// raw field keeps image-axis strainability gradients.
struct FrameResult {
  FrameMeta meta;
  QSMap qs;
  RSMap rs;
  GradientField gradients;
  int n_valid_pixels = 0;
  int column_exclusion_count = 0;  // columns with tissue but no usable reference
  double reported_gx = kUndefined;
  double reported_gy = kUndefined;
  double reported_gr = kUndefined;
};

// Calibration -> suppression -> skin line -> region split -> QS -> bone
// removal -> column reference -> RS -> gradients -> aggregates.  Pass a
// cached scale to skip re-reading the bar (cohorts share one machine setup).
FrameResult analyze_frame(const ElastogramFrame& frame, const RunConfig& config,
                          const ColorScale* cached_scale = nullptr);

// Mean number of standoff rows over the columns that have any; how compressed
// the gel pad is.  Throws SegmentationFailed when no column has standoff.
double mean_standoff_thickness(const Raster<RegionLabel>& labels);

// Rank frames of one video by compression (thinnest mean standoff) and pick
// k, spreading ties across the sequence.  Frames whose segmentation fails are
// excluded from ranking (throws SegmentationFailed only if that leaves fewer
// than k).  Returns ascending indices.  Advisory: a manifest's explicit
// frame list always wins over this suggestion.
std::vector<int> suggest_frames(const std::vector<ElastogramFrame>& sequence, int k,
                                const RunConfig& config);

// One manifest row after analysis (or failure).
struct FrameOutcome {
  ManifestRow row;
  bool ok = false;
  std::string error;  // error code name when !ok
  double reported_gx = kUndefined, reported_gy = kUndefined, reported_gr = kUndefined;
  int n_valid_pixels = 0;
  int column_exclusion_count = 0;
};

struct CohortReport {
  std::vector<FrameOutcome> frames;              // manifest order
  std::vector<GroupComparison> comparisons;
  std::vector<std::string> warnings;
  int n_ok = 0, n_failed = 0;
};

// Analyze every manifest row (in parallel) and run the per-site group
// comparisons on the frames that survived.  Throws EmptyManifest /
// AllFramesFailed; individual frame failures only mark their row.
CohortReport run_cohort(const CohortManifest& manifest, const RunConfig& config);

// Deterministic text builders (no timestamps, stable number formatting), so
// byte-identical reruns are testable.
std::string frames_csv(const std::vector<FrameOutcome>& frames);
std::string comparisons_csv(const std::vector<GroupComparison>& comparisons);
std::string comparisons_json(const CohortReport& report, const RunConfig& config);
std::string frame_result_csv(const FrameResult& result, const std::string& frame_path);
std::string profiles_csv(const GradientField& field);

// File emission.  write_cohort_outputs writes frames.csv, comparisons.csv,
// comparisons.json, one bar chart per metric, the config echo, and run.log
// (the only artifact with timestamps).  write_frame_outputs writes the
// per-frame CSV row file, profile strips/CSV and (optionally) heatmaps.
void write_cohort_outputs(const CohortReport& report, const RunConfig& config,
                          const std::string& dir);
void write_frame_outputs(const FrameResult& result, const RunConfig& config,
                         const std::string& dir, const std::string& stem,
                         const std::string& frame_path);

// Exit status the CLI maps a run to: 0 all frames analyzed, 2 some frames
// failed (outputs still written), 3 nothing usable / fatal error.
enum class RunStatus : int { Clean = 0, Partial = 2, Fatal = 3 };
RunStatus cohort_status(const CohortReport& report);

}  // namespace elq
