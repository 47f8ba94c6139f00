#include "elq/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <climits>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "elq/image_io.hpp"
#include "elq/plot.hpp"

namespace elq {

namespace {

namespace fs = std::filesystem;

// Stable numeric formatting for all deterministic outputs.
std::string num(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  return out + "\"";
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Err::IoError, "cannot write '" + path + "'");
  out << content;
}

std::string utc_now() {
  char buf[32];
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

FrameResult analyze_frame(const ElastogramFrame& frame, const RunConfig& config,
                          const ColorScale* cached_scale) {
  config.validate();
  const ColorScale scale =
      cached_scale ? *cached_scale
                   : extract_color_scale(frame, config.colorbar, config.max_match_distance);

  const Raster<uint8_t> mask = suppress_bmode(frame, config.segmentation);
  const std::vector<int> skin = find_skin_line(mask, config.segmentation);
  const Raster<RegionLabel> labels = split_standoff_tissue(mask, skin);
  const QSMap scored = compute_qs(frame, labels, scale);
  QSMap qs = remove_bone(scored, config.segmentation);

  const std::vector<double> reference = column_reference(qs, config.quantify);
  RSMap rs = compute_rs(qs, reference);

  GradientField field =
      gradient_field(rs, config.gradients.spacing_x, config.gradients.spacing_y);
  aggregate(field, config.gradients.agg_min_count);

  int excluded = 0;
  for (int x = 0; x < qs.width(); ++x) {
    if (reference[size_t(x)] > 0.0) continue;
    for (int y = 0; y < qs.height(); ++y)
      if (qs.labels().at(x, y) == RegionLabel::Tissue) { ++excluded; break; }
  }

  const double sx = reported_sign_gx(config.anterior_at, config.report_as_stiffness);
  const double sy = reported_sign_gy(config.report_as_stiffness);

  FrameResult result{
      .meta = frame.meta(),
      .qs = std::move(qs),
      .rs = std::move(rs),
      .gradients = std::move(field),
      .n_valid_pixels = 0,
      .column_exclusion_count = excluded,
  };
  result.n_valid_pixels = result.rs.valid_count();
  result.reported_gx =
      std::isnan(result.gradients.total_gx) ? kUndefined : sx * result.gradients.total_gx;
  result.reported_gy =
      std::isnan(result.gradients.total_gy) ? kUndefined : sy * result.gradients.total_gy;
  result.reported_gr = result.gradients.total_gr;
  return result;
}

double mean_standoff_thickness(const Raster<RegionLabel>& labels) {
  long total = 0;
  int columns = 0;
  for (int x = 0; x < labels.width(); ++x) {
    int rows = 0;
    for (int y = 0; y < labels.height(); ++y)
      if (labels.at(x, y) == RegionLabel::Standoff) ++rows;
    if (rows > 0) { total += rows; ++columns; }
  }
  if (columns == 0) fail(Err::SegmentationFailed, "no standoff found in any column");
  return double(total) / double(columns);
}

std::vector<int> suggest_frames(const std::vector<ElastogramFrame>& sequence, int k,
                                const RunConfig& config) {
  if (k < 1) fail(Err::InvalidArgument, "k must be at least 1");
  if (int(sequence.size()) < k)
    fail(Err::InvalidArgument, "sequence has " + std::to_string(sequence.size()) +
                                   " frames, cannot pick " + std::to_string(k));

  struct Ranked { double thickness; int index; };
  std::vector<Ranked> eligible;
  for (int i = 0; i < int(sequence.size()); ++i) {
    try {
      const Raster<uint8_t> mask = suppress_bmode(sequence[size_t(i)], config.segmentation);
      const std::vector<int> skin = find_skin_line(mask, config.segmentation);
      const Raster<RegionLabel> labels = split_standoff_tissue(mask, skin);
      eligible.push_back({mean_standoff_thickness(labels), i});
    } catch (const Error&) {
      // unusable frame: out of the ranking
    }
  }
  if (int(eligible.size()) < k)
    fail(Err::SegmentationFailed, "only " + std::to_string(eligible.size()) + " of " +
                                      std::to_string(sequence.size()) +
                                      " frames segmentable, need " + std::to_string(k));

  std::sort(eligible.begin(), eligible.end(), [](const Ranked& a, const Ranked& b) {
    return a.thickness != b.thickness ? a.thickness < b.thickness : a.index < b.index;
  });

  // Everything strictly below the k-th thickness is in; ties at the boundary
  // are chosen to spread across the sequence (compression cycles repeat, so
  // equal compression at different times is extra information).
  const double boundary = eligible[size_t(k - 1)].thickness;
  std::vector<int> chosen, tied;
  for (const Ranked& r : eligible) {
    if (r.thickness < boundary) chosen.push_back(r.index);
    else if (r.thickness == boundary) tied.push_back(r.index);
  }
  std::sort(tied.begin(), tied.end());
  const int slots = k - int(chosen.size());

  if (slots == int(tied.size())) {
    chosen.insert(chosen.end(), tied.begin(), tied.end());
  } else if (chosen.empty()) {
    // No forced picks: evenly spaced positions over the tied list.
    if (slots == 1) {
      chosen.push_back(tied.front());
    } else {
      for (int i = 0; i < slots; ++i) {
        const size_t pos =
            size_t(std::lround(double(i) * double(tied.size() - 1) / double(slots - 1)));
        chosen.push_back(tied[pos]);
      }
    }
  } else {
    // Greedy farthest-first relative to what is already chosen.
    std::vector<int> pool = tied;
    for (int s = 0; s < slots; ++s) {
      int best_pos = 0;
      long best_dist = -1;
      for (int p = 0; p < int(pool.size()); ++p) {
        long dist = LONG_MAX;
        for (int c : chosen) dist = std::min(dist, std::labs(long(pool[size_t(p)]) - c));
        if (dist > best_dist) { best_dist = dist; best_pos = p; }
      }
      chosen.push_back(pool[size_t(best_pos)]);
      pool.erase(pool.begin() + best_pos);
    }
  }

  std::sort(chosen.begin(), chosen.end());
  chosen.erase(std::unique(chosen.begin(), chosen.end()), chosen.end());
  return chosen;
}

CohortReport run_cohort(const CohortManifest& manifest, const RunConfig& config) {
  config.validate();
  if (manifest.rows.empty()) fail(Err::EmptyManifest, "manifest has no frame rows");

  const size_t n = manifest.rows.size();
  CohortReport report;
  report.frames.resize(n);

  unsigned workers = config.workers > 0 ? unsigned(config.workers)
                                        : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, unsigned(n));

  std::atomic<size_t> cursor{0};
  auto work = [&]() {
    for (size_t i = cursor.fetch_add(1); i < n; i = cursor.fetch_add(1)) {
      const ManifestRow& row = manifest.rows[i];
      FrameOutcome& out = report.frames[i];
      out.row = row;
      try {
        Raster<Rgb> image = read_image(row.frame_path);
        const ElastogramFrame frame(
            std::move(image), std::nullopt,
            FrameMeta{row.subject_id, row.site, row.group, row.frame_index});
        const FrameResult r = analyze_frame(frame, config);
        out.ok = true;
        out.reported_gx = r.reported_gx;
        out.reported_gy = r.reported_gy;
        out.reported_gr = r.reported_gr;
        out.n_valid_pixels = r.n_valid_pixels;
        out.column_exclusion_count = r.column_exclusion_count;
      } catch (const Error& e) {
        out.error = err_name(e.code());
      } catch (const std::exception&) {
        out.error = "InternalError";
      }
    }
  };

  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }

  for (const FrameOutcome& o : report.frames) (o.ok ? report.n_ok : report.n_failed)++;
  if (report.n_ok == 0)
    fail(Err::AllFramesFailed, "all " + std::to_string(n) + " frames failed analysis");

  std::vector<FrameObservation> observations;
  observations.reserve(size_t(report.n_ok));
  for (const FrameOutcome& o : report.frames)
    if (o.ok)
      observations.push_back(FrameObservation{
          FrameMeta{o.row.subject_id, o.row.site, o.row.group, o.row.frame_index},
          o.reported_gx, o.reported_gy, o.reported_gr});
  report.comparisons = cohort_analysis(observations, config.welch, &report.warnings);
  return report;
}

RunStatus cohort_status(const CohortReport& report) {
  return report.n_failed == 0 ? RunStatus::Clean : RunStatus::Partial;
}

// --- deterministic text builders ----------------------------------------------

static const char* kFrameCsvHeader =
    "subject_id,site,group,frame_index,frame_path,status,error,"
    "total_gx,total_gy,total_gr,n_valid_pixels,column_exclusion_count\n";

namespace {

std::string frame_row(const std::string& subject, Site site, Group group, int frame_index,
                      const std::string& path, bool ok, const std::string& error, double gx,
                      double gy, double gr, int n_valid, int excluded) {
  std::string out;
  out += csv_quote(subject);
  out += ',';
  out += to_string(site);
  out += ',';
  out += to_string(group);
  out += ',';
  out += std::to_string(frame_index);
  out += ',';
  out += csv_quote(path);
  out += ',';
  out += ok ? "ok" : "failed";
  out += ',';
  out += error;
  out += ',';
  out += num(gx);
  out += ',';
  out += num(gy);
  out += ',';
  out += num(gr);
  out += ',';
  out += ok ? std::to_string(n_valid) : "";
  out += ',';
  out += ok ? std::to_string(excluded) : "";
  out += '\n';
  return out;
}

}  // namespace

std::string frames_csv(const std::vector<FrameOutcome>& frames) {
  std::string out = kFrameCsvHeader;
  for (const FrameOutcome& f : frames)
    out += frame_row(f.row.subject_id, f.row.site, f.row.group, f.row.frame_index,
                     f.row.frame_path, f.ok, f.error, f.reported_gx, f.reported_gy, f.reported_gr,
                     f.n_valid_pixels, f.column_exclusion_count);
  return out;
}

std::string frame_result_csv(const FrameResult& result, const std::string& frame_path) {
  std::string out = kFrameCsvHeader;
  out += frame_row(result.meta.subject_id, result.meta.site, result.meta.group,
                   result.meta.frame_index, frame_path, true, "", result.reported_gx,
                   result.reported_gy, result.reported_gr, result.n_valid_pixels,
                   result.column_exclusion_count);
  return out;
}

std::string comparisons_csv(const std::vector<GroupComparison>& comparisons) {
  std::string out =
      "site,metric,n_ulcerated,n_non_ulcerated,mean_ulcerated,mean_non_ulcerated,"
      "ci95_ulcerated,ci95_non_ulcerated,t,df,p_two_tailed,eta_squared,significant,"
      "degenerate,error\n";
  for (const GroupComparison& c : comparisons) {
    out += to_string(c.site);
    out += ',';
    out += to_string(c.metric);
    out += ',';
    out += std::to_string(c.n_a);
    out += ',';
    out += std::to_string(c.n_b);
    out += ',';
    out += num(c.mean_a);
    out += ',';
    out += num(c.mean_b);
    out += ',';
    out += num(c.ci95_a);
    out += ',';
    out += num(c.ci95_b);
    out += ',';
    out += num(c.t);
    out += ',';
    out += num(c.df);
    out += ',';
    out += num(c.p_two_tailed);
    out += ',';
    out += num(c.eta_squared);
    out += ',';
    out += c.error.empty() ? (c.p_two_tailed < 0.05 ? "yes" : "no") : "";
    out += ',';
    out += c.degenerate ? "yes" : "no";
    out += ',';
    out += c.error;
    out += '\n';
  }
  return out;
}

std::string comparisons_json(const CohortReport& report, const RunConfig& config) {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["group_a"] = to_string(Group::Ulcerated);
  j["group_b"] = to_string(Group::NonUlcerated);
  j["welch"] = config.welch;
  j["report_as_stiffness"] = config.report_as_stiffness;
  j["anterior_at"] = to_string(config.anterior_at);
  j["frames"] = {{"analyzed", report.n_ok}, {"failed", report.n_failed}};

  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const GroupComparison& c : report.comparisons) {
    nlohmann::ordered_json r;
    r["site"] = to_string(c.site);
    r["metric"] = to_string(c.metric);
    r["n_a"] = c.n_a;
    r["n_b"] = c.n_b;
    if (c.error.empty()) {
      r["mean_a"] = c.mean_a;
      r["mean_b"] = c.mean_b;
      r["ci95_a"] = c.ci95_a;
      r["ci95_b"] = c.ci95_b;
      r["t"] = c.t;
      r["df"] = c.df;
      r["p_two_tailed"] = c.p_two_tailed;
      r["eta_squared"] = c.eta_squared;
      r["significant"] = c.p_two_tailed < 0.05;
      r["degenerate"] = c.degenerate;
    } else {
      r["error"] = c.error;
    }
    rows.push_back(std::move(r));
  }
  j["comparisons"] = std::move(rows);
  j["warnings"] = report.warnings;
  return j.dump(2) + "\n";
}

std::string profiles_csv(const GradientField& field) {
  std::string out = "index,row_mean_gx,col_mean_gy\n";
  const size_t n = std::max(field.row_mean_gx.size(), field.col_mean_gy.size());
  for (size_t i = 0; i < n; ++i) {
    out += std::to_string(i);
    out += ',';
    if (i < field.row_mean_gx.size()) out += num(field.row_mean_gx[i]);
    out += ',';
    if (i < field.col_mean_gy.size()) out += num(field.col_mean_gy[i]);
    out += '\n';
  }
  return out;
}

// --- file emission -------------------------------------------------------------

void write_cohort_outputs(const CohortReport& report, const RunConfig& config,
                          const std::string& dir) {
  fs::create_directories(dir);
  write_text((fs::path(dir) / "frames.csv").string(), frames_csv(report.frames));
  write_text((fs::path(dir) / "comparisons.csv").string(), comparisons_csv(report.comparisons));
  write_text((fs::path(dir) / "comparisons.json").string(), comparisons_json(report, config));
  config.save((fs::path(dir) / "run_config.cfg").string());

  for (Metric m : kAllMetrics) {
    const std::string name = std::string("compare_") + to_string(m) + ".png";
    save_group_bar_chart((fs::path(dir) / name).string(), m, report.comparisons);
  }

  std::string log;
  log += utc_now() + " cohort run: " + std::to_string(report.frames.size()) + " frames, " +
         std::to_string(report.n_ok) + " analyzed, " + std::to_string(report.n_failed) +
         " failed\n";
  for (const FrameOutcome& f : report.frames)
    if (!f.ok)
      log += utc_now() + " frame '" + f.row.frame_path + "' failed: " + f.error + "\n";
  for (const std::string& w : report.warnings) log += utc_now() + " warning: " + w + "\n";
  log += utc_now() + " status " + std::to_string(int(cohort_status(report))) + "\n";
  write_text((fs::path(dir) / "run.log").string(), log);
}

void write_frame_outputs(const FrameResult& result, const RunConfig& config,
                         const std::string& dir, const std::string& stem,
                         const std::string& frame_path) {
  fs::create_directories(dir);
  const fs::path base = fs::path(dir) / stem;
  write_text(base.string() + "_metrics.csv", frame_result_csv(result, frame_path));
  write_text(base.string() + "_profiles.csv", profiles_csv(result.gradients));
  save_profile_plot(base.string() + "_profiles.png", result.gradients);
  if (config.write_heatmaps) {
    save_heatmap_rs(base.string() + "_rs.png", result.rs);
    save_heatmap_gr(base.string() + "_gr.png", result.gradients);
  }
  config.save((fs::path(dir) / "run_config.cfg").string());
}

}  // namespace elq
