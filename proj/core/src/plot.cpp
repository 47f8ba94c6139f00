#include "elq/plot.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>

#include "elq/color_scale.hpp"
#include "elq/image_io.hpp"

namespace elq {

namespace {

// 5x7 glyphs, one byte per row, low 5 bits used, MSB side is the left edge.
struct Glyph {
  char ch;
  uint8_t rows[7];
};

constexpr Glyph kFont[] = {
    {'A', {0x0E, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11}},
    {'B', {0x1E, 0x11, 0x11, 0x1E, 0x11, 0x11, 0x1E}},
    {'C', {0x0E, 0x11, 0x10, 0x10, 0x10, 0x11, 0x0E}},
    {'D', {0x1E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x1E}},
    {'E', {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x1F}},
    {'F', {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x10}},
    {'G', {0x0E, 0x11, 0x10, 0x17, 0x11, 0x11, 0x0F}},
    {'H', {0x11, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11}},
    {'I', {0x0E, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0E}},
    {'J', {0x07, 0x02, 0x02, 0x02, 0x02, 0x12, 0x0C}},
    {'K', {0x11, 0x12, 0x14, 0x18, 0x14, 0x12, 0x11}},
    {'L', {0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x1F}},
    {'M', {0x11, 0x1B, 0x15, 0x15, 0x11, 0x11, 0x11}},
    {'N', {0x11, 0x19, 0x15, 0x13, 0x11, 0x11, 0x11}},
    {'O', {0x0E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}},
    {'P', {0x1E, 0x11, 0x11, 0x1E, 0x10, 0x10, 0x10}},
    {'Q', {0x0E, 0x11, 0x11, 0x11, 0x15, 0x12, 0x0D}},
    {'R', {0x1E, 0x11, 0x11, 0x1E, 0x14, 0x12, 0x11}},
    {'S', {0x0F, 0x10, 0x10, 0x0E, 0x01, 0x01, 0x1E}},
    {'T', {0x1F, 0x04, 0x04, 0x04, 0x04, 0x04, 0x04}},
    {'U', {0x11, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}},
    {'V', {0x11, 0x11, 0x11, 0x11, 0x11, 0x0A, 0x04}},
    {'W', {0x11, 0x11, 0x11, 0x15, 0x15, 0x15, 0x0A}},
    {'X', {0x11, 0x11, 0x0A, 0x04, 0x0A, 0x11, 0x11}},
    {'Y', {0x11, 0x11, 0x11, 0x0A, 0x04, 0x04, 0x04}},
    {'Z', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x10, 0x1F}},
    {'0', {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E}},
    {'1', {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E}},
    {'2', {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F}},
    {'3', {0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E}},
    {'4', {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02}},
    {'5', {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E}},
    {'6', {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E}},
    {'7', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08}},
    {'8', {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E}},
    {'9', {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C}},
    {' ', {0, 0, 0, 0, 0, 0, 0}},
    {'.', {0, 0, 0, 0, 0, 0x0C, 0x0C}},
    {',', {0, 0, 0, 0, 0x0C, 0x04, 0x08}},
    {'-', {0, 0, 0, 0x1F, 0, 0, 0}},
    {'+', {0, 0x04, 0x04, 0x1F, 0x04, 0x04, 0}},
    {'*', {0, 0x04, 0x15, 0x0E, 0x15, 0x04, 0}},
    {':', {0, 0x0C, 0x0C, 0, 0x0C, 0x0C, 0}},
    {'(', {0x02, 0x04, 0x08, 0x08, 0x08, 0x04, 0x02}},
    {')', {0x08, 0x04, 0x02, 0x02, 0x02, 0x04, 0x08}},
    {'/', {0x01, 0x01, 0x02, 0x04, 0x08, 0x10, 0x10}},
    {'%', {0x18, 0x19, 0x02, 0x04, 0x08, 0x13, 0x03}},
    {'=', {0, 0, 0x1F, 0, 0x1F, 0, 0}},
    {'<', {0x02, 0x04, 0x08, 0x10, 0x08, 0x04, 0x02}},
    {'>', {0x08, 0x04, 0x02, 0x01, 0x02, 0x04, 0x08}},
    {'_', {0, 0, 0, 0, 0, 0, 0x1F}},
    {'\'', {0x0C, 0x04, 0x08, 0, 0, 0, 0}},
};

const uint8_t* glyph_rows(char ch) {
  const char up = char(std::toupper(static_cast<unsigned char>(ch)));
  for (const Glyph& g : kFont)
    if (g.ch == up) return g.rows;
  return nullptr;
}

constexpr Rgb kInvalidGray{45, 45, 45};
constexpr Rgb kAxis{60, 60, 60};
constexpr Rgb kGrid{210, 210, 210};
constexpr Rgb kInk{25, 25, 25};
constexpr Rgb kUlcerated{214, 121, 35};     // warm
constexpr Rgb kNonUlcerated{46, 120, 170};  // cool

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

}  // namespace

Canvas::Canvas(int width, int height, Rgb background) : image_(width, height, background) {}

void Canvas::set(int x, int y, Rgb c) {
  if (image_.in_bounds(x, y)) image_.at(x, y) = c;
}

void Canvas::fill_rect(int x, int y, int w, int h, Rgb c) {
  for (int j = y; j < y + h; ++j)
    for (int i = x; i < x + w; ++i) set(i, j, c);
}

void Canvas::draw_rect(int x, int y, int w, int h, Rgb c) {
  hline(x, x + w - 1, y, c);
  hline(x, x + w - 1, y + h - 1, c);
  vline(x, y, y + h - 1, c);
  vline(x + w - 1, y, y + h - 1, c);
}

void Canvas::hline(int x0, int x1, int y, Rgb c) {
  if (x1 < x0) std::swap(x0, x1);
  for (int x = x0; x <= x1; ++x) set(x, y, c);
}

void Canvas::vline(int x, int y0, int y1, Rgb c) {
  if (y1 < y0) std::swap(y0, y1);
  for (int y = y0; y <= y1; ++y) set(x, y, c);
}

void Canvas::line(int x0, int y0, int x1, int y1, Rgb c) {
  // Bresenham
  const int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
  const int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  while (true) {
    set(x0, y0, c);
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) { err += dy; x0 += sx; }
    if (e2 <= dx) { err += dx; y0 += sy; }
  }
}

void Canvas::text(int x, int y, std::string_view s, Rgb c, int scale) {
  int cx = x;
  for (char ch : s) {
    const uint8_t* rows = glyph_rows(ch);
    if (rows) {
      for (int j = 0; j < kGlyphH; ++j)
        for (int i = 0; i < 5; ++i)
          if (rows[j] & (1 << (4 - i)))
            fill_rect(cx + i * scale, y + j * scale, scale, scale, c);
    }
    cx += 6 * scale;
  }
}

int Canvas::text_width(std::string_view s, int scale) { return int(s.size()) * 6 * scale; }

// --- heatmaps ----------------------------------------------------------------

void save_heatmap_rs(const std::string& path, const RSMap& rs) {
  double vmax = 0.0;
  for (size_t i = 0; i < rs.values().size(); ++i)
    if (rs.valid().data()[i]) vmax = std::max(vmax, rs.values().data()[i]);
  if (vmax <= 0.0) vmax = 1.0;

  const std::vector<Rgb> map = default_colormap();
  const int header = 14;
  Canvas cv(std::max(rs.width(), 240), rs.height() + header, Rgb{255, 255, 255});
  cv.fill_rect(0, 0, cv.image().width(), header, Rgb{235, 235, 235});
  cv.text(4, 3, "RS MAP  0 .. " + fmt("%.3g", vmax) + "  (BLUE = SOFT)", kInk);

  for (int y = 0; y < rs.height(); ++y)
    for (int x = 0; x < rs.width(); ++x) {
      Rgb c = kInvalidGray;
      if (rs.valid().at(x, y)) {
        const int q =
            std::clamp(int(std::lround(rs.values().at(x, y) / vmax * kQsMax)), kQsMin, kQsMax);
        c = map[size_t(q - 1)];
      }
      cv.set(x, y + header, c);
    }
  write_png(path, cv.image());
}

void save_heatmap_gr(const std::string& path, const GradientField& field) {
  double vmax = 0.0;
  for (size_t i = 0; i < field.gr.size(); ++i)
    if (field.gr_valid.data()[i]) vmax = std::max(vmax, field.gr.data()[i]);
  if (vmax <= 0.0) vmax = 1.0;

  const int header = 14;
  Canvas cv(std::max(field.gr.width(), 240), field.gr.height() + header, Rgb{255, 255, 255});
  cv.fill_rect(0, 0, cv.image().width(), header, Rgb{235, 235, 235});
  cv.text(4, 3, "OBLIQUE GRADIENT  0 .. " + fmt("%.3g", vmax), kInk);

  for (int y = 0; y < field.gr.height(); ++y)
    for (int x = 0; x < field.gr.width(); ++x) {
      Rgb c = kInvalidGray;
      if (field.gr_valid.at(x, y)) {
        // black -> red -> yellow heat ramp
        const double t = std::clamp(field.gr.at(x, y) / vmax, 0.0, 1.0);
        const double r = std::min(1.0, t * 2.0);
        const double g = std::max(0.0, t * 2.0 - 1.0);
        c = Rgb{uint8_t(std::lround(r * 255)), uint8_t(std::lround(g * 255)), 0};
      }
      cv.set(x, y + header, c);
    }
  write_png(path, cv.image());
}

// --- profile strips ----------------------------------------------------------

namespace {

// One panel: series of (index, value) with NaN gaps, drawn as a polyline.
void draw_series_panel(Canvas& cv, int px, int py, int pw, int ph, const std::vector<double>& s,
                       const std::string& title, Rgb color) {
  cv.draw_rect(px, py, pw, ph, kAxis);
  cv.text(px + 4, py - 10, title, kInk);

  double lo = 0.0, hi = 0.0;
  bool any = false;
  for (double v : s)
    if (!std::isnan(v)) {
      lo = any ? std::min(lo, v) : v;
      hi = any ? std::max(hi, v) : v;
      any = true;
    }
  if (!any) {
    cv.text(px + 8, py + ph / 2 - 4, "NO DEFINED MEANS", kAxis);
    return;
  }
  if (hi - lo < 1e-12) { hi += 0.5; lo -= 0.5; }
  const double pad = 0.08 * (hi - lo);
  lo -= pad; hi += pad;

  auto sx = [&](int i) {
    return px + 2 + int(std::lround(double(i) / std::max<size_t>(1, s.size() - 1) * (pw - 5)));
  };
  auto sy = [&](double v) { return py + 2 + int(std::lround((hi - v) / (hi - lo) * (ph - 5))); };

  if (lo < 0.0 && hi > 0.0) cv.hline(px + 1, px + pw - 2, sy(0.0), kGrid);

  int last_i = -1;
  for (int i = 0; i < int(s.size()); ++i) {
    if (std::isnan(s[size_t(i)])) { last_i = -1; continue; }
    if (last_i >= 0)
      cv.line(sx(last_i), sy(s[size_t(last_i)]), sx(i), sy(s[size_t(i)]), color);
    else
      cv.set(sx(i), sy(s[size_t(i)]), color);
    last_i = i;
  }
  cv.text(px + pw - 4 - Canvas::text_width(fmt("%.3g", hi)), py + 2, fmt("%.3g", hi), kAxis);
  cv.text(px + pw - 4 - Canvas::text_width(fmt("%.3g", lo)), py + ph - 10, fmt("%.3g", lo), kAxis);
}

}  // namespace

void save_profile_plot(const std::string& path, const GradientField& field) {
  const int pw = std::max(320, std::max(field.gx.width(), field.gx.height()) + 20);
  const int ph = 120;
  Canvas cv(pw + 16, 2 * (ph + 26) + 8, Rgb{255, 255, 255});
  draw_series_panel(cv, 8, 20, pw, ph, field.row_mean_gx, "ROW MEAN GX BY ROW", kNonUlcerated);
  draw_series_panel(cv, 8, ph + 46, pw, ph, field.col_mean_gy, "COLUMN MEAN GY BY COLUMN",
                    kUlcerated);
  write_png(path, cv.image());
}

// --- cohort bar chart ----------------------------------------------------------

void save_group_bar_chart(const std::string& path, Metric metric,
                          const std::vector<GroupComparison>& comparisons) {
  std::vector<const GroupComparison*> rows;
  for (const GroupComparison& c : comparisons)
    if (c.metric == metric && c.error.empty()) rows.push_back(&c);

  const int W = 640, H = 400;
  const int left = 70, right = 20, top = 48, bottom = 56;
  Canvas cv(W, H, Rgb{255, 255, 255});
  std::string title = std::string("GROUP MEANS  ") + to_string(metric) + "  (95% CI, * P<0.05)";
  std::transform(title.begin(), title.end(), title.begin(),
                 [](unsigned char c) { return char(std::toupper(c)); });
  cv.text((W - Canvas::text_width(title)) / 2, 10, title, kInk);

  // legend
  cv.fill_rect(left, 26, 10, 10, kUlcerated);
  cv.text(left + 14, 27, "ULCERATED", kInk);
  cv.fill_rect(left + 120, 26, 10, 10, kNonUlcerated);
  cv.text(left + 134, 27, "NON-ULCERATED", kInk);

  const int px = left, py = top, pw = W - left - right, ph = H - top - bottom;
  cv.draw_rect(px, py, pw, ph, kAxis);

  if (rows.empty()) {
    cv.text(px + 12, py + ph / 2, "NO TESTABLE SITES", kAxis);
    write_png(path, cv.image());
    return;
  }

  double lo = 0.0, hi = 0.0;
  for (const GroupComparison* c : rows) {
    lo = std::min({lo, c->mean_a - c->ci95_a, c->mean_b - c->ci95_b});
    hi = std::max({hi, c->mean_a + c->ci95_a, c->mean_b + c->ci95_b});
  }
  if (hi - lo < 1e-12) { hi += 1.0; lo -= 1.0; }
  const double pad = 0.12 * (hi - lo);
  lo -= pad; hi += pad;
  auto sy = [&](double v) { return py + 2 + int(std::lround((hi - v) / (hi - lo) * (ph - 5))); };

  // horizontal guides and value labels
  for (int k = 0; k <= 4; ++k) {
    const double v = lo + (hi - lo) * k / 4.0;
    cv.hline(px + 1, px + pw - 2, sy(v), kGrid);
    const std::string lbl = fmt("%.3g", v);
    cv.text(px - 6 - Canvas::text_width(lbl), sy(v) - 3, lbl, kAxis);
  }
  if (lo < 0.0 && hi > 0.0) cv.hline(px + 1, px + pw - 2, sy(0.0), kAxis);

  const int n = int(rows.size());
  const int slot = pw / n;
  const int bar_w = std::max(10, std::min(36, slot / 4));
  const int zero_y = sy(std::clamp(0.0, lo, hi));

  for (int i = 0; i < n; ++i) {
    const GroupComparison& c = *rows[size_t(i)];
    const int cx = px + slot * i + slot / 2;

    struct BarSpec { double mean, ci; Rgb color; int offset; };
    const BarSpec bars[2] = {{c.mean_a, c.ci95_a, kUlcerated, -bar_w - 3},
                             {c.mean_b, c.ci95_b, kNonUlcerated, 3}};
    for (const BarSpec& b : bars) {
      const int x0 = cx + b.offset;
      const int ytop = std::min(zero_y, sy(b.mean));
      const int ybot = std::max(zero_y, sy(b.mean));
      cv.fill_rect(x0, ytop, bar_w, std::max(1, ybot - ytop), b.color);
      // CI whisker
      const int xq = x0 + bar_w / 2;
      cv.vline(xq, sy(b.mean - b.ci), sy(b.mean + b.ci), kInk);
      cv.hline(xq - 3, xq + 3, sy(b.mean + b.ci), kInk);
      cv.hline(xq - 3, xq + 3, sy(b.mean - b.ci), kInk);
    }

    if (c.p_two_tailed < 0.05)
      cv.text(cx - 2, py + 6, "*", kInk, 2);

    std::string site = to_string(c.site);
    std::transform(site.begin(), site.end(), site.begin(),
                   [](unsigned char ch) { return char(std::toupper(ch)); });
    cv.text(cx - Canvas::text_width(site) / 2, py + ph + 8, site, kInk);
    const std::string p = fmt("P=%.3f", c.p_two_tailed);
    cv.text(cx - Canvas::text_width(p) / 2, py + ph + 20, p, kAxis);
  }

  write_png(path, cv.image());
}

}  // namespace elq
