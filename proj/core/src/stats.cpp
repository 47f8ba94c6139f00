#include "elq/stats.hpp"

#include <algorithm>
#include <cmath>

namespace elq {

namespace {

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / double(v.size());
}

// Unbiased sample variance (n-1 denominator).
double variance_of(std::span<const double> v, double mean) {
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return s / double(v.size() - 1);
}

// Continued-fraction kernel for the incomplete beta (Lentz's method).
double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 1e-14;
  constexpr double kTiny = 1e-300;

  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (a <= 0.0 || b <= 0.0) fail(Err::InvalidArgument, "beta parameters must be positive");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;

  const double ln_beta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  const double front = std::exp(a * std::log(x) + b * std::log1p(-x) - ln_beta);
  // The continued fraction converges fast only on one side of the mean;
  // use the symmetry I_x(a,b) = 1 - I_{1-x}(b,a) for the other.
  if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double student_two_tailed_p(double t, double df) {
  if (df <= 0.0) fail(Err::InvalidArgument, "degrees of freedom must be positive");
  if (!std::isfinite(t)) fail(Err::InvalidArgument, "t must be finite");
  return regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

double student_quantile(double prob, double df) {
  if (df <= 0.0) fail(Err::InvalidArgument, "degrees of freedom must be positive");
  if (prob <= 0.0 || prob >= 1.0) fail(Err::InvalidArgument, "probability must be in (0,1)");
  if (prob < 0.5) return -student_quantile(1.0 - prob, df);
  if (prob == 0.5) return 0.0;

  // CDF(t) = prob  <=>  two-tailed p at t equals 2(1-prob); bracket then bisect.
  const double target = 2.0 * (1.0 - prob);
  double hi = 1.0;
  while (student_two_tailed_p(hi, df) > target && hi < 1e12) hi *= 2.0;
  double lo = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (student_two_tailed_p(mid, df) > target)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-13 * std::max(1.0, hi)) break;
  }
  return 0.5 * (lo + hi);
}

TestResult group_compare(std::span<const double> a, std::span<const double> b, bool welch) {
  const size_t na = a.size(), nb = b.size();
  if (na < 2 || nb < 2)
    fail(Err::InsufficientData, "need at least 2 observations per group, got " +
                                    std::to_string(na) + " and " + std::to_string(nb));

  const double ma = mean_of(a), mb = mean_of(b);
  const double va = variance_of(a, ma), vb = variance_of(b, mb);

  if (va == 0.0 && vb == 0.0) {
    if (ma == mb) return TestResult{.t = 0.0, .df = double(na + nb - 2), .p_two_tailed = 1.0,
                                    .eta_squared = 0.0, .degenerate = true};
    fail(Err::ZeroVariance, "both groups constant but unequal, t is unbounded");
  }

  double t, df;
  if (welch) {
    const double ea = va / double(na), eb = vb / double(nb);
    const double se2 = ea + eb;
    t = (ma - mb) / std::sqrt(se2);
    df = se2 * se2 / (ea * ea / double(na - 1) + eb * eb / double(nb - 1));
  } else {
    df = double(na + nb - 2);
    const double pooled = ((double(na) - 1.0) * va + (double(nb) - 1.0) * vb) / df;
    t = (ma - mb) / std::sqrt(pooled * (1.0 / double(na) + 1.0 / double(nb)));
  }

  return TestResult{.t = t,
                    .df = df,
                    .p_two_tailed = student_two_tailed_p(t, df),
                    .eta_squared = t * t / (t * t + df),
                    .degenerate = false};
}

CiResult ci95(std::span<const double> values) {
  if (values.size() < 2)
    fail(Err::InsufficientData, "confidence interval needs at least 2 values");
  const double m = mean_of(values);
  const double sd = std::sqrt(variance_of(values, m));
  const double q = student_quantile(0.975, double(values.size() - 1));
  return CiResult{.mean = m, .half_width = q * sd / std::sqrt(double(values.size()))};
}

double FrameObservation::metric(Metric m) const {
  switch (m) {
    case Metric::TotalGx: return total_gx;
    case Metric::TotalGy: return total_gy;
    case Metric::TotalGr: return total_gr;
  }
  return kUndefined;
}

std::vector<GroupComparison> cohort_analysis(std::span<const FrameObservation> observations,
                                             bool welch, std::vector<std::string>* warnings) {
  std::vector<GroupComparison> rows;
  for (Site site : kAllSites) {
    bool has_a = false, has_b = false;
    for (const FrameObservation& o : observations) {
      if (o.meta.site != site) continue;
      (o.meta.group == Group::Ulcerated ? has_a : has_b) = true;
    }
    if (!has_a && !has_b) continue;  // site absent from the cohort entirely
    if (!has_a || !has_b) {
      if (warnings)
        warnings->push_back(std::string("site ") + to_string(site) + " skipped: only " +
                            to_string(has_a ? Group::Ulcerated : Group::NonUlcerated) +
                            " frames present");
      continue;
    }

    for (Metric metric : kAllMetrics) {
      GroupComparison row;
      row.site = site;
      row.metric = metric;

      std::vector<double> a, b;
      int dropped = 0;
      for (const FrameObservation& o : observations) {
        if (o.meta.site != site) continue;
        const double v = o.metric(metric);
        if (!std::isfinite(v)) { ++dropped; continue; }
        (o.meta.group == Group::Ulcerated ? a : b).push_back(v);
      }
      if (dropped > 0 && warnings)
        warnings->push_back(std::string("site ") + to_string(site) + " " + to_string(metric) +
                            ": dropped " + std::to_string(dropped) +
                            " frames with undefined totals");
      row.n_a = int(a.size());
      row.n_b = int(b.size());

      try {
        const TestResult r = group_compare(a, b, welch);
        row.t = r.t;
        row.df = r.df;
        row.p_two_tailed = r.p_two_tailed;
        row.eta_squared = r.eta_squared;
        row.degenerate = r.degenerate;
        const CiResult ca = ci95(a), cb = ci95(b);
        row.mean_a = ca.mean;
        row.ci95_a = ca.half_width;
        row.mean_b = cb.mean;
        row.ci95_b = cb.half_width;
      } catch (const Error& e) {
        row.error = err_name(e.code());
        if (!a.empty()) row.mean_a = mean_of(a);
        if (!b.empty()) row.mean_b = mean_of(b);
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace elq
