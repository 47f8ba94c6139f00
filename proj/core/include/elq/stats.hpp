#pragma once

#include <span>
#include <string>
#include <vector>

#include "elq/types.hpp"

namespace elq {

struct TestResult {
  double t = 0.0;
  double df = 0.0;
  double p_two_tailed = 1.0;
  double eta_squared = 0.0;
  bool degenerate = false;  // both groups constant and equal
};

// Two-sample t test, pooled variance by default, Welch (with
// Welch–Satterthwaite df) when welch=true.  Two-tailed p comes from the t
// distribution through the regularized incomplete beta:
//     p = I_{df/(df+t^2)}(df/2, 1/2)
// and the effect size is eta^2 = t^2 / (t^2 + df).  Needs two values per
// group; two constant equal groups give the degenerate t=0/p=1 result, two
// constant unequal groups cannot be tested and throw ZeroVariance.
TestResult group_compare(std::span<const double> a, std::span<const double> b,
                         bool welch = false);

struct CiResult {
  double mean = 0.0;
  double half_width = 0.0;  // mean +/- half_width is the 95% interval
};

// Two-sided 95% confidence interval for a mean: t_{0.975, n-1} * s / sqrt(n).
CiResult ci95(std::span<const double> values);

// I_x(a, b), evaluated by Lentz's continued fraction; relative error well
// inside 1e-10 over the df range a t test can produce.
double regularized_incomplete_beta(double a, double b, double x);

// Two-tailed tail mass of the t distribution at |t| with df degrees of freedom.
double student_two_tailed_p(double t, double df);

// Inverse CDF of the t distribution (bisection on the CDF; prob in (0,1)).
double student_quantile(double prob, double df);

// One analyzed frame reduced to its aggregate metrics, grouped for testing.
struct FrameObservation {
  FrameMeta meta;
  double total_gx = kUndefined;
  double total_gy = kUndefined;
  double total_gr = kUndefined;
  double metric(Metric m) const;
};

// Per-site, per-metric group comparison over frame observations (frames are
// deliberately treated as independent observations).  Sites where only one
// group has frames are skipped with a warning; a test that cannot run
// (too few frames, untestable variance) is reported in its row's error field
// rather than aborting the others.  Rows come out in site-major, metric-minor
// order.
std::vector<GroupComparison> cohort_analysis(std::span<const FrameObservation> observations,
                                             bool welch = false,
                                             std::vector<std::string>* warnings = nullptr);

}  // namespace elq
