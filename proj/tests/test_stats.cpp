#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "elq/errors.hpp"
#include "elq/stats.hpp"
#include "test_support.hpp"

using namespace elq;
using elqtest::thrown_code;

namespace {

// Wrap bare totals into observations for cohort_analysis.
FrameObservation obs(Site site, Group group, double gx, double gy, double gr, int index) {
  return FrameObservation{FrameMeta{"S" + std::to_string(index), site, group, index}, gx, gy, gr};
}

std::vector<double> affine(const std::vector<double>& v, double a, double b) {
  std::vector<double> out = v;
  for (double& x : out) x = a * x + b;
  return out;
}

}  // namespace

TEST_CASE("identical groups test as exactly no difference") {
  const std::vector<double> g = {1.0, 2.0, 3.0};
  const TestResult r = group_compare(g, g);
  CHECK(r.t == 0.0);
  CHECK(r.p_two_tailed == 1.0);
  CHECK(r.eta_squared == 0.0);
  CHECK(!r.degenerate);
}

TEST_CASE("pooled fixture: a={1,2,3,4} vs b={3,4,5,6}") {
  const std::vector<double> a = {1.0, 2.0, 3.0, 4.0};
  const std::vector<double> b = {3.0, 4.0, 5.0, 6.0};
  const TestResult r = group_compare(a, b);
  // frozen against an independent implementation of the pooled t test
  CHECK(r.t == doctest::Approx(-2.1908902300206643).epsilon(1e-12));
  CHECK(r.df == 6.0);
  CHECK(r.p_two_tailed == doctest::Approx(0.07098765432098757).epsilon(1e-10));
  CHECK(r.eta_squared == doctest::Approx(4.0 / 9.0).epsilon(1e-12));

  const TestResult swapped = group_compare(b, a);
  CHECK(swapped.t == -r.t);
  CHECK(swapped.p_two_tailed == r.p_two_tailed);
  CHECK(swapped.df == r.df);
  CHECK(swapped.eta_squared == r.eta_squared);
}

TEST_CASE("welch fixture: unequal sizes and variances") {
  const std::vector<double> a = {1.1, 2.3, 3.1, 4.7, 5.1};
  const std::vector<double> b = {2.0, 4.5, 6.5, 8.0};
  const TestResult r = group_compare(a, b, true);
  // frozen against an independent Welch implementation
  CHECK(r.t == doctest::Approx(-1.3292983283601507).epsilon(1e-12));
  CHECK(r.df == doctest::Approx(4.8960305184549835).epsilon(1e-12));
  CHECK(r.p_two_tailed == doctest::Approx(0.2423198204619373).epsilon(1e-10));
}

TEST_CASE("t-table grid points") {
  // two-tailed p at tabulated critical values is 0.05
  CHECK(std::abs(student_two_tailed_p(12.706, 1.0) - 0.05) < 5e-4);
  CHECK(std::abs(student_two_tailed_p(2.228, 10.0) - 0.05) < 5e-4);
  CHECK(std::abs(student_two_tailed_p(2.042, 30.0) - 0.05) < 5e-4);

  // and the quantile function returns those critical values
  CHECK(student_quantile(0.975, 1.0) == doctest::Approx(12.706204736432095).epsilon(1e-9));
  CHECK(student_quantile(0.975, 3.0) == doctest::Approx(3.182446305284263).epsilon(1e-9));
  CHECK(student_quantile(0.975, 10.0) == doctest::Approx(2.2281388519649385).epsilon(1e-9));
}

TEST_CASE("incomplete beta sanity") {
  CHECK(regularized_incomplete_beta(2.0, 3.0, 0.0) == 0.0);
  CHECK(regularized_incomplete_beta(2.0, 3.0, 1.0) == 1.0);
  // I_x(1,1) = x
  CHECK(regularized_incomplete_beta(1.0, 1.0, 0.37) == doctest::Approx(0.37).epsilon(1e-12));
  // symmetry I_x(a,b) = 1 - I_{1-x}(b,a)
  const double v = regularized_incomplete_beta(2.5, 4.5, 0.3);
  CHECK(v == doctest::Approx(1.0 - regularized_incomplete_beta(4.5, 2.5, 0.7)).epsilon(1e-12));
}

TEST_CASE("confidence intervals") {
  const CiResult flat = ci95(std::vector<double>{5.0, 5.0, 5.0, 5.0});
  CHECK(flat.mean == 5.0);
  CHECK(flat.half_width == 0.0);

  // n=2: s = sqrt(2), s/sqrt(n) = 1, so the half width is t_{0.975,1}
  const CiResult two = ci95(std::vector<double>{0.0, 2.0});
  CHECK(two.mean == 1.0);
  CHECK(two.half_width == doctest::Approx(12.706204736432095).epsilon(1e-9));

  CHECK(thrown_code([] { ci95(std::vector<double>{1.0}); }) == Err::InsufficientData);
}

TEST_CASE("degenerate and untestable variance cases") {
  // both groups constant and equal: no evidence of difference
  const TestResult same = group_compare(std::vector<double>{2.0, 2.0, 2.0},
                                        std::vector<double>{2.0, 2.0});
  CHECK(same.degenerate);
  CHECK(same.t == 0.0);
  CHECK(same.p_two_tailed == 1.0);

  // both constant but different: the test statistic does not exist
  CHECK(thrown_code([] {
          group_compare(std::vector<double>{2.0, 2.0}, std::vector<double>{3.0, 3.0});
        }) == Err::ZeroVariance);

  CHECK(thrown_code([] {
          group_compare(std::vector<double>{1.0}, std::vector<double>{2.0, 3.0});
        }) == Err::InsufficientData);
}

TEST_CASE("antisymmetry and affine invariance over random groups") {
  std::mt19937_64 rng(31337);
  std::uniform_real_distribution<double> value(-3.0, 3.0);
  std::uniform_int_distribution<int> size(2, 40);
  std::uniform_real_distribution<double> scale(0.1, 4.0);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> a(size_t(size(rng))), b(size_t(size(rng)));
    for (double& x : a) x = value(rng);
    for (double& x : b) x = value(rng);
    TestResult r;
    try {
      r = group_compare(a, b, trial % 2 == 1);
    } catch (const Error&) {
      continue;  // zero-variance draws are legitimately untestable
    }

    const TestResult swapped = group_compare(b, a, trial % 2 == 1);
    REQUIRE(swapped.t == -r.t);
    REQUIRE(swapped.p_two_tailed == r.p_two_tailed);

    const double m = scale(rng) * (trial % 3 == 0 ? -1.0 : 1.0);
    const double c = value(rng);
    const TestResult mapped = group_compare(affine(a, m, c), affine(b, m, c), trial % 2 == 1);
    REQUIRE(std::abs(mapped.t) == doctest::Approx(std::abs(r.t)).epsilon(1e-9));
    REQUIRE(mapped.p_two_tailed == doctest::Approx(r.p_two_tailed).epsilon(1e-8));
    REQUIRE(mapped.eta_squared == doctest::Approx(r.eta_squared).epsilon(1e-9));
    REQUIRE((mapped.t < 0) == ((m < 0) != (r.t < 0) && r.t != 0.0));

    // the effect-size identity holds exactly as computed
    REQUIRE(r.eta_squared ==
            doctest::Approx(r.t * r.t / (r.t * r.t + r.df)).epsilon(1e-12));
    REQUIRE(r.eta_squared >= 0.0);
    REQUIRE(r.eta_squared <= 1.0);
  }
}

TEST_CASE("p is monotone decreasing in |t| at fixed df") {
  for (double df : {1.0, 4.0, 17.0, 116.0}) {
    double prev = 1.1;
    for (double t = 0.0; t <= 6.0; t += 0.25) {
      const double p = student_two_tailed_p(t, df);
      CHECK(p < prev + 1e-15);
      prev = p;
    }
  }
}

TEST_CASE("cohort analysis: row order, skips and identical groups") {
  std::vector<FrameObservation> observations;
  int index = 0;
  // LeftForefoot: both groups, identical value lists -> t = 0 rows.  The
  // constant metrics use dyadic values so their sample variance is exactly 0.
  for (int i = 0; i < 3; ++i) {
    observations.push_back(obs(Site::LeftForefoot, Group::Ulcerated, 0.1 * i, 0.25, 0.5, index++));
    observations.push_back(
        obs(Site::LeftForefoot, Group::NonUlcerated, 0.1 * i, 0.25, 0.5, index++));
  }
  // RightHeel: only one group present -> skipped with a warning
  for (int i = 0; i < 3; ++i)
    observations.push_back(obs(Site::RightHeel, Group::NonUlcerated, 0.5, 0.5, 0.5, index++));

  std::vector<std::string> warnings;
  const std::vector<GroupComparison> rows = cohort_analysis(observations, false, &warnings);

  REQUIRE(rows.size() == 3);  // one site made it, three metrics
  CHECK(rows[0].site == Site::LeftForefoot);
  CHECK(rows[0].metric == Metric::TotalGx);
  CHECK(rows[1].metric == Metric::TotalGy);
  CHECK(rows[2].metric == Metric::TotalGr);
  CHECK(rows[0].n_a == 3);
  CHECK(rows[0].n_b == 3);
  CHECK(rows[0].t == 0.0);
  CHECK(rows[0].error.empty());
  // gy and gr are constant-equal in both groups: degenerate no-difference
  CHECK(rows[1].degenerate);
  CHECK(rows[1].p_two_tailed == 1.0);

  REQUIRE(!warnings.empty());
  bool mentions_right_heel = false;
  for (const std::string& w : warnings)
    mentions_right_heel = mentions_right_heel || w.find("right_heel") != std::string::npos;
  CHECK(mentions_right_heel);
}

TEST_CASE("cohort analysis reports untestable rows in-place and drops bad metrics") {
  std::vector<FrameObservation> observations;
  // constant unequal groups: ZeroVariance lands in the row's error field
  for (int i = 0; i < 3; ++i) {
    observations.push_back(obs(Site::LeftHeel, Group::Ulcerated, 1.0, 1.0, 1.0, i));
    observations.push_back(obs(Site::LeftHeel, Group::NonUlcerated, 2.0, 2.0, 2.0, 10 + i));
  }
  // undefined metric values are dropped with a warning, leaving n < 2
  observations.push_back(obs(Site::RightForefoot, Group::Ulcerated, kUndefined, 0.1, 0.2, 20));
  observations.push_back(obs(Site::RightForefoot, Group::Ulcerated, kUndefined, 0.15, 0.2, 21));
  observations.push_back(obs(Site::RightForefoot, Group::NonUlcerated, kUndefined, 0.1, 0.2, 22));
  observations.push_back(obs(Site::RightForefoot, Group::NonUlcerated, kUndefined, 0.12, 0.25, 23));

  std::vector<std::string> warnings;
  const std::vector<GroupComparison> rows = cohort_analysis(observations, false, &warnings);
  REQUIRE(rows.size() == 6);

  CHECK(rows[0].site == Site::LeftHeel);
  CHECK(rows[0].error == "ZeroVariance");
  CHECK(rows[0].n_a == 3);
  // group means still reported even though the test could not run
  CHECK(rows[0].mean_a == 1.0);
  CHECK(rows[0].mean_b == 2.0);

  CHECK(rows[3].site == Site::RightForefoot);
  CHECK(rows[3].metric == Metric::TotalGx);
  CHECK(!rows[3].error.empty());  // every gx observation was undefined
  CHECK(rows[4].error.empty());   // gy rows are fine
  CHECK(!warnings.empty());
}

TEST_CASE("the ulcerated group is group a by convention") {
  std::vector<FrameObservation> observations;
  for (int i = 0; i < 4; ++i) {
    observations.push_back(obs(Site::LeftForefoot, Group::Ulcerated, 0, 2.0 + 0.1 * i, 0, i));
    observations.push_back(obs(Site::LeftForefoot, Group::NonUlcerated, 0, 1.0 + 0.1 * i, 0, 10 + i));
  }
  const std::vector<GroupComparison> rows = cohort_analysis(observations);
  // mean_a (ulcerated) > mean_b, so t must be positive
  CHECK(rows[1].metric == Metric::TotalGy);
  CHECK(rows[1].mean_a > rows[1].mean_b);
  CHECK(rows[1].t > 0.0);
}

TEST_CASE("metric accessor picks the right component") {
  const FrameObservation o = obs(Site::LeftHeel, Group::Ulcerated, 0.1, 0.2, 0.3, 0);
  CHECK(o.metric(Metric::TotalGx) == 0.1);
  CHECK(o.metric(Metric::TotalGy) == 0.2);
  CHECK(o.metric(Metric::TotalGr) == 0.3);
}
