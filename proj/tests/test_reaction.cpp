#include <doctest.h>

#include <fkpp/errors.hpp>
#include <fkpp/reaction.hpp>

#include <cmath>
#include <random>
#include <vector>

using namespace fkpp;

// Complete Beta function via lgamma: an oracle independent of the library's
// quadrature route for F.
static double beta_fn(double a, double b) {
  return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

// Synthetic table reaction that is identically 0 on [0, 0.1]: violates the
// secant condition at the lower end for every delta.
static ReactionSpec flat_foot_table() {
  std::vector<std::pair<double, double>> samples;
  const int n = 400; // n divisible by 4 so s0=0.75 is a node with f=0 exactly
  for (int i = 0; i <= n; ++i) {
    double s = static_cast<double>(i) / n;
    double f = (s <= 0.1) ? 0.0 : -(s - 0.1) * (0.75 - s) * (1.0 - s);
    samples.emplace_back(s, f);
  }
  return ReactionSpec::user_table(0.75, 1.0, 1.0, samples);
}

TEST_CASE("eval_f point values") {
  auto cubic = ReactionSpec::cubic(0.75);
  CHECK(eval_f(cubic, 0.0) == 0.0);
  CHECK(eval_f(cubic, 0.75) == 0.0);
  CHECK(eval_f(cubic, 1.0) == 0.0);
  CHECK(eval_f(cubic, 0.5) == doctest::Approx(-0.0625).epsilon(1e-14));

  auto holder = ReactionSpec::holder(0.75, 0.5, 0.5);
  CHECK(eval_f(holder, 0.75) == 0.0);
  CHECK(eval_f(holder, 0.0) == 0.0);
  CHECK(eval_f(holder, 1.0) == 0.0);
  // extension: f(s) = -s below 0, 1-s above 1
  CHECK(eval_f(holder, -0.5) == doctest::Approx(0.5));
  CHECK(eval_f(holder, 1.5) == doctest::Approx(-0.5));
  // hand value: sqrt(0.25)*sqrt(0.75)*(0.25-0.75)
  CHECK(eval_f(holder, 0.25) ==
        doctest::Approx(std::sqrt(0.25) * std::sqrt(0.75) * -0.5).epsilon(1e-14));
}

TEST_CASE("eval_F oracles") {
  auto cubic = ReactionSpec::cubic(0.75);
  CHECK(eval_F(cubic, 0.0) == 0.0);
  CHECK(eval_F(cubic, 1.0) == doctest::Approx(-1.0 / 24.0).epsilon(1e-13));

  auto cubic_half = ReactionSpec::cubic(0.5);
  CHECK(std::abs(eval_F(cubic_half, 1.0)) < 1e-14); // balanced case: F(1)=0

  auto holder = ReactionSpec::holder(0.75, 0.5, 0.5);
  CHECK(eval_F(holder, 0.0) == 0.0);
  double F1_expected = beta_fn(2.5, 1.5) - 0.75 * beta_fn(1.5, 1.5); // = -pi/32
  CHECK(F1_expected == doctest::Approx(-M_PI / 32.0).epsilon(1e-13));
  CHECK(std::abs(eval_F(holder, 1.0) - F1_expected) < 1e-9);
  // interior value against the same Beta identity, via incomplete integrals:
  // F(r) = int_0^r s^1.5 (1-s)^0.5 ds - s0 * int_0^r s^0.5 (1-s)^0.5 ds;
  // compare against a dense Richardson-refined midpoint rule.
  double r = 0.6, acc = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    double s = (i + 0.5) * r / n;
    acc += std::sqrt(s) * std::sqrt(1.0 - s) * (s - 0.75);
  }
  acc *= r / n;
  CHECK(std::abs(eval_F(holder, r) - acc) < 1e-7);
}

TEST_CASE("check_hypotheses on the reference specs") {
  auto rep = check_hypotheses(ReactionSpec::cubic(0.75));
  CHECK(rep.h1_ok);
  CHECK(rep.ok());
  CHECK(rep.F1 == doctest::Approx(-1.0 / 24.0).epsilon(1e-12));
  // sup f' = f'(7/12) = 13/48; secant estimate sits just below it
  CHECK(rep.h3_L > 0.26);
  CHECK(rep.h3_L < 13.0 / 48.0 + 1e-9);
  CHECK(rep.h2_alpha_estimate == doctest::Approx(1.0).epsilon(0.05));
  REQUIRE(rep.h4.has_value());
  CHECK(rep.h4->mu_under > 0.0);
  CHECK(rep.h4->mu_over > 0.0);

  auto bad = check_hypotheses(ReactionSpec::cubic(0.5));
  CHECK_FALSE(bad.h1_ok);
  CHECK_FALSE(bad.ok());
  bool f1_flagged = false;
  for (const auto& v : bad.violations)
    if (v.hypothesis == "H1") f1_flagged = true;
  CHECK(f1_flagged);

  auto hrep = check_hypotheses(ReactionSpec::holder(0.75, 0.5, 0.5));
  CHECK(hrep.h1_ok);
  CHECK(hrep.ok());
  CHECK(hrep.h2_alpha_estimate == doctest::Approx(0.5).epsilon(0.1));
  CHECK(std::abs(hrep.h2_alpha_estimate - 0.5) < 0.05);
}

TEST_CASE("secant constants: reference families") {
  auto c = estimate_secant_constants(ReactionSpec::cubic(0.75), 0.05);
  CHECK(c.delta > 0.0);
  CHECK(c.delta < 0.05);
  CHECK(c.mu_under > 0.0);
  CHECK(c.mu_over > 0.0);

  auto h = estimate_secant_constants(ReactionSpec::holder(0.75, 0.5, 0.5), 0.05);
  CHECK(h.delta > 0.0);
  CHECK(h.mu_under > 0.0);
  CHECK(h.mu_over > 0.0);
}

TEST_CASE("secant constants: synthetic flat foot fails H4") {
  CHECK_THROWS_AS(estimate_secant_constants(flat_foot_table(), 0.05), HypothesisError);
}

TEST_CASE("secant constants: eta domain is enforced") {
  // eta must stay below min(s0, 1-s0)/3
  CHECK_THROWS_AS(estimate_secant_constants(ReactionSpec::cubic(0.75), 0.09), ConfigError);
}

TEST_CASE("property: sign pattern as a product inequality") {
  for (auto spec : {ReactionSpec::cubic(0.75), ReactionSpec::holder(0.75, 0.5, 0.5),
                    ReactionSpec::holder(0.6, 0.3, 0.8)}) {
    for (int i = 1; i < 400; ++i) {
      double s = i / 400.0;
      double prod = eval_f(spec, s) * (s - spec.s0);
      if (std::abs(s - spec.s0) < 1e-9)
        CHECK(std::abs(prod) < 1e-12);
      else
        CHECK(prod > 0.0);
    }
  }
}

TEST_CASE("property: F' = f by centered differences") {
  for (auto spec : {ReactionSpec::cubic(0.75), ReactionSpec::holder(0.75, 0.5, 0.5)}) {
    double h = 1e-4;
    for (double r : {0.2, 0.5, 0.75, 0.9}) {
      double fd = (eval_F(spec, r + h) - eval_F(spec, r - h)) / (2.0 * h);
      CHECK(std::abs(fd - eval_f(spec, r)) < 1e-6); // C h^2 + 2 quad_tol
    }
  }
}

TEST_CASE("property: one-sided Lipschitz certificate") {
  for (auto spec : {ReactionSpec::cubic(0.75), ReactionSpec::holder(0.75, 0.5, 0.5)}) {
    auto rep = check_hypotheses(spec, 1000);
    const int n = 500;
    std::vector<double> fv(n + 1);
    for (int i = 0; i <= n; ++i) fv[i] = eval_f(spec, static_cast<double>(i) / n);
    for (int i = 0; i <= n; ++i)
      for (int j = i + 1; j <= n; ++j) {
        double ds = static_cast<double>(j - i) / n;
        CHECK(fv[j] - fv[i] <= (rep.h3_L + 1e-12) * ds + 1e-12);
      }
  }
}

TEST_CASE("property: secant certificate on samples") {
  std::mt19937 rng(20240817);
  for (auto spec : {ReactionSpec::cubic(0.75), ReactionSpec::holder(0.75, 0.5, 0.5)}) {
    double eta = 0.05;
    auto sc = estimate_secant_constants(spec, eta);
    std::uniform_real_distribution<double> us(0.0, sc.delta);
    std::uniform_real_distribution<double> uq(1e-6, spec.s0 - 2.0 * eta);
    for (int k = 0; k < 20000; ++k) {
      double s = us(rng), q = uq(rng);
      CHECK(eval_f(spec, s) - eval_f(spec, s + q) >= sc.mu_under * q - 1e-12);
    }
    std::uniform_real_distribution<double> us2(1.0 - sc.delta, 1.0);
    std::uniform_real_distribution<double> uq2(1e-6, 1.0 - spec.s0 - 2.0 * eta);
    for (int k = 0; k < 20000; ++k) {
      double s = us2(rng), q = uq2(rng);
      CHECK(eval_f(spec, s - q) - eval_f(spec, s) >= sc.mu_over * q - 1e-12);
    }
  }
}
