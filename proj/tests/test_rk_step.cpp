#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "stepbench/errors.hpp"
#include "stepbench/rk_step.hpp"

using namespace stepbench;

namespace {

const Rhs kZero = [](double, std::span<const double> y, std::span<double> d) {
  for (std::size_t i = 0; i < y.size(); ++i) d[i] = 0.0;
};

const Rhs kExp = [](double, std::span<const double> y, std::span<double> d) {
  d[0] = y[0];
};

}  // namespace

TEST_SUITE("rk_step") {

TEST_CASE("zero rhs keeps the state and produces zero eps") {
  const Vec y = {1.5, -2.0, 0.25};
  const StepOutcome out = embedded_step(kZero, 0.0, y, 1.0, {}, dp54_tableau());
  for (int i = 0; i < 3; ++i) {
    CHECK(out.y_high[i] == y[i]);
    CHECK(out.y_low[i] == y[i]);
    CHECK(out.eps_vec[i] == 0.0);
  }
  CHECK(out.evals == 7);
}

TEST_CASE("constant rhs advances by h*c exactly up to weight roundoff") {
  const Rhs f = [](double, std::span<const double>, std::span<double> d) {
    d[0] = 3.0;
    d[1] = -0.5;
  };
  const Vec y = {1.0, 2.0};
  const StepOutcome out = embedded_step(f, 0.0, y, 0.5, {}, dp54_tableau());
  CHECK(out.y_high[0] == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(out.y_high[1] == doctest::Approx(1.75).epsilon(1e-15));
  CHECK(std::abs(out.eps_vec[0]) <= 1e-15);
  CHECK(std::abs(out.eps_vec[1]) <= 1e-15);
}

TEST_CASE("exponential step matches e^h and the long-double oracle") {
  const Vec y = {1.0};
  const StepOutcome out = embedded_step(kExp, 0.0, y, 0.1, {}, dp54_tableau());
  CHECK(std::abs(out.y_high[0] - std::exp(0.1)) <= 1e-9);
  const double eps = std::abs(out.eps_vec[0]);
  CHECK(eps > 0.0);
  CHECK(eps < 1e-8);

  const auto ld = oracles::dp54_exponential_step(1.0L, 0.1L);
  CHECK(out.y_high[0] ==
        doctest::Approx(static_cast<double>(ld.y_high)).epsilon(1e-14));
  CHECK(eps == doctest::Approx(static_cast<double>(std::fabs(ld.eps)))
                   .epsilon(1e-4));
}

TEST_CASE("fsal bookkeeping: eval counts and k_last") {
  const Vec y = {1.0};
  Vec k1 = {1.0};  // f(0, 1) for y' = y
  const StepOutcome cold = embedded_step(kExp, 0.0, y, 0.1, {}, dp54_tableau());
  CHECK(cold.evals == 7);
  const StepOutcome warm = embedded_step(kExp, 0.0, y, 0.1, k1, dp54_tableau());
  CHECK(warm.evals == 6);
  CHECK(warm.y_high[0] == cold.y_high[0]);

  // k_last is exactly f(t + h, y_high)
  Vec expect(1);
  kExp(0.1, warm.y_high, expect);
  CHECK(warm.k_last[0] == expect[0]);
}

TEST_CASE("non-finite rhs output raises an evaluation error with context") {
  const Rhs bad = [](double t, std::span<const double>, std::span<double> d) {
    d[0] = t > 0.05 ? std::nan("") : 1.0;
  };
  const Vec y = {1.0};
  try {
    embedded_step(bad, 0.0, y, 0.2, {}, dp54_tableau());
    FAIL("expected an evaluation error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Evaluation);
    CHECK(std::string(e.what()).find("t=") != std::string::npos);
  }
}

TEST_CASE("observed local orders over a decade of h for y' = y cos t") {
  const Rhs f = [](double t, std::span<const double> y, std::span<double> d) {
    d[0] = y[0] * std::cos(t);
  };
  const Vec y = {1.0};
  std::vector<double> errs, epss;
  for (double h : {0.32, 0.16, 0.08, 0.04, 0.02}) {
    const StepOutcome out = embedded_step(f, 0.0, y, h, {}, dp54_tableau());
    errs.push_back(std::abs(out.y_high[0] - std::exp(std::sin(h))));
    epss.push_back(std::abs(out.eps_vec[0]));
  }
  for (std::size_t i = 0; i + 1 < errs.size(); ++i) {
    const double fac_err = errs[i] / errs[i + 1];
    const double fac_eps = epss[i] / epss[i + 1];
    CHECK(fac_err >= 32.0 * 0.7);
    CHECK(fac_err <= 64.0 * 1.4);
    CHECK(fac_eps >= 16.0 * 0.7);
    CHECK(fac_eps <= 32.0 * 1.4);
  }
}

TEST_CASE("linearity: superposition for a linear system") {
  const Rhs f = [](double, std::span<const double> y, std::span<double> d) {
    d[0] = 0.3 * y[0] - 1.2 * y[1];
    d[1] = 0.7 * y[0] + 0.1 * y[1];
  };
  const Vec y1 = {1.0, -0.5};
  const Vec y2 = {0.25, 2.0};
  const double alpha = 1.75;
  Vec combo(2);
  for (int i = 0; i < 2; ++i) combo[i] = y1[i] + alpha * y2[i];

  const auto tab = dp54_tableau();
  const StepOutcome o1 = embedded_step(f, 0.0, y1, 0.3, {}, tab);
  const StepOutcome o2 = embedded_step(f, 0.0, y2, 0.3, {}, tab);
  const StepOutcome oc = embedded_step(f, 0.0, combo, 0.3, {}, tab);
  for (int i = 0; i < 2; ++i) {
    const double expect = o1.y_high[i] + alpha * o2.y_high[i];
    CHECK(oc.y_high[i] == doctest::Approx(expect).epsilon(1e-12));
    const double expect_low = o1.y_low[i] + alpha * o2.y_low[i];
    CHECK(oc.y_low[i] == doctest::Approx(expect_low).epsilon(1e-12));
  }
}

TEST_CASE("eps_vec is exactly y_high - y_low") {
  const Rhs f = [](double t, std::span<const double> y, std::span<double> d) {
    d[0] = std::sin(t) - 0.5 * y[0];
  };
  const Vec y = {0.7};
  for (double h : {1e-3, 0.05, 0.4, 2.0}) {
    const StepOutcome out = embedded_step(f, 0.25, y, h, {}, dp54_tableau());
    CHECK(out.eps_vec[0] == out.y_high[0] - out.y_low[0]);
  }
}

}  // TEST_SUITE
