#include <doctest.h>

#include <cmath>

#include "stepbench/errors.hpp"
#include "stepbench/tableau.hpp"

using namespace stepbench;

TEST_SUITE("tableau") {

TEST_CASE("dp54 structure") {
  const EmbeddedTableau& t = dp54_tableau();
  CHECK(t.stages == 7);
  CHECK(t.p == 5);
  CHECK(t.q == 4);
  CHECK(t.fsal);
  CHECK(t.c[0] == 0.0);
  CHECK(t.c[6] == 1.0);
}

TEST_CASE("dp54 weights sum to one") {
  const EmbeddedTableau& t = dp54_tableau();
  double sb = 0.0, sbh = 0.0;
  for (int i = 0; i < 7; ++i) {
    sb += t.b[i];
    sbh += t.b_hat[i];
  }
  CHECK(std::abs(sb - 1.0) <= 1e-15);
  CHECK(std::abs(sbh - 1.0) <= 1e-15);
}

TEST_CASE("dp54 passes validation") {
  const ValidationReport r = validate_tableau(dp54_tableau());
  for (const auto& c : r.checks) {
    INFO(c.name, " residual=", c.residual);
    CHECK(c.passed);
  }
  CHECK(r.all_passed());
  CHECK(r.checks.size() >= 10);
}

TEST_CASE("scaled weights fail the consistency check") {
  EmbeddedTableau t = dp54_tableau();
  for (auto& w : t.b) w *= 0.5;
  t.fsal = false;  // isolate the consistency failure
  const ValidationReport r = validate_tableau(t);
  CHECK_FALSE(r.all_passed());
  bool consistency_failed = false;
  for (const auto& c : r.checks) {
    if (c.name == "consistency sum(b) = 1") consistency_failed = !c.passed;
  }
  CHECK(consistency_failed);
}

TEST_CASE("perturbed coupling coefficient fails the row-sum check") {
  EmbeddedTableau t = dp54_tableau();
  t.a[3][1] += 1e-3;
  const ValidationReport r = validate_tableau(t);
  bool rowsum_failed = false;
  for (const auto& c : r.checks) {
    if (c.name == "row sums c_i = sum_j a_ij") rowsum_failed = !c.passed;
  }
  CHECK(rowsum_failed);
}

TEST_CASE("dimension mismatch raises a structural error") {
  EmbeddedTableau t = dp54_tableau();
  t.b.pop_back();
  CHECK_THROWS_AS(validate_tableau(t), Error);
  try {
    validate_tableau(t);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Structural);
  }
}

}  // TEST_SUITE
