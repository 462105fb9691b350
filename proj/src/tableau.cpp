#include "stepbench/tableau.hpp"

#include <cmath>
#include <cstddef>

#include "stepbench/errors.hpp"

namespace stepbench {

namespace {

EmbeddedTableau make_dp54() {
  EmbeddedTableau t;
  t.stages = 7;
  t.p = 5;
  t.q = 4;
  t.fsal = true;

  t.c = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};

  t.a.assign(7, std::vector<double>(7, 0.0));
  t.a[1][0] = 1.0 / 5;
  t.a[2][0] = 3.0 / 40;
  t.a[2][1] = 9.0 / 40;
  t.a[3][0] = 44.0 / 45;
  t.a[3][1] = -56.0 / 15;
  t.a[3][2] = 32.0 / 9;
  t.a[4][0] = 19372.0 / 6561;
  t.a[4][1] = -25360.0 / 2187;
  t.a[4][2] = 64448.0 / 6561;
  t.a[4][3] = -212.0 / 729;
  t.a[5][0] = 9017.0 / 3168;
  t.a[5][1] = -355.0 / 33;
  t.a[5][2] = 46732.0 / 5247;
  t.a[5][3] = 49.0 / 176;
  t.a[5][4] = -5103.0 / 18656;
  t.a[6][0] = 35.0 / 384;
  t.a[6][1] = 0.0;
  t.a[6][2] = 500.0 / 1113;
  t.a[6][3] = 125.0 / 192;
  t.a[6][4] = -2187.0 / 6784;
  t.a[6][5] = 11.0 / 84;

  t.b = {35.0 / 384,     0.0,        500.0 / 1113, 125.0 / 192,
         -2187.0 / 6784, 11.0 / 84,  0.0};
  t.b_hat = {5179.0 / 57600,    0.0,          7571.0 / 16695, 393.0 / 640,
             -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};
  return t;
}

void push_check(ValidationReport& r, const std::string& name, double measured,
                double expected, double tol) {
  const double res = std::abs(measured - expected);
  r.checks.push_back({name, res <= tol, res});
}

}  // namespace

const EmbeddedTableau& dp54_tableau() {
  static const EmbeddedTableau tab = make_dp54();
  return tab;
}

ValidationReport validate_tableau(const EmbeddedTableau& tab) {
  const std::size_t s = static_cast<std::size_t>(tab.stages);
  if (tab.stages <= 0 || tab.a.size() != s || tab.b.size() != s ||
      tab.b_hat.size() != s || tab.c.size() != s) {
    raise(ErrorKind::Structural, "tableau dimensions inconsistent");
  }
  for (const auto& row : tab.a) {
    if (row.size() != s) {
      raise(ErrorKind::Structural, "tableau a-row length mismatch");
    }
  }

  constexpr double kTol = 1e-14;
  ValidationReport r;

  double sum_b = 0.0, sum_bh = 0.0;
  for (std::size_t i = 0; i < s; ++i) {
    sum_b += tab.b[i];
    sum_bh += tab.b_hat[i];
  }
  push_check(r, "consistency sum(b) = 1", sum_b, 1.0, kTol);
  push_check(r, "consistency sum(b_hat) = 1", sum_bh, 1.0, kTol);

  double row_res = 0.0;
  for (std::size_t i = 0; i < s; ++i) {
    double rs = 0.0;
    for (std::size_t j = 0; j < s; ++j) rs += tab.a[i][j];
    row_res = std::max(row_res, std::abs(rs - tab.c[i]));
  }
  r.checks.push_back({"row sums c_i = sum_j a_ij", row_res <= kTol, row_res});

  r.checks.push_back({"q = p - 1", tab.q == tab.p - 1,
                      static_cast<double>(tab.q - (tab.p - 1))});

  // Order conditions through order 3 for both weight vectors.
  const auto order_conditions = [&](const std::vector<double>& w,
                                    const std::string& tag) {
    double bc = 0.0, bc2 = 0.0, bac = 0.0;
    for (std::size_t i = 0; i < s; ++i) {
      bc += w[i] * tab.c[i];
      bc2 += w[i] * tab.c[i] * tab.c[i];
      for (std::size_t j = 0; j < s; ++j) {
        bac += w[i] * tab.a[i][j] * tab.c[j];
      }
    }
    push_check(r, tag + " sum(w c) = 1/2", bc, 0.5, kTol);
    push_check(r, tag + " sum(w c^2) = 1/3", bc2, 1.0 / 3.0, kTol);
    push_check(r, tag + " sum(w A c) = 1/6", bac, 1.0 / 6.0, kTol);
  };
  order_conditions(tab.b, "b");
  order_conditions(tab.b_hat, "b_hat");

  if (tab.fsal) {
    double res = 0.0;
    for (std::size_t j = 0; j < s; ++j) {
      res = std::max(res, std::abs(tab.a[s - 1][j] - tab.b[j]));
    }
    r.checks.push_back({"FSAL last a-row equals b", res <= kTol, res});
  }

  return r;
}

}  // namespace stepbench
