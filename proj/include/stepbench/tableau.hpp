#pragma once

#include <string>
#include <vector>

#include "stepbench/types.hpp"

namespace stepbench {

/// Butcher coefficients of an explicit embedded pair of orders (p, q = p-1).
/// Rows of `a` are stored full-length with zeros on and above the diagonal.
struct EmbeddedTableau {
  int stages = 0;
  std::vector<std::vector<double>> a;  // stages x stages, strictly lower triangular
  std::vector<double> b;               // order-p weights
  std::vector<double> b_hat;           // order-q weights
  std::vector<double> c;               // stage abscissae
  int p = 0;
  int q = 0;
  bool fsal = false;
};

struct TableauCheck {
  std::string name;
  bool passed = false;
  double residual = 0.0;  // |measured - expected|
};

struct ValidationReport {
  std::vector<TableauCheck> checks;

  bool all_passed() const {
    for (const auto& c : checks) {
      if (!c.passed) return false;
    }
    return true;
  }
};

/// The Dormand-Prince 5(4) pair: 7 stages, FSAL, coefficients transcribed as
/// exact rationals and converted once to double.
const EmbeddedTableau& dp54_tableau();

/// Checks consistency sums, the row-sum condition c_i = sum_j a_ij, order
/// conditions through order 3 for both weight vectors, q = p - 1, and the
/// FSAL row identity. Throws ErrorKind::Structural on dimension mismatch.
ValidationReport validate_tableau(const EmbeddedTableau& tab);

}  // namespace stepbench
