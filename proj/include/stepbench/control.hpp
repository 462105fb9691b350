#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace stepbench {

enum class ControllerKind { New, Standard };

std::string to_string(ControllerKind kind);
ControllerKind controller_kind_from_string(std::string_view s);

/// Full controller state for one integration run.
///
/// kind New:      h_{n+1} = h_n (tau / (err h_n))^(1/(p+1)),  accept iff err h_n < sigma tau
/// kind Standard: h_{n+1} = h_n (tau / err)^(1/(p+1)),        accept iff err < sigma tau
/// Both are limited to lambda1 h_n <= h_{n+1} <= lambda2 h_n.
struct ControllerParams {
  ControllerKind kind = ControllerKind::Standard;
  double tau = 1e-6;     // tolerance, > 0
  double sigma = 1.2;    // acceptance slack, > 0
  double lambda1 = 0.5;  // minimum step ratio, in (0, 1]
  double lambda2 = 2.0;  // maximum step ratio, >= 1
  int order = 5;         // p, primary method order

  bool valid() const;
};

struct StepDecision {
  bool accept = false;
  double h_next = 0.0;
};

/// err below this is treated as zero: the proposal formulas divide by err,
/// and the zero-error case maps to maximal growth lambda2 * h_n.
inline constexpr double kErrFloor = 1e-300;

/// Raw (unclamped) step proposal.
double propose(const ControllerParams& params, double h_n, double err);

/// Limitation criterion L: min(max(h_raw, lambda1 h_n), lambda2 h_n).
double clamp(const ControllerParams& params, double h_n, double h_raw);

/// Acceptance criterion A (strict inequality).
bool accept(const ControllerParams& params, double h_n, double err);

/// accept() plus clamp(propose()). The same h_next rule applies to accepted
/// and rejected steps.
StepDecision decide(const ControllerParams& params, double h_n, double err);

/// A (sigma, lambda1, lambda2) triple, independent of controller kind.
struct ParamTriple {
  double sigma = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
};

/// Named parameter sets addressable by string id:
///   "new-opt" -> (6.70, 0.67, 5.00)   tuned for the new formula
///   "std-opt" -> (5.50, 0.26, 4.00)   tuned for the standard formula
///   "std-rec" -> (1.20, 0.50, 2.00)   the recommended standard set
ParamTriple named_param_set(std::string_view id);
const std::vector<std::string>& named_param_set_ids();

/// Controller template without tau (tau varies along a work-precision curve).
struct ControllerConfig {
  ControllerKind kind = ControllerKind::Standard;
  double sigma = 1.2;
  double lambda1 = 0.5;
  double lambda2 = 2.0;
  int order = 5;

  ControllerParams with_tau(double tau) const;
  /// Stable label, comma-free so it embeds in CSV fields.
  std::string label() const;
};

ControllerConfig make_config(ControllerKind kind, const ParamTriple& t);

}  // namespace stepbench
