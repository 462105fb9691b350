#include "stepbench/control.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "stepbench/errors.hpp"

namespace stepbench {

std::string to_string(ControllerKind kind) {
  return kind == ControllerKind::New ? "new" : "standard";
}

ControllerKind controller_kind_from_string(std::string_view s) {
  if (s == "new") return ControllerKind::New;
  if (s == "standard") return ControllerKind::Standard;
  raise(ErrorKind::UnknownId,
        "unknown controller '" + std::string(s) + "' (valid: new, standard)");
}

bool ControllerParams::valid() const {
  return tau > 0.0 && sigma > 0.0 && lambda1 > 0.0 && lambda1 <= 1.0 &&
         lambda2 >= 1.0 && order >= 1;
}

double propose(const ControllerParams& params, double h_n, double err) {
  if (err < kErrFloor) return params.lambda2 * h_n;
  const double inv = 1.0 / static_cast<double>(params.order + 1);
  if (params.kind == ControllerKind::New) {
    return h_n * std::pow(params.tau / (err * h_n), inv);
  }
  return h_n * std::pow(params.tau / err, inv);
}

double clamp(const ControllerParams& params, double h_n, double h_raw) {
  return std::min(std::max(h_raw, params.lambda1 * h_n), params.lambda2 * h_n);
}

bool accept(const ControllerParams& params, double h_n, double err) {
  if (params.kind == ControllerKind::New) {
    return err * h_n < params.sigma * params.tau;
  }
  return err < params.sigma * params.tau;
}

StepDecision decide(const ControllerParams& params, double h_n, double err) {
  return {accept(params, h_n, err), clamp(params, h_n, propose(params, h_n, err))};
}

ParamTriple named_param_set(std::string_view id) {
  if (id == "new-opt") return {6.70, 0.67, 5.00};
  if (id == "std-opt") return {5.50, 0.26, 4.00};
  if (id == "std-rec") return {1.20, 0.50, 2.00};
  raise(ErrorKind::UnknownId, "unknown parameter set '" + std::string(id) +
                                       "' (valid: new-opt, std-opt, std-rec)");
}

const std::vector<std::string>& named_param_set_ids() {
  static const std::vector<std::string> ids = {"new-opt", "std-opt", "std-rec"};
  return ids;
}

ControllerParams ControllerConfig::with_tau(double tau) const {
  return {kind, tau, sigma, lambda1, lambda2, order};
}

std::string ControllerConfig::label() const {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%s(sigma=%.17g lambda1=%.17g lambda2=%.17g)",
                to_string(kind).c_str(), sigma, lambda1, lambda2);
  return buf;
}

ControllerConfig make_config(ControllerKind kind, const ParamTriple& t) {
  return {kind, t.sigma, t.lambda1, t.lambda2, 5};
}

}  // namespace stepbench
