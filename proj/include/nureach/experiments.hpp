#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nureach/criterion.hpp"
#include "nureach/numerics.hpp"
#include "nureach/oracle.hpp"
#include "nureach/system_model.hpp"

namespace nureach {

/// Sampled states and outputs. states[0] is the initial state at t_0;
/// states[i] for i > 0 is the state arriving at t_i, before any impulse
/// applied there.
struct Trajectory {
  std::vector<double> instants;
  std::vector<RealVector> states;
  std::vector<double> outputs;
};

/// The schedule is not jointly reachable/observable; carries the verdict.
class SingularScheduleError : public Error {
 public:
  SingularScheduleError(const std::string& what, CriterionReport report)
      : Error(what), report_(std::move(report)) {}
  const CriterionReport& report() const { return report_; }

 private:
  CriterionReport report_;
};

namespace detail {

inline void check_simulation_args(const Realization& r, const SamplingSchedule& s,
                                  std::span<const double> inputs, const RealVector& x0) {
  if (inputs.size() + 1 != s.size())
    throw DimensionError("simulation: " + std::to_string(inputs.size()) + " inputs for " +
                         std::to_string(s.size()) + " instants (expected one fewer)");
  if (x0.size() != r.order())
    throw DimensionError("simulation: x0 has " + std::to_string(x0.size()) +
                         " entries, expected " + std::to_string(r.order()));
  for (double u : inputs)
    if (!std::isfinite(u)) throw InvalidArgument("simulation: non-finite input");
}

inline Trajectory start_trajectory(const Realization& r, const SamplingSchedule& s,
                                   const RealVector& x0) {
  Trajectory out;
  out.instants.assign(s.instants().begin(), s.instants().end());
  out.states.push_back(x0);
  out.outputs.push_back(r.c().dot(x0));
  return out;
}

}  // namespace detail

/// Impulse inputs: u_i at t_i makes the state jump by b u_i, then the
/// system evolves freely until t_{i+1}.
inline Trajectory simulate_impulse(const Realization& r, const SamplingSchedule& s,
                                   std::span<const double> inputs, const RealVector& x0) {
  detail::check_simulation_args(r, s, inputs, x0);
  Trajectory out = detail::start_trajectory(r, s, x0);
  RealVector x = x0;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    x = expm(r.a(), s[i + 1] - s[i]) * (x + r.b() * inputs[i]);
    out.states.push_back(x);
    out.outputs.push_back(r.c().dot(x));
  }
  return out;
}

/// Zero-order hold: u(t) = u_i on [t_i, t_{i+1}). The input integral comes
/// from the exponential of the augmented matrix [[A, b], [0, 0]].
inline Trajectory simulate_zoh(const Realization& r, const SamplingSchedule& s,
                               std::span<const double> inputs, const RealVector& x0) {
  detail::check_simulation_args(r, s, inputs, x0);
  const int n = r.order();
  RealMatrix augmented = RealMatrix::Zero(n + 1, n + 1);
  augmented.topLeftCorner(n, n) = r.a();
  augmented.topRightCorner(n, 1) = r.b();
  Trajectory out = detail::start_trajectory(r, s, x0);
  RealVector x = x0;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    const RealMatrix e = expm(augmented, s[i + 1] - s[i]);
    x = e.topLeftCorner(n, n) * x + e.topRightCorner(n, 1) * inputs[i];
    out.states.push_back(x);
    out.outputs.push_back(r.c().dot(x));
  }
  return out;
}

/// Input-to-state matrix of the zero-order-hold discretization, columns
/// ordered like the impulse matrix [G_{n-1}, ..., G_0] and referred to t_ref.
inline RealMatrix zoh_input_matrix(const Realization& r, const SamplingSchedule& s,
                                   double reference_instant) {
  const int n = r.order();
  if (s.size() < static_cast<std::size_t>(n))
    throw InsufficientScheduleError("zoh_input_matrix: need " + std::to_string(n) + " instants");
  RealMatrix augmented = RealMatrix::Zero(n + 1, n + 1);
  augmented.topLeftCorner(n, n) = r.a();
  augmented.topRightCorner(n, 1) = r.b();
  RealMatrix out(n, n);
  for (int col = 0; col < n; ++col) {
    const auto i = static_cast<std::size_t>(n - 1 - col);
    const double hold_end = i + 1 < s.size() ? s[i + 1] : reference_instant;
    const RealMatrix e = expm(augmented, hold_end - s[i]);
    out.col(col) = expm(r.a(), reference_instant - hold_end) * e.topRightCorner(n, 1);
  }
  return out;
}

/// Deadbeat inputs u_0..u_{n-1} at the n schedule instants that drive x0
/// (state at t_0) to target at final_time > t_{n-1}.
///
/// When final_time is omitted it defaults to t_{n-1} plus the mean spacing
/// of the schedule (1 second for a single instant).
inline std::vector<double> deadbeat_inputs(const Realization& r, const SamplingSchedule& s,
                                           const RealVector& x0, const RealVector& target,
                                           std::optional<double> final_time = std::nullopt,
                                           const Tolerances& tol = {}) {
  const int n = r.order();
  const auto count = static_cast<std::size_t>(n);
  if (s.size() < count)
    throw InsufficientScheduleError("deadbeat needs " + std::to_string(n) +
                                    " input instants, schedule has " + std::to_string(s.size()));
  if (x0.size() != n || target.size() != n)
    throw DimensionError("deadbeat: x0 and target must have " + std::to_string(n) + " entries");
  const SamplingSchedule inputs_at = s.prefix(count);
  const double last = inputs_at.back();
  const double tn = final_time.value_or(
      count > 1 ? last + (last - inputs_at.front()) / static_cast<double>(count - 1) : last + 1.0);
  if (!(tn > last))
    throw InvalidArgument("deadbeat: final time must follow the last input instant");

  const ModalAnalysis an(r, tol);
  CriterionReport verdict = joint_verdict(an, inputs_at, tol);
  if (!verdict.reachable)
    throw SingularScheduleError("deadbeat: schedule is not n-reachable (sigma ratio " +
                                    std::to_string(verdict.sigma_ratio) + ")",
                                std::move(verdict));

  std::vector<double> with_final(inputs_at.instants().begin(), inputs_at.instants().end());
  with_final.push_back(tn);
  const auto g = reachability_matrix(r, SamplingSchedule::make(with_final), tol.rank,
                                     ReferenceInstant::kNextInstant);
  const RealVector rhs = target - expm(r.a(), tn - inputs_at.front()) * x0;
  const RealVector stacked = g.g.colPivHouseholderQr().solve(rhs);  // (u_{n-1}, ..., u_0)
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = stacked(static_cast<Eigen::Index>(count - 1 - i));
  return out;
}

/// Initial state (at t_0) from free-response outputs y(t_0), ..., y(t_{n-1}).
inline RealVector reconstruct_state(const Realization& r, const SamplingSchedule& s,
                                    std::span<const double> outputs, const Tolerances& tol = {}) {
  const int n = r.order();
  const auto count = static_cast<std::size_t>(n);
  if (s.size() < count)
    throw InsufficientScheduleError("reconstruction needs " + std::to_string(n) +
                                    " instants, schedule has " + std::to_string(s.size()));
  if (outputs.size() != count)
    throw DimensionError("reconstruction: " + std::to_string(outputs.size()) +
                         " outputs, expected " + std::to_string(n));
  const SamplingSchedule used = s.prefix(count);
  const ModalAnalysis an(r, tol);
  CriterionReport verdict = joint_verdict(an, used, tol);
  if (!verdict.observable)
    throw SingularScheduleError("reconstruction: schedule is not n-observable (sigma ratio " +
                                    std::to_string(verdict.sigma_ratio) + ")",
                                std::move(verdict));
  RealMatrix rows(n, n);
  RealVector y(n);
  for (std::size_t i = 0; i < count; ++i) {
    rows.row(static_cast<Eigen::Index>(i)) = r.c() * expm(r.a(), used[i] - used.front());
    y(static_cast<Eigen::Index>(i)) = outputs[i];
  }
  const RankResult rank = numeric_rank(rows, tol.rank);
  if (rank.rank < n)
    throw SingularScheduleError("reconstruction: sampled output matrix is rank " +
                                    std::to_string(rank.rank) + " < " + std::to_string(n),
                                std::move(verdict));
  return rows.colPivHouseholderQr().solve(y);
}

enum class Case { kA, kB, kC };

inline char to_char(Case c) { return c == Case::kA ? 'a' : c == Case::kB ? 'b' : 'c'; }

/// Relationship among the mode-space vectors of three successive instants.
struct CaseLabel {
  Case label = Case::kA;
  Vector y0;  // at alpha_0
  Vector y1;  // at alpha_1
  Vector y2;  // at alpha_2 = t_2 - t_0
  double sigma_ratio = 0.0;                 // normalized mode matrix of (t_0, t_1)
  std::optional<double> membership_residual;  // Y2 against span{Y0}, when dependent
};

/// Case a: Y0, Y1 independent. Case b: dependent and Y2 in span{Y0}.
/// Case c: dependent and Y2 outside span{Y0}.
inline CaseLabel classify_case(const Realization& r, const SamplingSchedule& s,
                               const Tolerances& tol = {}) {
  if (r.order() != 2)
    throw UnsupportedOrderError("classify_case: order " + std::to_string(r.order()) +
                                " given, only order 2 is supported");
  if (s.size() < 3)
    throw InsufficientScheduleError("classify_case needs 3 instants, schedule has " +
                                    std::to_string(s.size()));
  const ModalAnalysis an(r, tol);
  const SamplingSchedule three = s.prefix(3);
  const CriterionReport verdict = joint_verdict(an, three, tol);
  const ShiftedIntervals& iv = verdict.intervals;
  const double alphas[] = {iv.alpha[0], iv.alpha[1], *iv.alpha_n};
  const Matrix y = mode_space_vectors(an.decomposition(), alphas);

  CaseLabel out;
  out.y0 = y.col(0);
  out.y1 = y.col(1);
  out.y2 = y.col(2);
  out.sigma_ratio = verdict.sigma_ratio;
  if (verdict.reachable) {
    out.label = Case::kA;
    return out;
  }
  Vector target = out.y2;
  if (const double norm = target.norm(); norm > 0.0) target /= norm;
  const RangeResult rr = in_range(normalize_columns(Matrix(out.y0)), target, tol.residual, tol.rank);
  out.membership_residual = rr.residual;
  out.label = rr.member ? Case::kB : Case::kC;
  return out;
}

}  // namespace nureach
