#pragma once

// Direct rank tests on the sampled input matrix in the original state basis.
// Nothing here touches the modal decomposition, so agreement with the
// criterion is a genuine two-path check.

#include <string>

#include "nureach/criterion.hpp"
#include "nureach/numerics.hpp"
#include "nureach/system_model.hpp"

namespace nureach {

/// Which instant the columns G_i = exp(A (t_ref - t_i)) b are referred to.
enum class ReferenceInstant {
  kAuto,        // t_n when an (n+1)-th instant exists, else t_{n-1}
  kLastInput,   // t_{n-1}
  kNextInstant  // t_n; requires n+1 instants
};

struct ReachabilityMatrixResult {
  RealMatrix g;  // columns G_{n-1}, ..., G_0
  RankResult rank;
  double reference_instant = 0.0;
};

inline ReachabilityMatrixResult reachability_matrix(
    const Realization& r, const SamplingSchedule& s, double rank_tol = 1e-9,
    ReferenceInstant reference = ReferenceInstant::kAuto) {
  const int n = r.order();
  const auto count = static_cast<std::size_t>(n);
  if (s.size() < count)
    throw InsufficientScheduleError("reachability matrix needs " + std::to_string(n) +
                                    " instants, schedule has " + std::to_string(s.size()));
  bool next = reference == ReferenceInstant::kNextInstant ||
              (reference == ReferenceInstant::kAuto && s.size() > count);
  if (next && s.size() <= count)
    throw InsufficientScheduleError("reference instant t_n needs " + std::to_string(n + 1) +
                                    " instants");
  ReachabilityMatrixResult out;
  out.reference_instant = next ? s[count] : s[count - 1];
  out.g.resize(n, n);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t instant = count - 1 - i;
    out.g.col(static_cast<Eigen::Index>(i)) =
        expm(r.a(), out.reference_instant - s[instant]) * r.b();
  }
  out.rank = numeric_rank(out.g, rank_tol);
  return out;
}

inline bool reachable_direct(const Realization& r, const SamplingSchedule& s,
                             double rank_tol = 1e-9) {
  return reachability_matrix(r, s, rank_tol).rank.rank == r.order();
}

inline bool observable_direct(const Realization& r, const SamplingSchedule& s,
                              double rank_tol = 1e-9) {
  return reachable_direct(r.dual(), s, rank_tol);
}

/// exp(A t_n) x0 in the range of [G_{n-1}, ..., G_0] referred to t_n.
/// Time is measured from t_0, where x0 is the state.
inline RangeResult controllable_direct_detail(const Realization& r, const SamplingSchedule& s,
                                              const RealVector& x0, const Tolerances& tol = {}) {
  const int n = r.order();
  if (x0.size() != n)
    throw DimensionError("controllable_direct: x0 has " + std::to_string(x0.size()) +
                         " entries, expected " + std::to_string(n));
  if (s.size() < static_cast<std::size_t>(n) + 1)
    throw InsufficientScheduleError("controllability needs " + std::to_string(n + 1) +
                                    " instants, schedule has " + std::to_string(s.size()));
  const ReachabilityMatrixResult g =
      reachability_matrix(r, s.prefix(static_cast<std::size_t>(n) + 1), tol.rank,
                          ReferenceInstant::kNextInstant);
  RealVector free_motion = expm(r.a(), g.reference_instant - s.front()) * x0;
  if (const double norm = free_motion.norm(); norm > 0.0) free_motion /= norm;
  return in_range(normalize_columns(g.g), free_motion, tol.residual, tol.rank);
}

inline bool controllable_direct(const Realization& r, const SamplingSchedule& s,
                                const RealVector& x0, const Tolerances& tol = {}) {
  return controllable_direct_detail(r, s, x0, tol).member;
}

struct OracleReport {
  bool reachable = false;
  bool observable = false;
  bool criterion_reachable = false;
  bool criterion_observable = false;
  bool agrees_with_criterion = false;
  double criterion_sigma_ratio = 0.0;
  double reachability_sigma_ratio = 0.0;
  double observability_sigma_ratio = 0.0;
};

inline OracleReport cross_validate(const ModalAnalysis& an, const CriterionReport& verdict,
                                   const SamplingSchedule& s, const Tolerances& tol = {}) {
  OracleReport out;
  const auto reach = reachability_matrix(an.realization(), s, tol.rank);
  const auto obs = reachability_matrix(an.realization().dual(), s, tol.rank);
  const int n = an.order();
  out.reachable = reach.rank.rank == n;
  out.observable = obs.rank.rank == n;
  out.reachability_sigma_ratio = reach.rank.sigma_ratio;
  out.observability_sigma_ratio = obs.rank.sigma_ratio;
  out.criterion_reachable = verdict.reachable;
  out.criterion_observable = verdict.observable;
  out.criterion_sigma_ratio = verdict.sigma_ratio;
  out.agrees_with_criterion =
      out.reachable == verdict.reachable && out.observable == verdict.observable;
  return out;
}

inline OracleReport cross_validate(const Realization& r, const SamplingSchedule& s,
                                   const Tolerances& tol = {}) {
  const ModalAnalysis an(r, tol);
  return cross_validate(an, joint_verdict(an, s, tol), s, tol);
}

}  // namespace nureach
