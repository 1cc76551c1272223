#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "nureach/criterion.hpp"
#include "nureach/numerics.hpp"
#include "nureach/system_model.hpp"

namespace nureach {

struct ForbiddenInstant {
  long k = 0;
  double t = 0.0;
  bool degenerate = false;  // k = 0, i.e. t_0 itself
};

/// Instants t_0 + k pi / b (k >= 0) at which a second sample would make an
/// oscillatory order-2 system lose reachability and observability.
struct ForbiddenSet {
  double base_instant = 0.0;
  double frequency = 0.0;  // b of the eigenvalue pair a +/- jb
  double period = 0.0;     // pi / b
  std::vector<ForbiddenInstant> forbidden;
  double guard_band = 0.0;  // half-width around a forbidden instant where the verdict is false
};

namespace detail {

inline double oscillation_frequency(const ModeSet& modes) {
  if (modes.order() != 2)
    throw UnsupportedOrderError("forbidden instants are only derived for order 2, got order " +
                                std::to_string(modes.order()));
  if (modes.distinct() == 2 && modes.eigenvalue(0).imag() != 0.0)
    return std::abs(modes.eigenvalue(0).imag());
  if (modes.distinct() == 2)
    throw NotApplicableError("no forbidden instants: real distinct eigenvalues");
  throw NotApplicableError("no forbidden instants: real repeated eigenvalue");
}

}  // namespace detail

/// Forbidden instants inside the closed window [lo, hi], plus the empirical
/// guard band found by bisecting the verdict next to the k = 1 instant.
inline ForbiddenSet forbidden_instants_order2(const Realization& r, double t0, double lo,
                                              double hi, const Tolerances& tol = {}) {
  if (!std::isfinite(t0) || !std::isfinite(lo) || !std::isfinite(hi) || hi < lo)
    throw InvalidArgument("forbidden_instants_order2: invalid base instant or window");
  const ModalAnalysis an(r, tol);
  ForbiddenSet out;
  out.base_instant = t0;
  out.frequency = detail::oscillation_frequency(an.modes());
  out.period = std::numbers::pi / out.frequency;

  const double slack = 1e-12 * std::max({1.0, std::abs(lo), std::abs(hi)});
  const long first = std::max(0L, static_cast<long>(std::ceil((lo - t0 - slack) / out.period)));
  const long last = static_cast<long>(std::floor((hi - t0 + slack) / out.period));
  for (long k = first; k <= last; ++k)
    out.forbidden.push_back({k, t0 + static_cast<double>(k) * out.period, k == 0});

  auto reachable_at = [&](double offset) {
    const auto s = SamplingSchedule::make({t0, t0 + out.period + offset});
    return joint_verdict(an, s, tol).reachable;
  };
  double bad = 0.0;
  double good = out.period / 2.0;
  if (reachable_at(bad)) {
    out.guard_band = 0.0;
  } else {
    for (int it = 0; it < 200 && good - bad > 1e-15 * out.period; ++it) {
      const double mid = 0.5 * (bad + good);
      (reachable_at(mid) ? good : bad) = mid;
    }
    out.guard_band = good;
  }
  return out;
}

/// A complex eigenvalue pair whose rotation over one interval lands close
/// to a multiple of pi.
struct AliasingNote {
  double frequency = 0.0;
  long k = 0;
  double distance = 0.0;  // |b T - k pi|
};

struct UniformVerdict {
  bool passed = false;
  std::vector<double> instants;
  CriterionReport report;                        // first window
  std::optional<std::size_t> first_failing_window;  // start index of the first failing n-window
  std::vector<AliasingNote> aliasing;
};

/// Joint verdict on the uniform schedule {0, T, ..., (horizon-1) T}; every
/// window of n consecutive instants is checked.
inline UniformVerdict validate_uniform(const Realization& r, double period, int horizon = 0,
                                       const Tolerances& tol = {}) {
  if (!(period > 0.0) || !std::isfinite(period))
    throw InvalidArgument("validate_uniform: sampling interval must be positive");
  const int n = r.order();
  if (horizon == 0) horizon = n;
  if (horizon < n)
    throw InsufficientScheduleError("validate_uniform: horizon " + std::to_string(horizon) +
                                    " shorter than order " + std::to_string(n));
  const ModalAnalysis an(r, tol);
  UniformVerdict out;
  for (int i = 0; i < horizon; ++i) out.instants.push_back(i * period);
  out.passed = true;
  for (int start = 0; start + n <= horizon; ++start) {
    const auto window = SamplingSchedule::make(std::vector<double>(
        out.instants.begin() + start, out.instants.begin() + start + n));
    const CriterionReport report = joint_verdict(an, window, tol);
    if (start == 0) out.report = report;
    if (!report.reachable && !out.first_failing_window) {
      out.first_failing_window = static_cast<std::size_t>(start);
      out.passed = false;
    }
  }
  for (const auto& root : an.modes().roots()) {
    if (!(root.value.imag() > 0.0)) continue;
    const double turn = root.value.imag() * period;
    const long k = std::lround(turn / std::numbers::pi);
    if (k >= 1)
      out.aliasing.push_back(
          {root.value.imag(), k, std::abs(turn - static_cast<double>(k) * std::numbers::pi)});
  }
  return out;
}

struct ScheduleSearchSpec {
  double t_min = 0.0;
  double t_max = 1.0;
  double min_spacing = 0.1;
  int count = 2;
};

struct ScheduleSuggestion {
  std::vector<double> instants;
  double objective = 0.0;  // worst normalized sigma ratio over n-instant windows
  double grid_step = 0.0;
};

/// Worst normalized mode-matrix sigma ratio over windows of n consecutive
/// instants.
inline double schedule_objective(const ModeSet& modes, std::span<const double> instants) {
  const auto n = static_cast<std::size_t>(modes.order());
  double worst = 1.0;
  std::vector<double> alpha(n);
  for (std::size_t start = 0; start + n <= instants.size(); ++start) {
    for (std::size_t m = 0; m < n; ++m)
      alpha[m] = instants[start + n - 1] - instants[start + n - 1 - m];
    worst = std::min(worst, normalized_sigma_ratio(mode_matrix(modes, alpha)));
  }
  return worst;
}

namespace detail {

// Number of ways to place `remaining` further grid indices after `last`,
// each at least `gap` beyond the previous and at most `top`.
inline double count_tuples(long last, long top, long gap, int remaining) {
  std::vector<double> ways(static_cast<std::size_t>(top + 1), 1.0);
  for (int r = 0; r < remaining; ++r) {
    std::vector<double> next(ways.size(), 0.0);
    double suffix = 0.0;
    for (long i = top; i >= 0; --i) {
      if (i + gap <= top) suffix += ways[static_cast<std::size_t>(i + gap)];
      next[static_cast<std::size_t>(i)] = suffix;
    }
    ways = std::move(next);
  }
  return last <= top ? ways[static_cast<std::size_t>(last)] : 0.0;
}

}  // namespace detail

/// Maximizes the schedule objective inside the window.
///
/// A grid search (step min_spacing / 4, coarsened while the tuple count
/// exceeds a fixed budget) with the first instant pinned to t_min, which
/// loses nothing because the objective depends only on differences. Ties
/// keep the lexicographically lowest schedule. Three coordinate refinement
/// passes follow with step halved each pass; the coordinate visiting order
/// is a permutation drawn from the seed.
inline ScheduleSuggestion suggest_schedule(const Realization& r, const ScheduleSearchSpec& spec,
                                           std::uint64_t seed = 0, const Tolerances& tol = {}) {
  const int n = r.order();
  if (!std::isfinite(spec.t_min) || !std::isfinite(spec.t_max) || spec.t_max < spec.t_min)
    throw InfeasibleError("suggest_schedule: window is empty or not finite");
  if (!(spec.min_spacing > 0.0)) throw InfeasibleError("suggest_schedule: min_spacing must be > 0");
  if (spec.count < n)
    throw InfeasibleError("suggest_schedule: count " + std::to_string(spec.count) +
                          " is below the system order " + std::to_string(n));
  const double span_needed = (spec.count - 1) * spec.min_spacing;
  if (spec.t_max - spec.t_min < span_needed * (1.0 - 1e-12))
    throw InfeasibleError("suggest_schedule: window shorter than (count-1) * min_spacing");

  const ModalAnalysis an(r, tol);
  const ModeSet& modes = an.modes();
  constexpr double kBudget = 200000.0;

  double step = spec.min_spacing / 4.0;
  long top = 0;
  long gap = 0;
  for (;;) {
    top = static_cast<long>(std::floor((spec.t_max - spec.t_min) / step + 1e-9));
    gap = static_cast<long>(std::ceil(spec.min_spacing / step - 1e-9));
    if (detail::count_tuples(0, top, gap, spec.count - 1) <= kBudget) break;
    step *= 2.0;
  }

  const auto count = static_cast<std::size_t>(spec.count);
  std::vector<long> idx(count, 0);
  std::vector<double> instants(count);
  std::vector<double> best;
  double best_value = -1.0;
  auto evaluate = [&] {
    for (std::size_t i = 0; i < count; ++i)
      instants[i] = spec.t_min + static_cast<double>(idx[i]) * step;
    const double value = schedule_objective(modes, instants);
    if (value > best_value) {
      best_value = value;
      best = instants;
    }
  };
  // Lexicographic enumeration of grid tuples with idx[0] = 0.
  auto recurse = [&](auto&& self, std::size_t pos) -> void {
    if (pos == count) {
      evaluate();
      return;
    }
    const long remaining = static_cast<long>(count - 1 - pos);
    for (long i = idx[pos - 1] + gap; i + remaining * gap <= top; ++i) {
      idx[pos] = i;
      self(self, pos + 1);
    }
  };
  if (count == 1)
    evaluate();
  else
    recurse(recurse, 1);

  std::mt19937_64 engine(seed);
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto feasible = [&](const std::vector<double>& s) {
    if (s.front() < spec.t_min || s.back() > spec.t_max) return false;
    for (std::size_t i = 1; i < s.size(); ++i)
      if (s[i] - s[i - 1] < spec.min_spacing * (1.0 - 1e-12)) return false;
    return true;
  };
  double refine_step = step;
  for (int pass = 0; pass < 3; ++pass) {
    refine_step /= 2.0;
    for (std::size_t i = count; i > 1; --i) std::swap(order[i - 1], order[engine() % i]);
    for (std::size_t coord : order) {
      for (double dir : {-1.0, 1.0}) {
        for (int moves = 0; moves < 16; ++moves) {
          std::vector<double> trial = best;
          trial[coord] += dir * refine_step;
          if (!feasible(trial)) break;
          const double value = schedule_objective(modes, trial);
          if (!(value > best_value)) break;
          best_value = value;
          best = std::move(trial);
        }
      }
    }
  }

  if (!(best_value > tol.singular))
    throw InfeasibleError("suggest_schedule: no nonsingular schedule found in the window (best "
                          "sigma ratio " + std::to_string(best_value) + ")");
  return {best, best_value, step};
}

}  // namespace nureach
