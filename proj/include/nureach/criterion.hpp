#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nureach/numerics.hpp"
#include "nureach/system_model.hpp"

namespace nureach {

/// Strictly increasing, finite sampling instants (seconds).
class SamplingSchedule {
 public:
  static SamplingSchedule make(std::vector<double> instants) {
    if (instants.empty()) throw InvalidArgument("schedule: at least one instant is required");
    for (std::size_t i = 0; i < instants.size(); ++i) {
      if (!std::isfinite(instants[i]))
        throw InvalidArgument("schedule: instant " + std::to_string(i) + " is not finite");
      if (i > 0 && !(instants[i] > instants[i - 1]))
        throw InvalidArgument("schedule: instants must be strictly increasing (index " +
                              std::to_string(i) + ")");
    }
    return SamplingSchedule(std::move(instants));
  }

  std::span<const double> instants() const { return instants_; }
  std::size_t size() const { return instants_.size(); }
  double operator[](std::size_t i) const { return instants_[i]; }
  double front() const { return instants_.front(); }
  double back() const { return instants_.back(); }

  SamplingSchedule shifted(double delta) const {
    std::vector<double> out = instants_;
    for (double& t : out) t += delta;
    return make(std::move(out));
  }

  /// The first `count` instants.
  SamplingSchedule prefix(std::size_t count) const {
    if (count > instants_.size() || count == 0)
      throw InsufficientScheduleError("schedule: cannot take " + std::to_string(count) +
                                      " of " + std::to_string(instants_.size()) + " instants");
    return SamplingSchedule(
        std::vector<double>(instants_.begin(), instants_.begin() + static_cast<long>(count)));
  }

 private:
  explicit SamplingSchedule(std::vector<double> instants) : instants_(std::move(instants)) {}
  std::vector<double> instants_;
};

/// alpha_m = t_{n-1} - t_{n-1-m} for m < n, and alpha_n = t_n - t_0 when an
/// (n+1)-th instant exists.
struct ShiftedIntervals {
  std::vector<double> alpha;
  std::optional<double> alpha_n;
};

inline ShiftedIntervals shifted_intervals(const SamplingSchedule& s, int n) {
  if (n < 1) throw InvalidArgument("shifted_intervals: order must be positive");
  const auto count = static_cast<std::size_t>(n);
  if (s.size() < count)
    throw InsufficientScheduleError("schedule has " + std::to_string(s.size()) +
                                    " instants, order " + std::to_string(n) + " needs " +
                                    std::to_string(n));
  ShiftedIntervals out;
  out.alpha.reserve(count);
  for (std::size_t m = 0; m < count; ++m) out.alpha.push_back(s[count - 1] - s[count - 1 - m]);
  if (s.size() > count) out.alpha_n = s[count] - s[0];
  return out;
}

/// Entry (m, i) = phi_i(alpha_m).
inline Matrix mode_matrix(const ModeSet& modes, std::span<const double> alpha) {
  const int n = modes.order();
  if (static_cast<int>(alpha.size()) != n)
    throw DimensionError("mode_matrix: " + std::to_string(alpha.size()) + " intervals for " +
                         std::to_string(n) + " modes");
  Matrix out(n, n);
  for (int m = 0; m < n; ++m)
    for (int i = 0; i < n; ++i) out(m, i) = eval_mode(i, modes, alpha[static_cast<std::size_t>(m)]);
  return out;
}

/// sigma_min / sigma_max after scaling each column to unit length.
inline double normalized_sigma_ratio(const Matrix& m) {
  return numeric_rank(normalize_columns(m), 0.0).sigma_ratio;
}

/// Product over blocks of 1/0! ... 1/(m_j - 1)!.
inline double factor_n1(const ModeSet& modes) {
  double out = 1.0;
  for (const auto& root : modes.roots()) {
    double factorial = 1.0;
    for (int k = 1; k < root.multiplicity; ++k) {
      factorial *= k;
      out /= factorial;
    }
  }
  return out;
}

/// Upper-left anti-triangular Hankel block of one Jordan block's y0 slice:
/// entry (p, q) = y_{p+q} (zero-based) while p + q < m.
inline Matrix hankel_block(const Vector& y, int offset, int m) {
  Matrix h = Matrix::Zero(m, m);
  for (int p = 0; p < m; ++p)
    for (int q = 0; p + q < m; ++q) h(p, q) = y(offset + p + q);
  return h;
}

/// Product of the block determinants built from y0.
inline Complex factor_n2(const ModalDecomposition& d, const ModeSet& modes) {
  Complex out{1.0, 0.0};
  for (int j = 0; j < modes.distinct(); ++j)
    out *= determinant(hankel_block(d.y0, modes.block_offset(j), modes.multiplicity(j)));
  return out;
}

/// Columns exp(J alpha_m) y0.
inline Matrix mode_space_vectors(const ModalDecomposition& d, std::span<const double> alpha) {
  Matrix out(d.y0.size(), static_cast<Eigen::Index>(alpha.size()));
  for (std::size_t m = 0; m < alpha.size(); ++m)
    out.col(static_cast<Eigen::Index>(m)) = expm(d.jordan, alpha[m]) * d.y0;
  return out;
}

inline Complex full_determinant(const ModalDecomposition& d, std::span<const double> alpha) {
  if (static_cast<Eigen::Index>(alpha.size()) != d.y0.size())
    throw DimensionError("full_determinant: " + std::to_string(alpha.size()) +
                         " intervals for order " + std::to_string(d.y0.size()));
  return determinant(mode_space_vectors(d, alpha));
}

struct ControllabilityResult {
  bool controllable = false;
  bool constructible = false;
  double residual = 0.0;  // relative to |Y(alpha_n)|
};

struct CriterionReport {
  ShiftedIntervals intervals;
  Complex mode_det;
  double sigma_ratio = 0.0;
  double n1 = 1.0;
  Complex n2;
  Complex full_det;
  double factorization_residual = 0.0;
  bool factorization_ok = false;
  bool reachable = false;
  bool observable = false;
  std::optional<bool> controllable;
  std::optional<bool> constructible;
  std::optional<double> controllability_residual;
  Tolerances tolerances;
};

/// Realization bundled with its minimality check, modes and decomposition.
/// Construction throws MinimalityError for a non-minimal realization.
class ModalAnalysis {
 public:
  explicit ModalAnalysis(Realization r, const Tolerances& tol = {})
      : realization_(std::move(r)),
        minimality_(check_minimal(realization_, tol.rank)),
        modes_(mode_set(realization_, tol.cluster)),
        decomposition_(decompose(realization_, minimality_, modes_, tol)) {}

  const Realization& realization() const { return realization_; }
  const MinimalityReport& minimality() const { return minimality_; }
  const ModeSet& modes() const { return modes_; }
  const ModalDecomposition& decomposition() const { return decomposition_; }
  int order() const { return realization_.order(); }

 private:
  static ModalDecomposition decompose(const Realization& r, const MinimalityReport& m,
                                      const ModeSet& modes, const Tolerances& tol) {
    if (!m.minimal) throw MinimalityError(detail::describe(m, r.order()));
    return modal_decompose(r, modes, tol.rank);
  }

  Realization realization_;
  MinimalityReport minimality_;
  ModeSet modes_;
  ModalDecomposition decomposition_;
};

/// Membership of exp(J alpha_n) y0 in the span of exp(J alpha_m) y0,
/// m = 0..n-1. Needs at least n+1 instants; the first n+1 are used.
inline ControllabilityResult controllability_verdict(const ModalAnalysis& an,
                                                     const SamplingSchedule& s,
                                                     const Tolerances& tol = {}) {
  const int n = an.order();
  if (s.size() < static_cast<std::size_t>(n) + 1)
    throw InsufficientScheduleError("controllability needs " + std::to_string(n + 1) +
                                    " instants, schedule has " + std::to_string(s.size()));
  const ShiftedIntervals iv = shifted_intervals(s, n);
  const Matrix span_vectors = normalize_columns(mode_space_vectors(an.decomposition(), iv.alpha));
  Vector target = expm(an.decomposition().jordan, *iv.alpha_n) * an.decomposition().y0;
  if (const double norm = target.norm(); norm > 0.0) target /= norm;
  const RangeResult rr = in_range(span_vectors, target, tol.residual, tol.rank);
  return {rr.member, rr.member, rr.residual};
}

inline ControllabilityResult controllability_verdict(const Realization& r,
                                                     const SamplingSchedule& s,
                                                     const Tolerances& tol = {}) {
  return controllability_verdict(ModalAnalysis(r, tol), s, tol);
}

/// Joint n-reachability / n-observability from the mode matrix over the
/// first n instants. Fills the controllability pair when n+1 instants exist.
inline CriterionReport joint_verdict(const ModalAnalysis& an, const SamplingSchedule& s,
                                     const Tolerances& tol = {}) {
  const int n = an.order();
  CriterionReport out;
  out.tolerances = tol;
  out.intervals = shifted_intervals(s, n);
  const Matrix phi = mode_matrix(an.modes(), out.intervals.alpha);
  out.mode_det = determinant(phi);
  out.sigma_ratio = normalized_sigma_ratio(phi);
  out.n1 = factor_n1(an.modes());
  out.n2 = factor_n2(an.decomposition(), an.modes());
  out.full_det = full_determinant(an.decomposition(), out.intervals.alpha);
  out.factorization_residual = std::abs(out.full_det - out.n1 * out.n2 * out.mode_det);
  out.factorization_ok =
      out.factorization_residual <= 1e-8 * std::max(1.0, std::abs(out.full_det));
  out.reachable = out.sigma_ratio > tol.singular;
  out.observable = out.reachable;
  if (out.intervals.alpha_n) {
    const ControllabilityResult cr = controllability_verdict(an, s, tol);
    out.controllable = cr.controllable;
    out.constructible = cr.constructible;
    out.controllability_residual = cr.residual;
  }
  return out;
}

inline CriterionReport joint_verdict(const Realization& r, const SamplingSchedule& s,
                                     const Tolerances& tol = {}) {
  return joint_verdict(ModalAnalysis(r, tol), s, tol);
}

}  // namespace nureach
