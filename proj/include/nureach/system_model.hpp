#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nureach/numerics.hpp"

namespace nureach {

/// Continuous-time SISO realization x' = A x + b u, y = c x.
class Realization {
 public:
  /// Validates shapes, order (1..kMaxOrder) and finiteness.
  static Realization make(RealMatrix a, RealVector b, RealRowVector c) {
    const Eigen::Index n = a.rows();
    if (a.cols() != n)
      throw DimensionError("realization: A must be square, got " + std::to_string(a.rows()) +
                           "x" + std::to_string(a.cols()));
    if (n < 1 || n > kMaxOrder)
      throw InvalidArgument("realization: order " + std::to_string(n) + " outside 1.." +
                            std::to_string(kMaxOrder));
    if (b.size() != n)
      throw DimensionError("realization: b has " + std::to_string(b.size()) +
                           " entries, expected " + std::to_string(n));
    if (c.size() != n)
      throw DimensionError("realization: c has " + std::to_string(c.size()) +
                           " entries, expected " + std::to_string(n));
    if (!a.allFinite() || !b.allFinite() || !c.allFinite())
      throw InvalidArgument("realization: non-finite entry");
    return Realization(std::move(a), std::move(b), std::move(c));
  }

  int order() const { return static_cast<int>(a_.rows()); }
  const RealMatrix& a() const { return a_; }
  const RealVector& b() const { return b_; }
  const RealRowVector& c() const { return c_; }

  /// (A', c', b'): swaps the roles of input and output.
  Realization dual() const {
    return Realization(a_.transpose(), c_.transpose(), b_.transpose());
  }

  /// (T A T^-1, T b, c T^-1).
  Realization transformed(const RealMatrix& t) const {
    const RealMatrix t_inv = t.inverse();
    return make(t * a_ * t_inv, t * b_, c_ * t_inv);
  }

 private:
  Realization(RealMatrix a, RealVector b, RealRowVector c)
      : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)) {}

  RealMatrix a_;
  RealVector b_;
  RealRowVector c_;
};

struct MinimalityReport {
  bool controllable_ct = false;
  bool observable_ct = false;
  bool minimal = false;
  RankResult controllability;
  RankResult observability;
};

/// Kalman rank tests on [b, Ab, ...] and [c; cA; ...].
inline MinimalityReport check_minimal(const Realization& r, double rank_tol = 1e-9) {
  const int n = r.order();
  RealMatrix ctrb(n, n);
  RealMatrix obsv(n, n);
  RealVector col = r.b();
  RealRowVector row = r.c();
  for (int k = 0; k < n; ++k) {
    ctrb.col(k) = col;
    obsv.row(k) = row;
    col = r.a() * col;
    row = row * r.a();
  }
  MinimalityReport out;
  out.controllability = numeric_rank(ctrb, rank_tol);
  out.observability = numeric_rank(obsv, rank_tol);
  out.controllable_ct = out.controllability.rank == n;
  out.observable_ct = out.observability.rank == n;
  out.minimal = out.controllable_ct && out.observable_ct;
  return out;
}

/// Position of a characteristic mode t^power * exp(lambda_block * t).
struct ModeIndex {
  int block = 0;
  int power = 0;
};

/// Distinct eigenvalues with multiplicities, in canonical order. Mode i
/// enumerates blocks in order and powers 0..m-1 within a block.
class ModeSet {
 public:
  explicit ModeSet(std::vector<Eigenvalue> roots) : roots_(std::move(roots)) {
    for (const auto& r : roots_) {
      offsets_.push_back(order_);
      order_ += r.multiplicity;
    }
  }

  const std::vector<Eigenvalue>& roots() const { return roots_; }
  int distinct() const { return static_cast<int>(roots_.size()); }
  int order() const { return order_; }
  int block_offset(int block) const { return offsets_.at(static_cast<std::size_t>(block)); }
  int multiplicity(int block) const {
    return roots_.at(static_cast<std::size_t>(block)).multiplicity;
  }
  Complex eigenvalue(int block) const { return roots_.at(static_cast<std::size_t>(block)).value; }

  ModeIndex mode(int i) const {
    if (i < 0 || i >= order_)
      throw InvalidArgument("mode index " + std::to_string(i) + " outside 0.." +
                            std::to_string(order_ - 1));
    int block = 0;
    while (block + 1 < distinct() && offsets_[static_cast<std::size_t>(block) + 1] <= i) ++block;
    return {block, i - offsets_[static_cast<std::size_t>(block)]};
  }

 private:
  std::vector<Eigenvalue> roots_;
  std::vector<int> offsets_;
  int order_ = 0;
};

inline ModeSet mode_set(const Realization& r, double cluster_tol = 1e-7) {
  return ModeSet(eig_clustered(r.a(), cluster_tol));
}

/// phi_i(t) = t^k exp(lambda_j t) for mode i = (j, k); zero-based i.
inline Complex eval_mode(int i, const ModeSet& modes, double t) {
  const ModeIndex idx = modes.mode(i);
  const Complex e = std::exp(modes.eigenvalue(idx.block) * t);
  if (idx.power == 0) return e;
  return std::pow(t, idx.power) * e;
}

struct ModalDecomposition {
  Matrix jordan;   // J, one Jordan block per distinct eigenvalue
  Matrix basis;    // B, A = B J B^-1
  Vector y0;       // B^-1 b
  Vector weights;  // the weighting coefficients C_i, read off y0
  double basis_sigma_ratio = 0.0;
  double reconstruction_error = 0.0;  // |A - B J B^-1|_F
  std::vector<std::string> warnings;
};

namespace detail {

inline std::string describe(const MinimalityReport& m, int n) {
  std::string why;
  if (!m.controllable_ct)
    why += "controllability rank " + std::to_string(m.controllability.rank) + " < " +
           std::to_string(n);
  if (!m.observable_ct) {
    if (!why.empty()) why += ", ";
    why += "observability rank " + std::to_string(m.observability.rank) + " < " +
           std::to_string(n);
  }
  return "realization is not minimal: " + why;
}

}  // namespace detail

inline void require_minimal(const Realization& r, double rank_tol = 1e-9) {
  const MinimalityReport m = check_minimal(r, rank_tol);
  if (!m.minimal) throw MinimalityError(detail::describe(m, r.order()));
}

/// Jordan form, change of basis and y0 = B^-1 b, assuming A is cyclic
/// (one Jordan block per distinct eigenvalue). Not checked; prefer
/// modal_decompose, which requires a minimal realization.
///
/// The chain v_1, ..., v_m solves (A - lambda I) v_{k+1} = v_k with the rank
/// n-1 pseudo-inverse of (A - lambda I). v_1 has unit length and its largest
/// entry is real positive.
inline ModalDecomposition modal_decompose_cyclic(const Realization& r, const ModeSet& modes) {
  const int n = r.order();
  if (modes.order() != n)
    throw DimensionError("modal_decompose: mode set order " + std::to_string(modes.order()) +
                         " does not match realization order " + std::to_string(n));
  ModalDecomposition out;
  out.jordan = Matrix::Zero(n, n);
  out.basis = Matrix::Zero(n, n);
  const Matrix a = r.a().cast<Complex>();

  for (int j = 0; j < modes.distinct(); ++j) {
    const Complex lambda = modes.eigenvalue(j);
    const int m = modes.multiplicity(j);
    const int offset = modes.block_offset(j);
    const Matrix shifted = a - lambda * Matrix::Identity(n, n);
    Eigen::JacobiSVD<Matrix> svd(shifted, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Vector v = svd.matrixV().col(n - 1);
    Eigen::Index lead = 0;
    v.cwiseAbs().maxCoeff(&lead);
    v *= std::abs(v(lead)) / v(lead);
    for (int k = 0; k < m; ++k) {
      out.basis.col(offset + k) = v;
      out.jordan(offset + k, offset + k) = lambda;
      if (k + 1 < m) {
        out.jordan(offset + k, offset + k + 1) = 1.0;
        Vector next = Vector::Zero(n);
        for (int i = 0; i + 1 < n; ++i)
          next += svd.matrixV().col(i) *
                  (svd.matrixU().col(i).dot(v) / svd.singularValues()(i));
        v = next;
      }
    }
  }

  out.basis_sigma_ratio = numeric_rank(out.basis, 0.0).sigma_ratio;
  if (out.basis_sigma_ratio < 1e-10)
    out.warnings.push_back("change of basis is ill-conditioned (sigma ratio " +
                           std::to_string(out.basis_sigma_ratio) + ")");
  const auto lu = out.basis.fullPivLu();
  out.y0 = lu.solve(r.b().cast<Complex>());
  out.weights = out.y0;
  out.reconstruction_error = (a - out.basis * out.jordan * lu.inverse()).norm();
  return out;
}

/// Jordan form, change of basis and y0 = B^-1 b for a minimal realization.
///
/// A minimal SISO realization has a cyclic A, so each distinct eigenvalue
/// owns a single Jordan block whose size is the cluster multiplicity.
/// Throws MinimalityError otherwise.
inline ModalDecomposition modal_decompose(const Realization& r, const ModeSet& modes,
                                          double rank_tol = 1e-9) {
  require_minimal(r, rank_tol);
  return modal_decompose_cyclic(r, modes);
}

inline ModalDecomposition modal_decompose(const Realization& r, const Tolerances& tol = {}) {
  require_minimal(r, tol.rank);
  return modal_decompose(r, mode_set(r, tol.cluster), tol.rank);
}

/// True iff the trailing y0 component of every Jordan block is nonzero
/// relative to |y0|.
inline bool check_y0_components(const ModalDecomposition& d, const ModeSet& modes,
                                double tol = 1e-9) {
  const double scale = d.y0.norm();
  if (scale == 0.0) return false;
  for (int j = 0; j < modes.distinct(); ++j) {
    const int last = modes.block_offset(j) + modes.multiplicity(j) - 1;
    if (!(std::abs(d.y0(last)) > tol * scale)) return false;
  }
  return true;
}

/// h(t) = c exp(A t) b.
inline double impulse_response(const Realization& r, double t) {
  return (r.c() * expm(r.a(), t) * r.b())(0);
}

/// Coefficients of h(t) on the mode basis: h(t) = sum_i coeff_i phi_i(t).
///
/// With c~ = c B, the coefficient of t^k exp(lambda_j t) is
/// (1/k!) * sum_p c~_p y_{p+k} over the block of lambda_j.
inline Vector impulse_coefficients(const Realization& r, const ModalDecomposition& d,
                                   const ModeSet& modes) {
  const Eigen::RowVectorXcd c_modal = r.c().cast<Complex>() * d.basis;
  Vector out = Vector::Zero(modes.order());
  for (int j = 0; j < modes.distinct(); ++j) {
    const int m = modes.multiplicity(j);
    const int offset = modes.block_offset(j);
    double factorial = 1.0;
    for (int k = 0; k < m; ++k) {
      if (k > 0) factorial *= k;
      Complex sum{0.0, 0.0};
      for (int p = 0; p + k < m; ++p) sum += c_modal(offset + p) * d.y0(offset + p + k);
      out(offset + k) = sum / factorial;
    }
  }
  return out;
}

/// h(t) evaluated as a weighted sum of characteristic modes.
inline double impulse_response_modal(const Realization& r, const ModalDecomposition& d,
                                     const ModeSet& modes, double t) {
  const Vector coeff = impulse_coefficients(r, d, modes);
  Complex sum{0.0, 0.0};
  for (int i = 0; i < modes.order(); ++i) sum += coeff(i) * eval_mode(i, modes, t);
  return sum.real();
}

}  // namespace nureach
