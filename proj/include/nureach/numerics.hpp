#pragma once

// Dense kernels for desk-scale systems: matrix exponential, clustered
// eigenvalues, SVD rank and truncated least-squares range membership.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "nureach/errors.hpp"

namespace nureach {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using RealRowVector = Eigen::RowVectorXd;

/// Largest supported system order.
inline constexpr int kMaxOrder = 12;

/// Entry magnitude above which an exponential is reported as out of range.
inline constexpr double kOverflowLimit = 1e300;

/// Tolerances shared by every analysis. All are relative.
struct Tolerances {
  double cluster = 1e-7;   // eigenvalue merge radius
  double rank = 1e-9;      // singular value cut-off relative to sigma_max
  double residual = 1e-9;  // least-squares membership residual
  double singular = 1e-9;  // mode-matrix singularity threshold on sigma_ratio
};

struct RankResult {
  int rank = 0;
  double sigma_ratio = 0.0;  // sigma_min / sigma_max, 0 for the zero matrix
};

struct Eigenvalue {
  Complex value;
  int multiplicity = 1;
};

struct RangeResult {
  bool member = false;
  double residual = 0.0;
  Vector coefficients;
};

namespace detail {

template <typename Derived>
double norm1(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().colwise().sum().maxCoeff();
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (!std::isfinite(std::abs(m(i, j)))) return false;
  return true;
}

template <typename Derived>
void require_square(const Eigen::MatrixBase<Derived>& m, const char* what) {
  if (m.rows() != m.cols())
    throw DimensionError(std::string(what) + ": expected a square matrix, got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
}

// Pade approximant numerators/denominators of degree 3..13 (Higham 2005).
template <typename MatrixType>
void pade_terms(const MatrixType& a, int degree, MatrixType& u, MatrixType& v) {
  using Scalar = typename MatrixType::Scalar;
  const Eigen::Index n = a.rows();
  const MatrixType id = MatrixType::Identity(n, n);
  const MatrixType a2 = a * a;
  switch (degree) {
    case 3: {
      static constexpr double c[] = {120., 60., 12., 1.};
      u = a * (Scalar(c[3]) * a2 + Scalar(c[1]) * id);
      v = Scalar(c[2]) * a2 + Scalar(c[0]) * id;
      return;
    }
    case 5: {
      static constexpr double c[] = {30240., 15120., 3360., 420., 30., 1.};
      const MatrixType a4 = a2 * a2;
      u = a * (Scalar(c[5]) * a4 + Scalar(c[3]) * a2 + Scalar(c[1]) * id);
      v = Scalar(c[4]) * a4 + Scalar(c[2]) * a2 + Scalar(c[0]) * id;
      return;
    }
    case 7: {
      static constexpr double c[] = {17297280., 8648640., 1995840., 277200.,
                                     25200.,    1512.,    56.,      1.};
      const MatrixType a4 = a2 * a2;
      const MatrixType a6 = a4 * a2;
      u = a * (Scalar(c[7]) * a6 + Scalar(c[5]) * a4 + Scalar(c[3]) * a2 + Scalar(c[1]) * id);
      v = Scalar(c[6]) * a6 + Scalar(c[4]) * a4 + Scalar(c[2]) * a2 + Scalar(c[0]) * id;
      return;
    }
    case 9: {
      static constexpr double c[] = {17643225600., 8821612800., 2075673600., 302702400., 30270240.,
                                     2162160.,     110880.,     3960.,       90.,        1.};
      const MatrixType a4 = a2 * a2;
      const MatrixType a6 = a4 * a2;
      const MatrixType a8 = a6 * a2;
      u = a * (Scalar(c[9]) * a8 + Scalar(c[7]) * a6 + Scalar(c[5]) * a4 + Scalar(c[3]) * a2 +
               Scalar(c[1]) * id);
      v = Scalar(c[8]) * a8 + Scalar(c[6]) * a6 + Scalar(c[4]) * a4 + Scalar(c[2]) * a2 +
          Scalar(c[0]) * id;
      return;
    }
    default: {
      static constexpr double c[] = {64764752532480000., 32382376266240000., 7771770303897600.,
                                     1187353796428800.,  129060195264000.,   10559470521600.,
                                     670442572800.,      33522128640.,       1323241920.,
                                     40840800.,          960960.,            16380.,
                                     182.,               1.};
      const MatrixType a4 = a2 * a2;
      const MatrixType a6 = a4 * a2;
      const MatrixType inner_u = Scalar(c[13]) * a6 + Scalar(c[11]) * a4 + Scalar(c[9]) * a2;
      u = a * (a6 * inner_u + Scalar(c[7]) * a6 + Scalar(c[5]) * a4 + Scalar(c[3]) * a2 +
               Scalar(c[1]) * id);
      const MatrixType inner_v = Scalar(c[12]) * a6 + Scalar(c[10]) * a4 + Scalar(c[8]) * a2;
      v = a6 * inner_v + Scalar(c[6]) * a6 + Scalar(c[4]) * a4 + Scalar(c[2]) * a2 +
          Scalar(c[0]) * id;
      return;
    }
  }
}

}  // namespace detail

/// exp(m * t) by scaling and squaring with a degree <= 13 Pade approximant.
///
/// Works for real and complex scalars. Throws DimensionError for a non-square
/// operand and NumericRangeError when an entry of the result exceeds
/// kOverflowLimit in magnitude.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> expm(
    const Eigen::MatrixBase<Derived>& m, double t) {
  using Scalar = typename Derived::Scalar;
  using MatrixType = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  detail::require_square(m, "expm");
  if (!std::isfinite(t)) throw InvalidArgument("expm: time argument is not finite");
  if (!detail::all_finite(m)) throw InvalidArgument("expm: matrix has non-finite entries");

  const Eigen::Index n = m.rows();
  if (n == 0) return MatrixType(0, 0);
  MatrixType a = m.eval() * Scalar(t);
  const double norm = detail::norm1(a);

  static constexpr double theta[] = {1.495585217958292e-2, 2.539398330063230e-1,
                                     9.504178996162932e-1, 2.097847961257068e0};
  static constexpr int degrees[] = {3, 5, 7, 9};
  MatrixType u;
  MatrixType v;
  int squarings = 0;
  bool done = false;
  for (int k = 0; k < 4 && !done; ++k) {
    if (norm <= theta[k]) {
      detail::pade_terms(a, degrees[k], u, v);
      done = true;
    }
  }
  if (!done) {
    constexpr double theta13 = 5.371920351148152;
    if (norm > theta13) {
      squarings = static_cast<int>(std::ceil(std::log2(norm / theta13)));
      a /= Scalar(std::ldexp(1.0, squarings));
    }
    detail::pade_terms(a, 13, u, v);
  }

  MatrixType result = (v - u).partialPivLu().solve(v + u);
  auto check = [](const MatrixType& r) {
    for (Eigen::Index j = 0; j < r.cols(); ++j)
      for (Eigen::Index i = 0; i < r.rows(); ++i) {
        const double mag = std::abs(r(i, j));
        if (!std::isfinite(mag) || mag > kOverflowLimit)
          throw NumericRangeError("expm: result entry exceeds numeric range");
      }
  };
  check(result);
  for (int s = 0; s < squarings; ++s) {
    result = (result * result).eval();
    check(result);
  }
  return result;
}

namespace detail {

inline bool canonical_less(const Complex& a, std::size_t ia, const Complex& b, std::size_t ib) {
  if (a.real() != b.real()) return a.real() < b.real();
  if (a.imag() != b.imag()) return a.imag() < b.imag();
  return ia < ib;
}

inline bool within(const Complex& a, const Complex& b, double tol) {
  return std::abs(a - b) <= tol * std::max(1.0, std::abs(a));
}

}  // namespace detail

/// Eigenvalues of a real matrix, greedily merged into clusters.
///
/// Two eigenvalues join the same cluster when they lie within
/// cluster_tol * max(1, |lambda|) of a member. A cluster is represented by
/// the mean of its members, which is far more accurate than any single
/// member when the cluster comes from a defective eigenvalue. The result is
/// sorted by (real, imag) ascending; conjugate pairs are made exact.
inline std::vector<Eigenvalue> eig_clustered(const RealMatrix& m, double cluster_tol = 1e-7) {
  detail::require_square(m, "eig_clustered");
  if (!detail::all_finite(m)) throw InvalidArgument("eig_clustered: matrix has non-finite entries");
  const Eigen::Index n = m.rows();
  if (n == 0) return {};

  Eigen::EigenSolver<RealMatrix> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success)
    throw NumericError("eig_clustered: eigenvalue iteration did not converge for a " +
                       std::to_string(n) + "x" + std::to_string(n) + " matrix (norm " +
                       std::to_string(m.norm()) + ")");
  const Vector raw = solver.eigenvalues();

  std::vector<std::size_t> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return detail::canonical_less(raw(i), i, raw(j), j);
  });

  struct Cluster {
    std::vector<Complex> members;
    std::size_t first_index;
    Complex mean;
  };
  std::vector<Cluster> clusters;
  for (std::size_t idx : order) {
    const Complex lambda = raw(static_cast<Eigen::Index>(idx));
    Cluster* target = nullptr;
    for (auto& c : clusters) {
      for (const auto& mem : c.members)
        if (detail::within(lambda, mem, cluster_tol)) {
          target = &c;
          break;
        }
      if (target) break;
    }
    if (target)
      target->members.push_back(lambda);
    else
      clusters.push_back({{lambda}, idx, {}});
  }

  for (auto& c : clusters) {
    Complex sum{0.0, 0.0};
    for (const auto& mem : c.members) sum += mem;
    c.mean = sum / static_cast<double>(c.members.size());
    if (std::abs(c.mean.imag()) <= cluster_tol * std::max(1.0, std::abs(c.mean)))
      c.mean = Complex(c.mean.real(), 0.0);
  }
  // A real matrix has a conjugate-closed spectrum; make the pairing exact so
  // the canonical order is stable.
  for (auto& upper : clusters) {
    if (upper.mean.imag() <= 0.0) continue;
    for (auto& lower : clusters) {
      if (lower.mean.imag() < 0.0 &&
          detail::within(std::conj(upper.mean), lower.mean, cluster_tol) &&
          lower.members.size() == upper.members.size()) {
        lower.mean = std::conj(upper.mean);
        break;
      }
    }
  }

  std::sort(clusters.begin(), clusters.end(), [](const Cluster& a, const Cluster& b) {
    return detail::canonical_less(a.mean, a.first_index, b.mean, b.first_index);
  });
  std::vector<Eigenvalue> out;
  out.reserve(clusters.size());
  for (const auto& c : clusters) out.push_back({c.mean, static_cast<int>(c.members.size())});
  return out;
}

/// Numerical rank: the number of singular values above rank_tol * sigma_max.
template <typename Derived>
RankResult numeric_rank(const Eigen::MatrixBase<Derived>& m, double rank_tol = 1e-9) {
  RankResult out;
  if (m.size() == 0) return out;
  using MatrixType = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Eigen::JacobiSVD<MatrixType> svd(m.eval());
  const auto& sigma = svd.singularValues();
  const double sigma_max = sigma(0);
  if (!(sigma_max > 0.0)) return out;
  for (Eigen::Index i = 0; i < sigma.size(); ++i)
    if (sigma(i) > rank_tol * sigma_max) ++out.rank;
  out.sigma_ratio = sigma(sigma.size() - 1) / sigma_max;
  return out;
}

/// Scales every nonzero column to unit Euclidean length.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> normalize_columns(
    const Eigen::MatrixBase<Derived>& m) {
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> out = m;
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    const double norm = out.col(j).norm();
    if (norm > 0.0) out.col(j) /= norm;
  }
  return out;
}

/// Least-squares membership of v in the column space of m.
///
/// The solve uses an SVD truncated at rank_tol * sigma_max so numerically
/// dependent columns do not inflate the range. Membership holds when the
/// residual is at most residual_tol * max(1, |v|).
template <typename DerivedM, typename DerivedV>
RangeResult in_range(const Eigen::MatrixBase<DerivedM>& m, const Eigen::MatrixBase<DerivedV>& v,
                     double residual_tol = 1e-9, double rank_tol = 1e-9) {
  if (v.cols() != 1 || v.rows() != m.rows())
    throw DimensionError("in_range: vector has " + std::to_string(v.rows()) +
                         " entries, matrix has " + std::to_string(m.rows()) + " rows");
  const Matrix mc = m.template cast<Complex>();
  const Vector vc = v.template cast<Complex>();
  RangeResult out;
  out.coefficients = Vector::Zero(mc.cols());
  if (mc.size() > 0) {
    Eigen::JacobiSVD<Matrix> svd(mc, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sigma = svd.singularValues();
    const double sigma_max = sigma.size() > 0 ? sigma(0) : 0.0;
    for (Eigen::Index i = 0; i < sigma.size(); ++i) {
      if (!(sigma(i) > rank_tol * sigma_max) || sigma_max == 0.0) break;
      const Complex proj = svd.matrixU().col(i).dot(vc);
      out.coefficients += svd.matrixV().col(i) * (proj / sigma(i));
    }
  }
  out.residual = mc.size() > 0 ? (mc * out.coefficients - vc).norm() : vc.norm();
  out.member = out.residual <= residual_tol * std::max(1.0, vc.norm());
  return out;
}

template <typename Derived>
Complex determinant(const Eigen::MatrixBase<Derived>& m) {
  detail::require_square(m, "determinant");
  if (m.rows() == 0) return {1.0, 0.0};
  return Complex(m.template cast<Complex>().partialPivLu().determinant());
}

}  // namespace nureach
