#ifndef TRIPROD_LORENTZ_HPP
#define TRIPROD_LORENTZ_HPP

// Explicit matrix model of G = SO(d,1)^0 acting on R^{d+1} with the form
// J = diag(1,...,1,-1).  Index conventions (0-based):
//   * rows/cols 0..d-2 carry the SO(d-1) = M block,
//   * row/col d-1 is the spatial direction paired with the time direction d
//     by the A-subgroup.

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <complex>
#include <random>
#include <string>

#include "triprod/haar.hpp"
#include "triprod/settings.hpp"

namespace triprod {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using cplx = std::complex<double>;

/// Dimension tag for SO(d,1): n = d-1, rho(H) = n/2.
class Dimension {
 public:
  explicit Dimension(int d) : d_(d) {
    if (d < 2) throw DomainError("Dimension: d must be >= 2, got " + std::to_string(d));
  }
  int d() const { return d_; }
  int n() const { return d_ - 1; }
  double rho() const { return 0.5 * (d_ - 1); }
  /// Matrix size d+1.
  int size() const { return d_ + 1; }

  friend bool operator==(Dimension a, Dimension b) { return a.d_ == b.d_; }

 private:
  int d_;
};

inline Matrix j_metric(Dimension dim) {
  Matrix j = Matrix::Identity(dim.size(), dim.size());
  j(dim.d(), dim.d()) = -1.0;
  return j;
}

/// Largest entry of |m^T J m - J|.
inline double form_defect(const Matrix& m, Dimension dim) {
  const Matrix j = j_metric(dim);
  return (m.transpose() * j * m - j).cwiseAbs().maxCoeff();
}

/// Element of SO(d,1)^0.  Immutable; validated when built from a raw matrix.
class GroupElement {
 public:
  /// Validates m^T J m = J, det m = 1 and a positive time-time entry.
  static GroupElement from_matrix(Dimension dim, Matrix m) {
    const auto& s = settings();
    if (m.rows() != dim.size() || m.cols() != dim.size())
      throw InvalidElement("GroupElement: matrix must be (d+1)x(d+1)");
    if (!m.allFinite()) throw InvalidElement("GroupElement: non-finite entries");
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    const double defect = form_defect(m, dim);
    if (defect > s.group_tol * scale * scale)
      throw InvalidElement("GroupElement: m^T J m != J (defect " + std::to_string(defect) + ")");
    if (std::abs(m.determinant() - 1.0) > s.det_tol * std::pow(scale, dim.size()))
      throw InvalidElement("GroupElement: det != 1");
    if (m(dim.d(), dim.d()) <= 0.0)
      throw InvalidElement("GroupElement: not in the identity component");
    return GroupElement(dim, std::move(m));
  }

  static GroupElement identity(Dimension dim) {
    return GroupElement(dim, Matrix::Identity(dim.size(), dim.size()));
  }

  Dimension dim() const { return dim_; }
  const Matrix& matrix() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }

  /// Inverse via g^{-1} = J g^T J.
  GroupElement inverse() const {
    const Matrix j = j_metric(dim_);
    return GroupElement(dim_, j * m_.transpose() * j);
  }

  friend GroupElement operator*(const GroupElement& a, const GroupElement& b) {
    if (!(a.dim_ == b.dim_)) throw DomainError("GroupElement: dimension mismatch in product");
    return GroupElement(a.dim_, a.m_ * b.m_);
  }

 private:
  GroupElement(Dimension dim, Matrix m) : dim_(dim), m_(std::move(m)) {}

  friend GroupElement make_a(double, Dimension);
  friend GroupElement make_n(const Vector&, Dimension);
  friend GroupElement weyl_w0(Dimension);
  friend GroupElement embed_k(const Matrix&, Dimension);

  Dimension dim_;
  Matrix m_;
};

/// ANK factors: g = make_a(t) * make_n(x) * embed_k(k).
struct IwasawaFactors {
  double t = 0.0;
  Vector x;
  Matrix k;
};

/// Generator H of Lie(A).
inline Matrix lie_h(Dimension dim) {
  const int m = dim.d() - 1, d = dim.d();
  Matrix h = Matrix::Zero(dim.size(), dim.size());
  h(m, d) = 1.0;
  h(d, m) = 1.0;
  return h;
}

inline GroupElement make_a(double t, Dimension dim) {
  if (!std::isfinite(t)) throw DomainError("make_a: t must be finite");
  const int m = dim.d() - 1, d = dim.d();
  Matrix g = Matrix::Identity(dim.size(), dim.size());
  g(m, m) = g(d, d) = std::cosh(t);
  g(m, d) = g(d, m) = std::sinh(t);
  return GroupElement(dim, std::move(g));
}

inline GroupElement make_n(const Vector& x, Dimension dim) {
  const int m = dim.d() - 1, d = dim.d();
  if (x.size() != m)
    throw DomainError("make_n: x must have length d-1 = " + std::to_string(m));
  const double s = 0.5 * x.squaredNorm();
  Matrix g = Matrix::Identity(dim.size(), dim.size());
  for (int i = 0; i < m; ++i) {
    g(i, m) = -x(i);
    g(i, d) = x(i);
    g(m, i) = x(i);
    g(d, i) = x(i);
  }
  g(m, m) = 1.0 - s;
  g(m, d) = s;
  g(d, m) = -s;
  g(d, d) = 1.0 + s;
  return GroupElement(dim, std::move(g));
}

/// Weyl representative diag(1,...,1,-1,-1,1).
inline GroupElement weyl_w0(Dimension dim) {
  Matrix g = Matrix::Identity(dim.size(), dim.size());
  g(dim.d() - 2, dim.d() - 2) = -1.0;
  g(dim.d() - 1, dim.d() - 1) = -1.0;
  return GroupElement(dim, std::move(g));
}

/// Largest entry of |R^T R - I|.
inline double orthogonality_defect(const Matrix& r) {
  return (r.transpose() * r - Matrix::Identity(r.cols(), r.cols())).cwiseAbs().maxCoeff();
}

inline GroupElement embed_k(const Matrix& r, Dimension dim) {
  const auto& s = settings();
  if (r.rows() != dim.d() || r.cols() != dim.d())
    throw DomainError("embed_k: rotation must be d x d");
  if (orthogonality_defect(r) > s.orthogonality_tol)
    throw DomainError("embed_k: matrix is not orthogonal");
  if (std::abs(r.determinant() - 1.0) > s.det_tol)
    throw DomainError("embed_k: determinant is not 1");
  Matrix g = Matrix::Identity(dim.size(), dim.size());
  g.topLeftCorner(dim.d(), dim.d()) = r;
  return GroupElement(dim, std::move(g));
}

namespace detail {

// A-coordinate from the last column b of g and its corner entry.  With
// s = |x|^2/2 one has corner + b_d = e^t (1 + |x|^2) and corner - b_d = e^{-t};
// each form is used on the side where it avoids cancellation.
inline double a_coordinate(const Matrix& g, int d) {
  const double corner = g(d, d);
  const double bd = g(d - 1, d);
  if (bd >= 0.0) {
    const double x2 = g.col(d).head(d - 1).squaredNorm();
    return std::log(corner + bd) - std::log1p(x2);
  }
  return -std::log(corner - bd);
}

}  // namespace detail

/// A-coordinate t(g) from the entry formula e^t = (corner + b_d) / (1 + b_1^2 + ... + b_{d-1}^2).
inline double a_coordinate_entry_formula(const GroupElement& g) {
  const int d = g.dim().d();
  const Matrix& m = g.matrix();
  return std::log((m(d, d) + m(d - 1, d)) / (1.0 + m.col(d).head(d - 1).squaredNorm()));
}

/// ANK factorization.  The rotation block is recovered as (a n)^{-1} g and checked.
inline IwasawaFactors iwasawa(const GroupElement& g) {
  const Dimension dim = g.dim();
  const int d = dim.d();
  const Matrix& m = g.matrix();
  IwasawaFactors f;
  f.t = detail::a_coordinate(m, d);
  f.x = m.col(d).head(d - 1);
  const Matrix an_inv = make_n(-f.x, dim).matrix() * make_a(-f.t, dim).matrix();
  const Matrix kfull = an_inv * m;
  f.k = kfull.topLeftCorner(d, d);
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double tol = 1e2 * settings().roundtrip_tol * scale * scale;
  const double off = std::max(kfull.col(d).head(d).cwiseAbs().maxCoeff(),
                              kfull.row(d).head(d).cwiseAbs().maxCoeff());
  if (off > tol || std::abs(kfull(d, d) - 1.0) > tol || orthogonality_defect(f.k) > tol)
    throw InvalidElement("iwasawa: K-factor is not a rotation; input violates group invariants");
  // Snap to the nearest rotation (polar factor) to drop the O(eps |g|^2) drift.
  Eigen::JacobiSVD<Matrix> svd(f.k, Eigen::ComputeFullU | Eigen::ComputeFullV);
  f.k = svd.matrixU() * svd.matrixV().transpose();
  return f;
}

inline GroupElement reassemble(const IwasawaFactors& f, Dimension dim) {
  return make_a(f.t, dim) * make_n(f.x, dim) * GroupElement::from_matrix(dim, [&] {
           Matrix g = Matrix::Identity(dim.size(), dim.size());
           g.topLeftCorner(dim.d(), dim.d()) = f.k;
           return g;
         }());
}

/// exp(s * t(g)), t(g) the Iwasawa A-coordinate.
inline cplx a_power(const GroupElement& g, cplx s) {
  return std::exp(s * detail::a_coordinate(g.matrix(), g.dim().d()));
}

/// Right action k^y = K-factor of k y.
inline Matrix k_action(const Matrix& k, const GroupElement& y) {
  return iwasawa(embed_k(k, y.dim()) * y).k;
}

/// Class-one vector e_lambda(a n k) = a^{lambda + rho}.
inline cplx class_one(const GroupElement& g, cplx lam) {
  return a_power(g, lam + g.dim().rho());
}

/// Random element a(t) n(x) k with t ~ U(-2,2), x ~ N(0,I), k Haar.
template <class Gen>
GroupElement random_element(Dimension dim, Gen& gen) {
  std::uniform_real_distribution<double> uni(-2.0, 2.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double t = uni(gen);
  Vector x(dim.d() - 1);
  for (int i = 0; i < x.size(); ++i) x(i) = normal(gen);
  return make_a(t, dim) * make_n(x, dim) * embed_k(haar_rotation(dim.d(), gen), dim);
}

}  // namespace triprod

#endif  // TRIPROD_LORENTZ_HPP
