#ifndef TRIPROD_ORBIT_HPP
#define TRIPROD_ORBIT_HPP

// Orbit structure of the diagonal G-action on (P\G)^3 for G = SO(d,1)^0.
// Open orbits correspond to open AM-orbits of the adjoint action on n_R,
// which is computed here with explicit so(d,1) matrices.

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "triprod/lorentz.hpp"

namespace triprod {

struct AdjointRankReport {
  int d = 0;
  int tangent_rank = 0;
  int dim_n = 0;
  bool open_orbit_exists = false;
  int open_orbit_count = 0;
  int samples = 0;  // unit vectors used to count orbits
};

/// Basis vector X_j of n_R: derivative of make_n at 0 along e_j.
inline Matrix lie_n(int j, Dimension dim) {
  const int m = dim.d() - 1, d = dim.d();
  Matrix x = Matrix::Zero(dim.size(), dim.size());
  x(j, m) = -1.0;
  x(j, d) = 1.0;
  x(m, j) = 1.0;
  x(d, j) = 1.0;
  return x;
}

inline Matrix lie_n(const Vector& coords, Dimension dim) {
  Matrix x = Matrix::Zero(dim.size(), dim.size());
  for (int j = 0; j < coords.size(); ++j) x += coords(j) * lie_n(j, dim);
  return x;
}

/// Basis of Lie(M) = so(d-1), acting on rows/cols 0..d-2.
inline std::vector<Matrix> lie_m_basis(Dimension dim) {
  std::vector<Matrix> basis;
  const int m = dim.d() - 1;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      Matrix z = Matrix::Zero(dim.size(), dim.size());
      z(i, j) = 1.0;
      z(j, i) = -1.0;
      basis.push_back(std::move(z));
    }
  return basis;
}

/// Coordinates of an element of n_R (the x-parameters); throws if y is not in n_R.
inline Vector n_coordinates(const Matrix& y, Dimension dim) {
  const int m = dim.d() - 1;
  Vector c(m);
  for (int j = 0; j < m; ++j) c(j) = y(dim.d(), j);
  const double residual = (y - lie_n(c, dim)).cwiseAbs().maxCoeff();
  if (residual > 1e-12 * std::max(1.0, y.cwiseAbs().maxCoeff()))
    throw Error("n_coordinates: matrix does not lie in n_R");
  return c;
}

/// Rank of {[Z, X0] : Z in Lie(A) + Lie(M)} inside n_R.
inline int am_tangent_rank(int d, const Vector& x0) {
  const Dimension dim(d);
  if (x0.size() != d - 1) throw DomainError("am_tangent_rank: X0 must have length d-1");
  const double norm = x0.norm();
  if (!(norm > 0.0)) throw DomainError("am_tangent_rank: X0 must be nonzero");
  const Matrix x = lie_n(Vector(x0 / norm), dim);

  std::vector<Matrix> gens = lie_m_basis(dim);
  gens.insert(gens.begin(), lie_h(dim));
  Matrix span(d - 1, static_cast<Eigen::Index>(gens.size()));
  for (std::size_t i = 0; i < gens.size(); ++i) {
    const Matrix bracket = gens[i] * x - x * gens[i];
    span.col(static_cast<Eigen::Index>(i)) = n_coordinates(bracket, dim);
  }
  Eigen::JacobiSVD<Matrix> svd(span);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > settings().rank_threshold) ++rank;
  return rank;
}

namespace detail {

// Is there m in M = SO(d-1) with m u = v for unit vectors u, v?  For d-1 >= 2
// the candidate is the rotation in span(u, v) taking u to v, checked to lie
// in SO(d-1); for d-1 = 1 the group is trivial.
inline bool m_reachable(const Vector& u, const Vector& v) {
  const auto k = u.size();
  if (k == 1) return std::abs(u(0) - v(0)) < 1e-12;
  const double c = std::clamp(u.dot(v), -1.0, 1.0);
  Vector w = v - c * u;
  Matrix rot = Matrix::Identity(k, k);
  if (w.norm() < 1e-12) {
    if (c > 0) return true;
    // Antipodal: rotate by pi in a plane containing u.
    Vector e = Vector::Zero(k);
    Eigen::Index idx = 0;
    u.cwiseAbs().minCoeff(&idx);
    e(idx) = 1.0;
    w = e - e.dot(u) * u;
    w.normalize();
    rot += -2.0 * (u * u.transpose() + w * w.transpose());
  } else {
    w.normalize();
    const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    rot += (c - 1.0) * (u * u.transpose() + w * w.transpose()) + s * (w * u.transpose() - u * w.transpose());
  }
  const bool in_so = orthogonality_defect(rot) < 1e-10 && std::abs(rot.determinant() - 1.0) < 1e-10;
  return in_so && (rot * u - v).norm() < 1e-10;
}

}  // namespace detail

/// Open-orbit report.  The count is the number of AM-orbits met by sampled unit
/// vectors of n_R (positive scaling is absorbed by normalizing).
inline AdjointRankReport open_orbit_count(int d, std::uint64_t seed = 20240601, int samples = 64) {
  if (d < 2) throw DomainError("open_orbit_count: d must be >= 2");
  AdjointRankReport rep;
  rep.d = d;
  rep.dim_n = d - 1;
  rep.samples = samples;

  Rng gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Vector> pts;
  Vector e1 = Vector::Zero(d - 1);
  e1(0) = 1.0;
  pts.push_back(e1);
  pts.push_back(-e1);
  while (static_cast<int>(pts.size()) < samples) {
    Vector v(d - 1);
    for (int i = 0; i < v.size(); ++i) v(i) = normal(gen);
    if (v.norm() > 1e-8) pts.push_back(v.normalized());
  }

  Vector generic(d - 1);
  for (int i = 0; i < generic.size(); ++i) generic(i) = normal(gen);
  rep.tangent_rank = am_tangent_rank(d, generic);
  rep.open_orbit_exists = rep.tangent_rank == rep.dim_n;

  std::vector<std::size_t> parent(pts.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      if (find(i) != find(j) && detail::m_reachable(pts[i], pts[j])) parent[find(j)] = find(i);
  int classes = 0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (find(i) == i) ++classes;
  rep.open_orbit_count = rep.open_orbit_exists ? classes : 0;
  return rep;
}

}  // namespace triprod

#endif  // TRIPROD_ORBIT_HPP
