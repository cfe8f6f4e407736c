#ifndef TRIPROD_HAAR_HPP
#define TRIPROD_HAAR_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <random>

#include "triprod/settings.hpp"

namespace triprod {

using Rng = std::mt19937_64;

/// Haar-distributed rotation in SO(d).
///
/// QR of a Gaussian matrix with the signs of R's diagonal folded into Q gives
/// a Haar element of O(d); one column flip moves det = -1 onto SO(d).
template <class Gen>
Eigen::MatrixXd haar_rotation(int d, Gen& gen) {
  if (d < 1) throw DomainError("haar_rotation: d must be >= 1");
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd z(d, d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) z(i, j) = normal(gen);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(z);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd& r = qr.matrixQR();
  for (int j = 0; j < d; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  if (q.determinant() < 0.0) q.col(0) = -q.col(0);
  return q;
}

}  // namespace triprod

#endif  // TRIPROD_HAAR_HPP
