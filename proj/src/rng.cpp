#include "alterego/rng.hpp"

#include <Eigen/Eigenvalues>

namespace alterego {

Mat matrix_sqrt_psd(const Mat& sigma) {
  Eigen::SelfAdjointEigenSolver<Mat> eig(0.5 * (sigma + sigma.transpose()));
  Vec values = eig.eigenvalues();
  for (int i = 0; i < values.size(); ++i)
    values[i] = values[i] > 0.0 ? std::sqrt(values[i]) : 0.0;
  return eig.eigenvectors() * values.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace alterego
