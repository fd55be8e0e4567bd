#pragma once

#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "so3cubic/so3cubic.hpp"

namespace so3cubic::testing {

/// R^T R = I and det R = 1 within tol.
inline ::testing::AssertionResult IsRotation(const Matrix3& r, double tol = 1e-10) {
  const double orth = (r.transpose() * r - Matrix3::Identity()).cwiseAbs().maxCoeff();
  const double det = std::abs(r.determinant() - 1.0);
  if (orth <= tol && det <= tol) return ::testing::AssertionSuccess();
  return ::testing::AssertionFailure() << "orthogonality defect " << orth << ", determinant defect " << det;
}

template <typename A, typename B>
::testing::AssertionResult Near(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b, double tol) {
  const double err = (a - b).cwiseAbs().maxCoeff();
  if (err <= tol) return ::testing::AssertionSuccess();
  return ::testing::AssertionFailure() << "max entry difference " << err << " > " << tol << "\nfirst:\n"
                                       << a << "\nsecond:\n"
                                       << b;
}

}  // namespace so3cubic::testing
