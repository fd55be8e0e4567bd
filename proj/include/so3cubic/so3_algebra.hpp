#pragma once

// so(3) is identified with E^3 through v -> ad(v) = v x (.), so brackets are
// cross products and the Euclidean inner product is ad-invariant. Matrices
// act on column vectors.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <concepts>

#include "so3cubic/errors.hpp"

namespace so3cubic {

using So3Vector = Eigen::Vector3d;
using Matrix3 = Eigen::Matrix3d;
/// A 3x3 matrix that is expected to be special orthogonal.
using Rotation = Eigen::Matrix3d;

inline constexpr double kPi = 3.14159265358979323846;

inline So3Vector bracket(const So3Vector& u, const So3Vector& v) { return u.cross(v); }

inline Matrix3 ad_matrix(const So3Vector& v) {
  Matrix3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

/// Matrix exponential of ad_matrix(v) by the Rodrigues formula.
inline Rotation rot_exp(const So3Vector& v) {
  const double theta2 = v.squaredNorm();
  double a;  // sin(theta)/theta
  double b;  // (1 - cos(theta))/theta^2
  if (theta2 < 1e-12) {
    // Series remainders are below double precision at this size.
    a = 1.0 - theta2 / 6.0 + theta2 * theta2 / 120.0;
    b = 0.5 - theta2 / 24.0 + theta2 * theta2 / 720.0;
  } else {
    const double theta = std::sqrt(theta2);
    a = std::sin(theta) / theta;
    const double half = std::sin(0.5 * theta) / theta;
    b = 2.0 * half * half;
  }
  const Matrix3 k = ad_matrix(v);
  return Matrix3::Identity() + a * k + b * k * k;
}

/// Clockwise rotation by r in the plane of the first two coordinates.
inline Rotation rotation_R(double r) {
  const double c = std::cos(r);
  const double s = std::sin(r);
  Rotation m;
  m << c, s, 0.0,
       -s, c, 0.0,
       0.0, 0.0, 1.0;
  return m;
}

/// Positively oriented orthonormal frame adapted to a nonzero D = d F0, with
/// [F0,F1] = F2 and [F2,F0] = F1.
struct Frame {
  So3Vector F0;
  So3Vector F1;
  So3Vector F2;
  double d = 1.0;

  So3Vector D() const { return d * F0; }

  /// Coordinates of v in the basis (F0, F1, F2).
  So3Vector coords(const So3Vector& v) const { return {F0.dot(v), F1.dot(v), F2.dot(v)}; }

  So3Vector from_coords(double x0, double x1, double x2) const { return x0 * F0 + x1 * F1 + x2 * F2; }
  So3Vector from_coords(const So3Vector& c) const { return from_coords(c.x(), c.y(), c.z()); }

  /// Columns F0, F1, F2: maps frame coordinates to standard coordinates.
  Matrix3 basis() const {
    Matrix3 m;
    m.col(0) = F0;
    m.col(1) = F1;
    m.col(2) = F2;
    return m;
  }

  /// Component of v orthogonal to F0.
  So3Vector perp(const So3Vector& v) const { return v - F0.dot(v) * F0; }

  /// The map i~ := ad(F0).
  Matrix3 i_tilde() const { return ad_matrix(F0); }
};

inline Frame frame_from_D(const So3Vector& D) {
  const double d = D.norm();
  if (!(d > 1e-12)) {
    throw Error(ErrorCode::ZeroDirection, "frame_from_D needs |D| > 1e-12");
  }
  Frame f;
  f.d = d;
  f.F0 = D / d;
  // Standard basis vector least aligned with F0; ties go to the lowest index.
  int best = 0;
  for (int i = 1; i < 3; ++i) {
    if (std::abs(f.F0[i]) < std::abs(f.F0[best])) best = i;
  }
  const So3Vector e = So3Vector::Unit(best);
  f.F1 = (e - f.F0.dot(e) * f.F0).normalized();
  f.F2 = f.F0.cross(f.F1);
  return f;
}

/// Largest deviation of a frame from its defining identities.
inline double frame_defect(const Frame& f) {
  const Matrix3 b = f.basis();
  double err = (b.transpose() * b - Matrix3::Identity()).cwiseAbs().maxCoeff();
  err = std::max(err, (bracket(f.F0, f.F1) - f.F2).cwiseAbs().maxCoeff());
  err = std::max(err, (bracket(f.F2, f.F0) - f.F1).cwiseAbs().maxCoeff());
  return err;
}

/// e~(t) = exp(-d (t - t0) ad(F0)) in standard coordinates.
inline Matrix3 tilde_e(const Frame& frame, double t, double t0) {
  return rot_exp(-frame.d * (t - t0) * frame.F0);
}

/// Matrix of a linear map on so(3) expressed in the frame basis.
inline Matrix3 in_frame_coordinates(const Frame& frame, const Matrix3& map) {
  const Matrix3 b = frame.basis();
  return b.transpose() * map * b;
}

/// Rows are, in order, the unit component of X2 orthogonal to X1, the unit
/// normal X1 x X2 / |X1 x X2|, and X1/|X1|.
inline Rotation frame_S(const So3Vector& X1, const So3Vector& X2) {
  const double n1sq = X1.squaredNorm();
  const double n2sq = X2.squaredNorm();
  const double inner = X1.dot(X2);
  const double gram = n1sq * n2sq - inner * inner;
  if (!(gram > 1e-12 * n1sq * n2sq) || !(n1sq > 0.0)) {
    throw Error(ErrorCode::DegenerateFrame, "frame_S arguments are (nearly) linearly dependent");
  }
  const double n1 = std::sqrt(n1sq);
  const double root = std::sqrt(gram);
  Rotation s;
  s.row(0) = ((n1 * X2 - (inner / n1) * X1) / root).transpose();
  s.row(1) = (X1.cross(X2) / root).transpose();
  s.row(2) = (X1 / n1).transpose();
  return s;
}

/// Anything callable as curve(t, j) returning the j-th derivative (j = 0, 1).
template <typename Curve>
concept DifferentiableCurve = requires(const Curve& c, double t, int j) {
  { c(t, j) } -> std::convertible_to<So3Vector>;
};

template <DifferentiableCurve Curve>
Rotation frame_T(const Curve& W, double t) {
  return frame_S(W(t, 0), W(t, 1));
}

/// Nearest special-orthogonal matrix via modified Gram-Schmidt on rows.
inline Rotation renormalize(const Matrix3& r) {
  const double drift = (r.transpose() * r - Matrix3::Identity()).norm();
  if (!(drift < 0.1)) {
    throw Error(ErrorCode::NotNearRotation, "matrix is too far from orthogonal to renormalize");
  }
  Rotation out = r;
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < i; ++k) {
      out.row(i) -= out.row(i).dot(out.row(k)) * out.row(k);
    }
    out.row(i).normalize();
  }
  if (out.determinant() < 0.0) out.row(2) *= -1.0;
  return out;
}

/// max(|R^T R - I|, |det R - 1|), entrywise.
inline double rotation_defect(const Matrix3& r) {
  const double orth = (r.transpose() * r - Matrix3::Identity()).cwiseAbs().maxCoeff();
  return std::max(orth, std::abs(r.determinant() - 1.0));
}

}  // namespace so3cubic
