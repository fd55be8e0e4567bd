#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "so3cubic/cubic_reconstruction.hpp"
#include "so3cubic/quadrature.hpp"
#include "test_support.hpp"

namespace so3cubic {
namespace {

using testing::IsRotation;
using testing::Near;

TEST(Simpson, ExactForCubics) {
  auto f = [](double x) { return 1.0 - 2.0 * x + 3.0 * x * x * x; };
  EXPECT_NEAR(simpson(f, 0.0, 2.0, 1), 2.0 - 4.0 + 12.0, 1e-14);
  EXPECT_NEAR(simpson([](double x) { return std::sin(x); }, 0.0, kPi, 64), 2.0, 1e-8);
  EXPECT_THROW(simpson(f, 0.0, 1.0, 0), Error);
}

TEST(PhiNumeric, ZeroAtStart) {
  const QuadraticTrajectory tr = integrate_quadratic(testing::quad_example_ivp(5.0), 1e-3);
  EXPECT_EQ(phi_numeric({tr, Rotation::Identity()}, 0.0), 0.0);
}

TEST(PhiNumeric, GridRefinementOracle) {
  const QuadraticTrajectory tr = integrate_quadratic(testing::quad_example_ivp(5.0), 1e-3);
  const PhiIntegral phi({tr, Rotation::Identity()});
  // Composite Simpson with twice as many panels on the same dense interpolant.
  const double refined =
      std::sqrt(tr.c()) * simpson([&phi](double s) { return phi.integrand(s); }, 0.0, 5.0, 2 * (tr.size() - 1));
  EXPECT_NEAR(phi(5.0), refined, 1e-10);
  EXPECT_DOUBLE_EQ(phi(5.0), phi.at_node(tr.size() - 1));
  // Off-node evaluation is continuous with the node values.
  EXPECT_NEAR(phi(2.0 + 1e-9), phi(2.0), 1e-8);
}

TEST(PhiNumeric, DegenerateInputsThrow) {
  const QuadraticTrajectory geodesic =
      integrate_quadratic({0.0, 1.0, So3Vector(1, 0, 0), So3Vector::Zero(), So3Vector::Zero()}, 1e-2);
  try {
    PhiIntegral({geodesic, Rotation::Identity()});
    FAIL() << "expected DegenerateThirdDerivative";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateThirdDerivative);
  }
  // V'' parallel to V gives V''' = 0 with c > 0.
  const QuadraticTrajectory parallel =
      integrate_quadratic({0.0, 1.0, So3Vector(0, 0, 0), So3Vector::Zero(), So3Vector(0, 0, 1)}, 1e-2);
  EXPECT_THROW(reconstruct_cubic({parallel, Rotation::Identity()}), Error);
}

TEST(PhiNumeric, PhiHatIsFirstOrderAccurate) {
  auto worst = [](double delta) {
    const QuadraticTrajectory tr = integrate_quadratic(testing::cubic_example_ivp(delta, 5.0), 1e-3);
    const PhiIntegral phi({tr, Rotation::Identity()});
    const ApproxParams p = testing::cubic_example_params(delta);
    double w = 0.0;
    for (std::size_t i = 0; i < tr.size(); ++i) w = std::max(w, std::abs(phi.at_node(i) - phi_hat(p, tr.time(i))));
    return w;
  };
  const double ratio = worst(0.04) / worst(0.02);
  EXPECT_GE(ratio, 3.0);
  EXPECT_LE(ratio, 5.0);
}

TEST(ReconstructCubic, StartsAtX0Exactly) {
  std::mt19937_64 rng(51);
  const Rotation x0 = testing::random_rotation(rng);
  const QuadraticTrajectory tr = integrate_quadratic(testing::quad_example_ivp(1.0), 1e-3);
  const RotationTrajectory x = reconstruct_cubic({tr, x0});
  EXPECT_TRUE(x.samples.front() == x0);
}

TEST(ReconstructCubic, MatchesDirectIntegrationForQuadraticExample) {
  std::mt19937_64 rng(52);
  const Rotation x0 = testing::random_rotation(rng);
  const QuadraticTrajectory tr = integrate_quadratic(testing::quad_example_ivp(5.0), 1e-3);
  const RotationTrajectory a = reconstruct_cubic({tr, x0});
  const RotationTrajectory b = integrate_cubic(x0, tr);
  ASSERT_EQ(a.size(), b.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, (a.samples[i] - b.samples[i]).norm());
    ASSERT_TRUE(IsRotation(a.samples[i]));
  }
  EXPECT_LE(worst, 1e-6);
}

TEST(ReconstructCubic, MatchesDirectIntegrationForRandomPerturbations) {
  std::mt19937_64 rng(53);
  for (int k = 0; k < 4; ++k) {
    const So3Vector D = testing::random_vector(rng, 1.5);
    const QuadraticIVP ivp{0.0, 5.0, D + testing::random_vector(rng, 0.05), testing::random_vector(rng, 0.05),
                           testing::random_vector(rng, 0.05)};
    const QuadraticTrajectory tr = integrate_quadratic(ivp, 1e-3);
    const RotationTrajectory a = reconstruct_cubic({tr, Rotation::Identity()});
    const RotationTrajectory b = integrate_cubic(Rotation::Identity(), tr);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, (a.samples[i] - b.samples[i]).norm());
    EXPECT_LE(worst, 1e-6) << "case " << k;
  }
}

TEST(ReconstructCubic, LeftEquivariance) {
  std::mt19937_64 rng(54);
  const Rotation x0 = testing::random_rotation(rng), g = testing::random_rotation(rng);
  const QuadraticTrajectory tr = integrate_quadratic(testing::quad_example_ivp(2.0), 1e-3);
  const RotationTrajectory a = reconstruct_cubic({tr, x0});
  const RotationTrajectory b = reconstruct_cubic({tr, Rotation(g * x0)});
  for (std::size_t i = 0; i < a.size(); ++i) ASSERT_TRUE(Near(b.samples[i], Matrix3(g * a.samples[i]), 1e-14));
}

TEST(PhiHat, ZeroAtStart) {
  const ApproxParams p = testing::cubic_example_params(0.05);
  EXPECT_EQ(phi_hat(p, 0.0), 0.0);
}

TEST(PhiHat, LinearWhenA1Vanishes) {
  ApproxParams p = testing::cubic_example_params(0.05);
  p.a11 = p.a12 = 0.0;
  const double slope = p.delta * std::sqrt(p.rho() * p.rho() + 1.0) * p.beta;
  for (double t : {0.5, 2.0, 9.0}) EXPECT_NEAR(phi_hat(p, t), slope * t, 1e-15);
}

TEST(PhiHat, BothAlgebraicFormsAgree) {
  EXPECT_NEAR(phi_hat(testing::cubic_example_params(0.05), 1.0),
              phi_hat_from_c_hat(testing::cubic_example_params(0.05), 1.0), 1e-14);
  std::mt19937_64 rng(55);
  for (int k = 0; k < 50; ++k) {
    const So3Vector D = (0.5 + 0.03 * k) * testing::random_unit(rng);
    const ApproxParams p = fit_params(D, 0.05, D + 0.05 * testing::random_vector(rng),
                                      0.05 * testing::random_vector(rng), 0.05 * testing::random_vector(rng), 0.0);
    for (double t : {0.3, 1.0, 4.0}) EXPECT_NEAR(phi_hat(p, t), phi_hat_from_c_hat(p, t), 1e-14);
  }
}

TEST(PhiHat, DegenerateBThrows) {
  const So3Vector D = So3Vector::UnitX();
  const ApproxParams p = fit_params(D, 0.05, D, So3Vector::Zero(), So3Vector::Zero(), 0.0);
  EXPECT_THROW(phi_hat(p, 1.0), Error);
  EXPECT_THROW(phi_hat_from_c_hat(p, 1.0), Error);
  try {
    XHat(p, Rotation::Identity());
    FAIL() << "expected DegenerateB";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateB);
  }
}

TEST(XHat, StartsAtX0ExactlyAndIsARotation) {
  std::mt19937_64 rng(56);
  const Rotation x0 = testing::random_rotation(rng);
  const ApproxParams p = testing::cubic_example_params(0.05);
  EXPECT_TRUE(x_hat(p, x0, 0.0) == x0);
  const XHat xh(p, x0);
  for (double t = 0.0; t <= 10.0; t += 0.25) ASSERT_TRUE(IsRotation(xh(t))) << "t " << t;
}

TEST(XHat, FrameVectorsAreScaledApproximantDerivatives) {
  const ApproxParams p = testing::cubic_example_params(0.05);
  const XHat xh(p, Rotation::Identity());
  const Approximant a(p);
  const FrameVectors x = xh.frame_vectors(1.5);
  EXPECT_TRUE(Near(x.X1, So3Vector(a.V2(1.5, 2) / 0.05), 1e-15));
  EXPECT_TRUE(Near(x.X2, So3Vector(a.V2(1.5, 3) / 0.05), 1e-15));
  // Leading terms: X1 = 2 c2 F0 - d^2 e~ B + O(delta).
  const So3Vector lead = 2.0 * p.c2 * p.frame.F0 - tilde_e(p.frame, 1.5, 0.0) * p.B();
  EXPECT_TRUE(Near(x.X1, lead, 0.05));
}

TEST(XHat, LeftEquivariance) {
  std::mt19937_64 rng(57);
  const Rotation x0 = testing::random_rotation(rng), g = testing::random_rotation(rng);
  const ApproxParams p = testing::cubic_example_params(0.05);
  const XHat a(p, x0), b(p, Rotation(g * x0));
  for (double t : {0.5, 3.0, 7.0}) EXPECT_TRUE(Near(b(t), Matrix3(g * a(t)), 1e-14));
}

TEST(XHat, EarlyFidelityAndLateDegradation) {
  const double delta = 0.05;
  const QuadraticTrajectory tr = integrate_quadratic(testing::cubic_example_ivp(delta, 10.0), 1e-3);
  const RotationTrajectory x = integrate_cubic(Rotation::Identity(), tr);
  const XHat xh(testing::cubic_example_params(delta), Rotation::Identity());
  auto dist = [&](int t) { return so3_distance(x.samples[static_cast<std::size_t>(t) * 1000], xh(t)).frobenius; };
  for (int early : {1, 2}) {
    for (int late : {6, 8}) EXPECT_LT(dist(early), dist(late)) << early << " vs " << late;
  }
}

TEST(XHat, SecondOrderConvergenceAtThree) {
  auto error_at_three = [](double delta) {
    const QuadraticTrajectory tr = integrate_quadratic(testing::cubic_example_ivp(delta, 3.0), 1e-3);
    const RotationTrajectory x = integrate_cubic(Rotation::Identity(), tr);
    return so3_distance(x.samples.back(), x_hat(testing::cubic_example_params(delta), Rotation::Identity(), 3.0))
        .frobenius;
  };
  const double ratio = error_at_three(0.04) / error_at_three(0.02);
  EXPECT_GE(ratio, 3.0);
  EXPECT_LE(ratio, 5.0);
}

TEST(So3Distance, Examples) {
  const Rotation r = rot_exp(So3Vector(0.3, -0.2, 0.9));
  const So3Distance same = so3_distance(r, r);
  EXPECT_EQ(same.frobenius, 0.0);
  EXPECT_EQ(same.angle, 0.0);
  const So3Distance half = so3_distance(Rotation::Identity(), So3Vector(1, -1, -1).asDiagonal().toDenseMatrix());
  EXPECT_NEAR(half.frobenius, 2.0 * std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(half.angle, kPi, 1e-15);
  EXPECT_NEAR(so3_distance(Rotation::Identity(), rot_exp(So3Vector(0.1, 0, 0))).angle, 0.1, 1e-12);
}

TEST(So3Distance, AngleMatchesRotationVectorNorm) {
  std::mt19937_64 rng(58);
  for (int k = 0; k < 50; ++k) {
    So3Vector v = testing::random_vector(rng, 3.0);
    if (v.norm() >= kPi) v *= 0.9 * kPi / v.norm();
    const Rotation g = testing::random_rotation(rng);
    EXPECT_NEAR(so3_distance(g, Rotation(g * rot_exp(v))).angle, v.norm(), 1e-12);
  }
  EXPECT_NEAR(so3_distance(Rotation::Identity(), rot_exp(So3Vector(1e-9, 0, 0))).angle, 1e-9, 1e-20);
}

}  // namespace
}  // namespace so3cubic
