#pragma once

// Umbrella header for the numerical core. The harness (harness.hpp) also
// pulls in nlohmann/json and is included separately.

#include "so3cubic/errors.hpp"
#include "so3cubic/so3_algebra.hpp"
#include "so3cubic/polynomial.hpp"
#include "so3cubic/endomorphism.hpp"
#include "so3cubic/lie_quadratic_ode.hpp"
#include "so3cubic/approximants.hpp"
#include "so3cubic/quadrature.hpp"
#include "so3cubic/cubic_reconstruction.hpp"
