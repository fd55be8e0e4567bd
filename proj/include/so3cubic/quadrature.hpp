#pragma once

#include <cmath>
#include <concepts>
#include <cstddef>

#include "so3cubic/errors.hpp"

namespace so3cubic {

/// Composite Simpson rule with `panels` equal panels (each panel uses its midpoint).
template <typename Fn>
  requires std::invocable<const Fn&, double>
double simpson(const Fn& f, double a, double b, std::size_t panels) {
  if (panels == 0) throw Error(ErrorCode::InvalidArgument, "simpson needs at least one panel");
  const double h = (b - a) / static_cast<double>(panels);
  double acc = 0.0;
  double left = f(a);
  for (std::size_t i = 0; i < panels; ++i) {
    const double x0 = a + static_cast<double>(i) * h;
    const double x1 = (i + 1 == panels) ? b : x0 + h;
    const double right = f(x1);
    acc += (h / 6.0) * (left + 4.0 * f(0.5 * (x0 + x1)) + right);
    left = right;
  }
  return acc;
}

}  // namespace so3cubic
