#include "graphtest/datasets.hpp"

#include <cmath>
#include <numbers>

namespace graphtest {

Matrix standard_normal(Index n, Index d, Engine& rng) {
  std::normal_distribution<double> normal;
  Matrix x(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d; ++j) x(i, j) = normal(rng);
  return x;
}

Matrix shifted_scaled_normal(Index n, Index d, double mu_shift, double sigma_scale,
                             Engine& rng) {
  Matrix x = standard_normal(n, d, rng);
  x.col(0) = (x.col(0).array() * sigma_scale + mu_shift).matrix();
  return x;
}

Matrix make_moons(Index n, double noise, Engine& rng) {
  const Index outer = n / 2;
  const Index inner = n - outer;
  Matrix x(n, 2);
  auto angle = [](Index i, Index count) {
    return count > 1 ? std::numbers::pi * static_cast<double>(i) / static_cast<double>(count - 1)
                     : 0.0;
  };
  for (Index i = 0; i < outer; ++i) {
    const double t = angle(i, outer);
    x(i, 0) = std::cos(t);
    x(i, 1) = std::sin(t);
  }
  for (Index i = 0; i < inner; ++i) {
    const double t = angle(i, inner);
    x(outer + i, 0) = 1.0 - std::cos(t);
    x(outer + i, 1) = 0.5 - std::sin(t);
  }
  if (noise > 0.0) x += noise * standard_normal(n, 2, rng);
  return x;
}

}  // namespace graphtest
