#pragma once

#include "graphtest/geometry.hpp"
#include "graphtest/rng.hpp"

#include <string>

namespace graphtest {

enum class Architecture { affine, tanh_mlp };

// Implicit model x = f(z): either x = W z + b or a single tanh hidden layer
// x = W2 tanh(W1 z + b1) + b2. Parameters live in one flat vector; the
// matrices are stored column-major in the order W1, b1, W2, b2.
class GeneratorParams {
 public:
  static GeneratorParams affine(Index noise_dim, Index out_dim);
  static GeneratorParams tanh_mlp(Index noise_dim, Index width, Index out_dim);

  Architecture architecture() const noexcept { return arch_; }
  Index noise_dim() const noexcept { return noise_dim_; }
  Index width() const noexcept { return width_; }
  Index out_dim() const noexcept { return out_dim_; }

  Vector& values() noexcept { return theta_; }
  const Vector& values() const noexcept { return theta_; }

  // Gaussian weights with variance 1 / fan_in, zero biases.
  void initialize(Engine& rng);

  // One sample per row of z.
  Matrix forward(const Matrix& z) const;

  // Gradient w.r.t. values() of sum_ij grad_x(i, j) * forward(z)(i, j).
  Vector backward(const Matrix& z, const Matrix& grad_x) const;

  std::string describe() const;

 private:
  GeneratorParams(Architecture arch, Index noise_dim, Index width, Index out_dim);

  Index first_layer_rows() const noexcept {
    return arch_ == Architecture::affine ? out_dim_ : width_;
  }

  Architecture arch_;
  Index noise_dim_;
  Index width_;
  Index out_dim_;
  Vector theta_;
};

struct AdamConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Adam on a minimisation objective.
class Adam {
 public:
  Adam(Index size, AdamConfig config);
  void step(Vector& params, const Vector& grad);
  long iterations() const noexcept { return t_; }

 private:
  AdamConfig config_;
  Vector m_;
  Vector v_;
  long t_ = 0;
};

}  // namespace graphtest
