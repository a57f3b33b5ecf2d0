#include "graphtest/generator.hpp"

#include "graphtest/errors.hpp"

#include <cmath>
#include <sstream>

namespace graphtest {

GeneratorParams::GeneratorParams(Architecture arch, Index noise_dim, Index width,
                                 Index out_dim)
    : arch_(arch), noise_dim_(noise_dim), width_(width), out_dim_(out_dim) {
  if (noise_dim < 1 || out_dim < 1 || (arch == Architecture::tanh_mlp && width < 1))
    throw ParameterError("generator dimensions must be positive");
  Index size = first_layer_rows() * (noise_dim + 1);
  if (arch == Architecture::tanh_mlp) size += out_dim * (width + 1);
  theta_ = Vector::Zero(size);
}

GeneratorParams GeneratorParams::affine(Index noise_dim, Index out_dim) {
  return GeneratorParams(Architecture::affine, noise_dim, 0, out_dim);
}

GeneratorParams GeneratorParams::tanh_mlp(Index noise_dim, Index width, Index out_dim) {
  return GeneratorParams(Architecture::tanh_mlp, noise_dim, width, out_dim);
}

void GeneratorParams::initialize(Engine& rng) {
  std::normal_distribution<double> normal;
  theta_.setZero();
  const Index rows1 = first_layer_rows();
  const double s1 = 1.0 / std::sqrt(static_cast<double>(noise_dim_));
  for (Index i = 0; i < rows1 * noise_dim_; ++i) theta_[i] = s1 * normal(rng);
  if (arch_ == Architecture::tanh_mlp) {
    const Index offset = rows1 * (noise_dim_ + 1);
    const double s2 = 1.0 / std::sqrt(static_cast<double>(width_));
    for (Index i = 0; i < out_dim_ * width_; ++i) theta_[offset + i] = s2 * normal(rng);
  }
}

Matrix GeneratorParams::forward(const Matrix& z) const {
  if (z.cols() != noise_dim_) throw InvalidInputError("noise has the wrong dimension");
  const Index rows1 = first_layer_rows();
  Eigen::Map<const Matrix> w1(theta_.data(), rows1, noise_dim_);
  Eigen::Map<const Vector> b1(theta_.data() + rows1 * noise_dim_, rows1);
  Matrix a1 = (z * w1.transpose()).rowwise() + b1.transpose();
  if (arch_ == Architecture::affine) return a1;
  const Index offset = rows1 * (noise_dim_ + 1);
  Eigen::Map<const Matrix> w2(theta_.data() + offset, out_dim_, width_);
  Eigen::Map<const Vector> b2(theta_.data() + offset + out_dim_ * width_, out_dim_);
  const Matrix h = a1.array().tanh().matrix();
  return (h * w2.transpose()).rowwise() + b2.transpose();
}

Vector GeneratorParams::backward(const Matrix& z, const Matrix& grad_x) const {
  if (z.cols() != noise_dim_ || grad_x.rows() != z.rows() || grad_x.cols() != out_dim_)
    throw InvalidInputError("generator backward: shape mismatch");
  Vector grad = Vector::Zero(theta_.size());
  const Index rows1 = first_layer_rows();
  Eigen::Map<Matrix> gw1(grad.data(), rows1, noise_dim_);
  Eigen::Map<Vector> gb1(grad.data() + rows1 * noise_dim_, rows1);
  if (arch_ == Architecture::affine) {
    gw1 = grad_x.transpose() * z;
    gb1 = grad_x.colwise().sum().transpose();
    return grad;
  }
  Eigen::Map<const Matrix> w1(theta_.data(), rows1, noise_dim_);
  Eigen::Map<const Vector> b1(theta_.data() + rows1 * noise_dim_, rows1);
  const Index offset = rows1 * (noise_dim_ + 1);
  Eigen::Map<const Matrix> w2(theta_.data() + offset, out_dim_, width_);
  Eigen::Map<Matrix> gw2(grad.data() + offset, out_dim_, width_);
  Eigen::Map<Vector> gb2(grad.data() + offset + out_dim_ * width_, out_dim_);

  const Matrix h = ((z * w1.transpose()).rowwise() + b1.transpose()).array().tanh().matrix();
  gw2 = grad_x.transpose() * h;
  gb2 = grad_x.colwise().sum().transpose();
  const Matrix grad_a1 = ((grad_x * w2).array() * (1.0 - h.array().square())).matrix();
  gw1 = grad_a1.transpose() * z;
  gb1 = grad_a1.colwise().sum().transpose();
  return grad;
}

std::string GeneratorParams::describe() const {
  std::ostringstream out;
  if (arch_ == Architecture::affine)
    out << "affine(" << noise_dim_ << " -> " << out_dim_ << ")";
  else
    out << "tanh_mlp(" << noise_dim_ << " -> " << width_ << " -> " << out_dim_ << ")";
  return out.str();
}

Adam::Adam(Index size, AdamConfig config)
    : config_(config), m_(Vector::Zero(size)), v_(Vector::Zero(size)) {}

void Adam::step(Vector& params, const Vector& grad) {
  if (params.size() != m_.size() || grad.size() != m_.size())
    throw InvalidInputError("Adam: parameter size mismatch");
  ++t_;
  m_ = config_.beta1 * m_ + (1.0 - config_.beta1) * grad;
  v_ = config_.beta2 * v_ + (1.0 - config_.beta2) * grad.cwiseAbs2();
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  params.array() -= config_.learning_rate * (m_.array() / c1) /
                    ((v_.array() / c2).sqrt() + config_.epsilon);
}

}  // namespace graphtest
