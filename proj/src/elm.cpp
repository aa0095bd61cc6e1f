#include "rmse_elm/elm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "rmse_elm/errors.hpp"

namespace rmse_elm {

std::string_view to_string(Activation a) noexcept {
  switch (a) {
    case Activation::Sigmoid: return "sigmoid";
    case Activation::HardLimit: return "hardlim";
    case Activation::Gaussian: return "gaussian";
    case Activation::Multiquadric: return "multiquadric";
  }
  return "unknown";
}

std::optional<Activation> parse_activation(std::string_view name) {
  if (name == "sigmoid" || name == "sig") return Activation::Sigmoid;
  if (name == "hardlim" || name == "hardlimit") return Activation::HardLimit;
  if (name == "gaussian" || name == "rbf") return Activation::Gaussian;
  if (name == "multiquadric") return Activation::Multiquadric;
  return std::nullopt;
}

namespace {

// Uniform on the open interval (-1, 1).
double open_unit_uniform(Rng& rng, std::uniform_real_distribution<double>& dist) {
  double v = dist(rng);
  while (v <= -1.0) v = dist(rng);
  return v;
}

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw DataError(std::string(what) + " contains non-finite values");
}

}  // namespace

HiddenLayer make_hidden_layer(Eigen::Index input_dim, Eigen::Index hidden_count,
                              Activation activation, Seed seed) {
  if (input_dim <= 0 || hidden_count <= 0) {
    throw DimensionError("hidden layer needs input_dim >= 1 and hidden_count >= 1");
  }
  Rng rng = make_rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);

  HiddenLayer layer;
  layer.activation = activation;
  layer.input_weights.resize(hidden_count, input_dim);
  layer.biases.resize(hidden_count);
  // Row-major fill so the stream order does not depend on Eigen's storage order.
  for (Eigen::Index t = 0; t < hidden_count; ++t)
    for (Eigen::Index j = 0; j < input_dim; ++j) layer.input_weights(t, j) = open_unit_uniform(rng, dist);
  for (Eigen::Index t = 0; t < hidden_count; ++t) layer.biases(t) = open_unit_uniform(rng, dist);
  return layer;
}

Matrix hidden_output(const HiddenLayer& layer, const Matrix& inputs) {
  if (inputs.cols() != layer.input_dim()) {
    throw DimensionError("input has " + std::to_string(inputs.cols()) + " columns, layer expects " +
                         std::to_string(layer.input_dim()));
  }
  const auto& w = layer.input_weights;
  const auto& b = layer.biases;

  switch (layer.activation) {
    case Activation::Sigmoid: {
      Matrix z = inputs * w.transpose();
      z.rowwise() += b.transpose();
      return (1.0 / (1.0 + (-z.array()).exp())).matrix();
    }
    case Activation::HardLimit: {
      Matrix z = inputs * w.transpose();
      z.rowwise() += b.transpose();
      return (z.array() >= 0.0).cast<double>().matrix();
    }
    case Activation::Gaussian:
    case Activation::Multiquadric: {
      // ||x - c||^2 = ||x||^2 - 2 x.c + ||c||^2
      Matrix d2 = -2.0 * inputs * w.transpose();
      d2.colwise() += inputs.rowwise().squaredNorm();
      d2.rowwise() += w.rowwise().squaredNorm().transpose();
      d2 = d2.cwiseMax(0.0);
      const Eigen::ArrayXd width2 = b.array().square();
      if (layer.activation == Activation::Gaussian) {
        return (-(d2.array().rowwise() * width2.transpose())).exp().matrix();
      }
      return (d2.array().rowwise() + width2.transpose()).sqrt().matrix();
    }
  }
  throw DimensionError("unknown activation");
}

Matrix pseudoinverse(const Matrix& a) {
  require_finite(a, "pseudoinverse input");
  if (a.size() == 0) return Matrix::Zero(a.cols(), a.rows());

  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sigma = svd.singularValues();
  const double cutoff = std::numeric_limits<double>::epsilon() * sigma(0) *
                        static_cast<double>(std::max(a.rows(), a.cols()));

  Vector inv = Vector::Zero(sigma.size());
  for (Eigen::Index i = 0; i < sigma.size(); ++i)
    if (sigma(i) > cutoff) inv(i) = 1.0 / sigma(i);

  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

ElmModel train_elm(const Matrix& inputs, const Matrix& targets, Eigen::Index hidden_count,
                   Activation activation, Seed seed) {
  if (inputs.rows() == 0) throw DimensionError("training set is empty");
  if (inputs.rows() != targets.rows()) {
    throw DimensionError("inputs have " + std::to_string(inputs.rows()) + " rows, targets have " +
                         std::to_string(targets.rows()));
  }
  if (targets.cols() == 0) throw DimensionError("targets have no columns");
  require_finite(targets, "training targets");

  ElmModel model;
  model.hidden = make_hidden_layer(inputs.cols(), hidden_count, activation, seed);
  const Matrix h = hidden_output(model.hidden, inputs);
  model.output_weights = pseudoinverse(h) * targets;
  return model;
}

Matrix predict(const ElmModel& model, const Matrix& inputs) {
  return hidden_output(model.hidden, inputs) * model.output_weights;
}

}  // namespace rmse_elm
