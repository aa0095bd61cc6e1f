#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <string_view>

#include "rmse_elm/random.hpp"

namespace rmse_elm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Activation { Sigmoid, HardLimit, Gaussian, Multiquadric };

std::string_view to_string(Activation a) noexcept;
std::optional<Activation> parse_activation(std::string_view name);

/// Random, fixed hidden layer of an ELM. Row t of `input_weights` and
/// `biases[t]` parameterize hidden node t. For the RBF-style activations
/// (Gaussian, Multiquadric) the weight row is the node centre and |bias| its
/// width.
struct HiddenLayer {
  Matrix input_weights;  // L x d
  Vector biases;         // L
  Activation activation = Activation::Sigmoid;

  Eigen::Index hidden_count() const noexcept { return input_weights.rows(); }
  Eigen::Index input_dim() const noexcept { return input_weights.cols(); }
};

struct ElmModel {
  HiddenLayer hidden;
  Matrix output_weights;  // L x m

  Eigen::Index input_dim() const noexcept { return hidden.input_dim(); }
  Eigen::Index output_dim() const noexcept { return output_weights.cols(); }
};

/// Samples an L x d layer with weights and biases i.i.d. Uniform(-1, 1).
/// Throws DimensionError if d or L is zero.
HiddenLayer make_hidden_layer(Eigen::Index input_dim, Eigen::Index hidden_count,
                              Activation activation, Seed seed);

/// Hidden layer output matrix H (N x L) for inputs X (N x d).
Matrix hidden_output(const HiddenLayer& layer, const Matrix& inputs);

/// Moore-Penrose pseudoinverse via SVD. Singular values at or below
/// eps * sigma_max * max(rows, cols) are treated as zero.
/// Throws DataError on non-finite input.
Matrix pseudoinverse(const Matrix& a);

/// Solves beta = pinv(H) * Y for a freshly sampled hidden layer.
ElmModel train_elm(const Matrix& inputs, const Matrix& targets, Eigen::Index hidden_count,
                   Activation activation, Seed seed);

Matrix predict(const ElmModel& model, const Matrix& inputs);

}  // namespace rmse_elm
