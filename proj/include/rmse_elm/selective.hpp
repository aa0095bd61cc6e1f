#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rmse_elm/elm.hpp"
#include "rmse_elm/random.hpp"

namespace rmse_elm {

/// Empirical error-correlation matrix of N learners over S estimation points:
/// c(i,j) = mean_s (f_i(x_s) - d(x_s)) (f_j(x_s) - d(x_s)).
/// The diagonal holds each learner's MSE on the estimation set.
class CorrelationMatrix {
 public:
  CorrelationMatrix(Matrix c, std::size_t n_samples);

  const Matrix& values() const noexcept { return c_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return c_(i, j); }
  Eigen::Index size() const noexcept { return c_.rows(); }
  std::size_t n_samples() const noexcept { return n_samples_; }

 private:
  Matrix c_;
  std::size_t n_samples_;
};

/// Weight vector on the probability simplex: w[i] in [0,1], sum w = 1.
class EnsembleWeights {
 public:
  /// Validates the simplex constraint (tolerance 1e-12 on the sum).
  explicit EnsembleWeights(Vector w);

  static EnsembleWeights uniform(Eigen::Index n);
  /// Clips negatives to zero and rescales to unit sum. Throws NumericalError
  /// if nothing positive remains.
  static EnsembleWeights project(const Vector& raw);

  const Vector& values() const noexcept { return w_; }
  double operator[](Eigen::Index i) const { return w_(i); }
  Eigen::Index size() const noexcept { return w_.size(); }

 private:
  Vector w_;
};

struct GaConfig {
  std::size_t population_size = 50;
  std::size_t generations = 100;
  double crossover_prob = 0.8;
  double mutation_prob = 0.1;
  double mutation_scale = 0.1;
  std::size_t elitism_count = 2;
  Seed seed = kDefaultSeed;

  /// Throws ConfigError on out-of-range fields.
  void validate() const;
};

CorrelationMatrix correlation_matrix(std::span<const Vector> predictions, const Vector& targets);

/// Quadratic form w' C w: generalization error of the weighted ensemble.
double ensemble_error(const EnsembleWeights& w, const CorrelationMatrix& c);

struct LagrangeWeights {
  Vector raw;                // sum-to-one solution, may leave the simplex
  bool inside_simplex;       // every raw component in [0, 1]
  EnsembleWeights clipped;   // raw projected back onto the simplex
  double ridge;              // ridge added to the diagonal before inversion (0 if none)
};

/// Closed-form minimiser of w' C w under sum(w) = 1:
/// w_k = sum_j Cinv(k,j) / sum_ij Cinv(i,j).
/// Singular C is regularised with an escalating ridge; throws NumericalError
/// when even the largest ridge fails.
LagrangeWeights optimal_weights(const CorrelationMatrix& c);

/// Change in simple-average ensemble error from dropping learner k,
/// E - E_hat. Positive means the ensemble improves without k.
double omission_gain(const CorrelationMatrix& c, Eigen::Index k);

/// Omission-benefit inequality for learner k; agrees with omission_gain(c, k) > 0.
bool should_omit(const CorrelationMatrix& c, Eigen::Index k);

struct GaOutcome {
  EnsembleWeights weights;
  double best_error;                 // ensemble_error(weights, c)
  std::vector<double> best_fitness;  // best-ever fitness after each generation (index 0 = initial population)
};

/// Real-coded GA over simplex weights with fitness -w'Cw. The uniform vector
/// is part of the initial population so the result is never worse than
/// simple averaging.
GaOutcome ga_evolve(const CorrelationMatrix& c, const GaConfig& config);

/// Indices i with w[i] >= lambda, ascending. Falls back to the argmax learner
/// when nothing reaches the threshold. lambda = 0 keeps every learner.
std::vector<std::size_t> select_by_threshold(const EnsembleWeights& w, double lambda);

}  // namespace rmse_elm
