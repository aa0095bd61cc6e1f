#include "rmse_elm/selective.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "rmse_elm/errors.hpp"

namespace rmse_elm {

CorrelationMatrix::CorrelationMatrix(Matrix c, std::size_t n_samples) : c_(std::move(c)), n_samples_(n_samples) {
  if (c_.rows() == 0 || c_.rows() != c_.cols()) throw DimensionError("correlation matrix must be square and non-empty");
  if (n_samples_ == 0) throw DimensionError("correlation matrix needs at least one estimation sample");
  // Exact symmetry: mirror the upper triangle.
  for (Eigen::Index i = 0; i < c_.rows(); ++i)
    for (Eigen::Index j = i + 1; j < c_.cols(); ++j) c_(j, i) = c_(i, j);
}

EnsembleWeights::EnsembleWeights(Vector w) : w_(std::move(w)) {
  if (w_.size() == 0) throw DimensionError("ensemble weights must be non-empty");
  if (!w_.allFinite() || (w_.array() < 0.0).any() || (w_.array() > 1.0).any())
    throw NumericalError("ensemble weights must lie in [0, 1]");
  if (std::abs(w_.sum() - 1.0) > 1e-12) throw NumericalError("ensemble weights must sum to 1");
}

EnsembleWeights EnsembleWeights::uniform(Eigen::Index n) {
  if (n <= 0) throw DimensionError("uniform weights need n >= 1");
  return EnsembleWeights(Vector::Constant(n, 1.0 / static_cast<double>(n)));
}

EnsembleWeights EnsembleWeights::project(const Vector& raw) {
  Vector w = raw.cwiseMax(0.0);
  const double total = w.sum();
  if (!(total > 0.0) || !std::isfinite(total)) throw NumericalError("cannot project weights with no positive mass");
  w /= total;
  w = w.cwiseMin(1.0);
  return EnsembleWeights(std::move(w));
}

void GaConfig::validate() const {
  if (population_size == 0) throw ConfigError("ga population_size must be positive");
  if (generations == 0) throw ConfigError("ga generations must be positive");
  if (!(crossover_prob >= 0.0 && crossover_prob <= 1.0)) throw ConfigError("ga crossover_prob must be in [0, 1]");
  if (!(mutation_prob >= 0.0 && mutation_prob <= 1.0)) throw ConfigError("ga mutation_prob must be in [0, 1]");
  if (!(mutation_scale > 0.0)) throw ConfigError("ga mutation_scale must be positive");
  if (elitism_count >= population_size) throw ConfigError("ga elitism_count must be below population_size");
}

CorrelationMatrix correlation_matrix(std::span<const Vector> predictions, const Vector& targets) {
  if (predictions.empty()) throw DimensionError("correlation matrix needs at least one learner");
  const Eigen::Index s = targets.size();
  if (s == 0) throw DimensionError("correlation matrix needs at least one estimation sample");

  const auto n = static_cast<Eigen::Index>(predictions.size());
  Matrix errors(s, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector& p = predictions[static_cast<std::size_t>(i)];
    if (p.size() != s) {
      throw DimensionError("learner " + std::to_string(i) + " has " + std::to_string(p.size()) +
                           " predictions, expected " + std::to_string(s));
    }
    errors.col(i) = p - targets;
  }

  Matrix c(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) c(i, j) = errors.col(i).dot(errors.col(j)) / static_cast<double>(s);
  return CorrelationMatrix(std::move(c), static_cast<std::size_t>(s));
}

double ensemble_error(const EnsembleWeights& w, const CorrelationMatrix& c) {
  if (w.size() != c.size()) {
    throw DimensionError("weights have " + std::to_string(w.size()) + " entries, correlation matrix is " +
                         std::to_string(c.size()) + "x" + std::to_string(c.size()));
  }
  return w.values().dot(c.values() * w.values());
}

LagrangeWeights optimal_weights(const CorrelationMatrix& c) {
  const Eigen::Index n = c.size();
  const Matrix& cm = c.values();
  const Vector ones = Vector::Ones(n);

  const double scale = cm.trace() / static_cast<double>(n);
  if (scale == 0.0 && cm.isZero(0.0)) {
    // Every learner is exact on the estimation set; all weightings are optimal.
    const auto u = EnsembleWeights::uniform(n);
    return {u.values(), true, u, 0.0};
  }

  auto attempt = [&](double ridge) -> std::optional<Vector> {
    Matrix a = cm;
    a.diagonal().array() += ridge;
    Eigen::FullPivLU<Matrix> lu(a);
    if (!lu.isInvertible()) return std::nullopt;
    Vector x = lu.solve(ones);
    const double total = x.sum();
    if (!x.allFinite() || !std::isfinite(total) || std::abs(total) <= 1e-300) return std::nullopt;
    return Vector(x / total);
  };

  double ridge = 0.0;
  std::optional<Vector> raw = attempt(0.0);
  for (double delta = 1e-10; !raw && delta <= 1e-4 * (1.0 + 1e-9); delta *= 10.0) {
    ridge = delta * scale;
    raw = attempt(ridge);
  }
  if (!raw) throw NumericalError("correlation matrix is singular even after ridge regularisation (degenerate learner set)");

  const bool inside = ((raw->array() >= 0.0) && (raw->array() <= 1.0)).all();
  return {*raw, inside, EnsembleWeights::project(*raw), ridge};
}

namespace {

void require_omission_args(const CorrelationMatrix& c, Eigen::Index k) {
  if (c.size() < 2) throw DimensionError("omission analysis needs at least two learners");
  if (k < 0 || k >= c.size()) throw DimensionError("learner index " + std::to_string(k) + " out of range");
}

// Sum of c(i,k) over i != k.
double cross_sum(const CorrelationMatrix& c, Eigen::Index k) {
  return c.values().col(k).sum() - c(k, k);
}

}  // namespace

double omission_gain(const CorrelationMatrix& c, Eigen::Index k) {
  require_omission_args(c, k);
  const double n = static_cast<double>(c.size());
  const double e = c.values().sum() / (n * n);
  return (2.0 * cross_sum(c, k) + c(k, k) - (2.0 * n - 1.0) * e) / ((n - 1.0) * (n - 1.0));
}

bool should_omit(const CorrelationMatrix& c, Eigen::Index k) {
  require_omission_args(c, k);
  const double n = static_cast<double>(c.size());
  const double cross = cross_sum(c, k);
  const double reduced = c.values().sum() - 2.0 * cross - c(k, k);  // sum over i,j != k
  const double nm1_sq = (n - 1.0) * (n - 1.0);
  return (2.0 * n - 1.0) * reduced < 2.0 * nm1_sq * cross + nm1_sq * c(k, k);
}

namespace {

struct Individual {
  Vector genes;  // nonnegative, unnormalised
  double fitness;
};

Vector normalise_genes(const Vector& genes) {
  const double total = genes.sum();
  if (!(total > 0.0)) return Vector::Constant(genes.size(), 1.0 / static_cast<double>(genes.size()));
  return genes / total;
}

double evaluate(const Vector& genes, const Matrix& c) {
  const Vector w = normalise_genes(genes);
  return -w.dot(c * w);
}

// Roulette wheel on rank: worst individual has weight 1, best has weight P.
std::size_t rank_roulette(const std::vector<std::size_t>& ascending_order, Rng& rng) {
  const std::size_t p = ascending_order.size();
  const double total = static_cast<double>(p) * static_cast<double>(p + 1) / 2.0;
  std::uniform_real_distribution<double> pick(0.0, total);
  double r = pick(rng);
  for (std::size_t rank = 0; rank < p; ++rank) {
    r -= static_cast<double>(rank + 1);
    if (r < 0.0) return ascending_order[rank];
  }
  return ascending_order.back();
}

}  // namespace

GaOutcome ga_evolve(const CorrelationMatrix& c, const GaConfig& config) {
  config.validate();
  const Eigen::Index n = c.size();
  const Matrix& cm = c.values();

  if (n == 1) {
    auto w = EnsembleWeights::uniform(1);
    const double err = cm(0, 0);
    return {w, err, std::vector<double>(config.generations + 1, -err)};
  }

  Rng rng = make_rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, config.mutation_scale);

  const std::size_t pop_size = config.population_size;
  std::vector<Individual> pop;
  pop.reserve(pop_size);
  pop.push_back({Vector::Constant(n, 1.0 / static_cast<double>(n)), 0.0});
  while (pop.size() < pop_size) {
    Vector g(n);
    for (Eigen::Index i = 0; i < n; ++i) g(i) = unit(rng);
    pop.push_back({std::move(g), 0.0});
  }
  for (auto& ind : pop) ind.fitness = evaluate(ind.genes, cm);

  // Ties within rounding keep the earlier best, so degenerate (all-equal)
  // problems stay on the uniform vector.
  Individual best = pop.front();
  auto consider = [&best](const Individual& ind) {
    if (ind.fitness > best.fitness + 1e-12 * std::abs(best.fitness)) best = ind;
  };
  for (const auto& ind : pop) consider(ind);

  std::vector<double> history;
  history.reserve(config.generations + 1);
  history.push_back(best.fitness);

  std::vector<std::size_t> order(pop_size);
  for (std::size_t gen = 0; gen < config.generations; ++gen) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (pop[a].fitness != pop[b].fitness) return pop[a].fitness < pop[b].fitness;
      return a > b;
    });

    std::vector<Individual> next;
    next.reserve(pop_size);
    for (std::size_t e = 0; e < config.elitism_count; ++e) next.push_back(pop[order[pop_size - 1 - e]]);

    while (next.size() < pop_size) {
      Vector a = pop[rank_roulette(order, rng)].genes;
      Vector b = pop[rank_roulette(order, rng)].genes;
      if (unit(rng) < config.crossover_prob) {
        // Arithmetic blend: children are complementary convex combinations.
        const double alpha = unit(rng);
        Vector child_a = alpha * a + (1.0 - alpha) * b;
        Vector child_b = (1.0 - alpha) * a + alpha * b;
        a = std::move(child_a);
        b = std::move(child_b);
      }
      for (Vector* child : {&a, &b}) {
        for (Eigen::Index i = 0; i < n; ++i)
          if (unit(rng) < config.mutation_prob) (*child)(i) = std::max(0.0, (*child)(i) + gauss(rng));
        if (!(child->sum() > 0.0)) child->setConstant(1.0);
      }
      next.push_back({std::move(a), 0.0});
      if (next.size() < pop_size) next.push_back({std::move(b), 0.0});
    }

    for (std::size_t i = config.elitism_count; i < pop_size; ++i) next[i].fitness = evaluate(next[i].genes, cm);
    pop = std::move(next);

    for (const auto& ind : pop) consider(ind);
    history.push_back(best.fitness);
  }

  EnsembleWeights weights = EnsembleWeights::project(normalise_genes(best.genes));
  return {weights, ensemble_error(weights, c), std::move(history)};
}

// Absorbs rounding in weights that sit exactly on the threshold, e.g. 1/N
// weights against lambda = 1/N.
constexpr double kThresholdTolerance = 1e-12;

std::vector<std::size_t> select_by_threshold(const EnsembleWeights& w, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ConfigError("selection threshold must be in [0, 1]");
  std::vector<std::size_t> chosen;
  for (Eigen::Index i = 0; i < w.size(); ++i)
    if (w[i] >= lambda - kThresholdTolerance) chosen.push_back(static_cast<std::size_t>(i));
  if (chosen.empty()) {
    Eigen::Index best = 0;
    w.values().maxCoeff(&best);
    chosen.push_back(static_cast<std::size_t>(best));
  }
  return chosen;
}

}  // namespace rmse_elm
