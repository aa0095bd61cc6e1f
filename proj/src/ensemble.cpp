#include "rmse_elm/ensemble.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "rmse_elm/errors.hpp"

namespace rmse_elm {

namespace {

constexpr std::uint64_t kMemberTag = 0x454c4d;  // "ELM"
constexpr std::uint64_t kGaTag = 0x4741;        // "GA"

struct Pool {
  std::vector<ElmModel> models;
  std::vector<MemberOrigin> origins;
};

// Rows used to fit the ELMs and rows used to estimate correlation matrices.
struct TrainingView {
  Matrix fit_x, fit_y;
  Matrix est_x, est_y;
};

TrainingView make_view(const Matrix& x, const Matrix& y, double validation_fraction) {
  if (x.rows() == 0) throw DimensionError("training set is empty");
  if (x.rows() != y.rows()) throw DimensionError("inputs and targets disagree on row count");
  if (validation_fraction <= 0.0) return {x, y, x, y};

  const auto n = x.rows();
  const auto n_val = static_cast<Eigen::Index>(std::floor(validation_fraction * static_cast<double>(n)));
  if (n_val < 1 || n_val >= n) throw ConfigError("validation_fraction leaves an empty fit or estimation set");
  const auto n_fit = n - n_val;
  return {x.topRows(n_fit), y.topRows(n_fit), x.bottomRows(n_val), y.bottomRows(n_val)};
}

Vector flatten(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

CorrelationMatrix pool_correlation(const std::vector<ElmModel>& models, const TrainingView& view) {
  std::vector<Vector> preds;
  preds.reserve(models.size());
  for (const auto& m : models) preds.push_back(flatten(predict(m, view.est_x)));
  return correlation_matrix(preds, flatten(view.est_y));
}

GaConfig ga_for(const GaConfig& base, Seed seed, std::size_t stage) {
  GaConfig g = base;
  g.seed = derive_seed(base.seed, {kGaTag, seed, stage});
  return g;
}

Pool train_group(const TrainingView& view, std::size_t group, std::size_t count, Eigen::Index hidden,
                 Activation activation, Seed seed) {
  Pool pool;
  pool.models.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    pool.models.push_back(train_elm(view.fit_x, view.fit_y, hidden, activation, member_seed(seed, group, i)));
    pool.origins.push_back({group, i});
  }
  return pool;
}

Pool keep(Pool&& pool, const std::vector<std::size_t>& indices) {
  Pool out;
  for (std::size_t i : indices) {
    out.models.push_back(std::move(pool.models[i]));
    out.origins.push_back(pool.origins[i]);
  }
  return out;
}

// GA weights followed by thresholding.
std::vector<std::size_t> select_pool(const Pool& pool, const TrainingView& view, const GaConfig& ga,
                                     double lambda) {
  if (pool.models.size() == 1) return {0};
  const auto c = pool_correlation(pool.models, view);
  const auto outcome = ga_evolve(c, ga);
  return select_by_threshold(outcome.weights, lambda);
}

// Layer 1 shared by RMSE-ELM and E-GASEN.
Pool first_layer(const TrainingView& view, const EnsembleConfig& config, SelectionTrace& trace) {
  Pool pooled;
  const double lambda1 = config.first_layer_lambda();
  for (std::size_t g = 0; g < config.groups; ++g) {
    Pool group = train_group(view, g, config.group_size, config.hidden_nodes, config.activation, config.seed);
    const auto chosen = select_pool(group, view, ga_for(config.ga, config.seed, g), lambda1);
    trace.group_survivors.push_back(chosen.size());
    Pool survivors = keep(std::move(group), chosen);
    for (std::size_t i = 0; i < survivors.models.size(); ++i) {
      pooled.models.push_back(std::move(survivors.models[i]));
      pooled.origins.push_back(survivors.origins[i]);
    }
  }
  trace.trained = config.groups * config.group_size;
  trace.pool_size = pooled.models.size();
  trace.pool = pooled.origins;
  return pooled;
}

Ensemble finish(Pool&& pool, SelectionTrace trace) {
  trace.final_size = pool.models.size();
  return Ensemble(std::move(pool.models), std::move(pool.origins), std::move(trace));
}

}  // namespace

double EnsembleConfig::first_layer_lambda() const {
  return lambda1 ? *lambda1 : 1.0 / static_cast<double>(group_size);
}

void EnsembleConfig::validate() const {
  if (groups == 0) throw ConfigError("groups must be positive");
  if (group_size == 0) throw ConfigError("group_size must be positive");
  if (hidden_nodes <= 0) throw ConfigError("hidden_nodes must be positive");
  const double l1 = first_layer_lambda();
  if (!(l1 >= 0.0 && l1 <= 1.0)) throw ConfigError("lambda1 must be in [0, 1]");
  if (lambda2.kind == Lambda2Rule::Kind::Fixed && !(lambda2.value >= 0.0 && lambda2.value <= 1.0))
    throw ConfigError("fixed lambda2 must be in [0, 1]");
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0))
    throw ConfigError("validation_fraction must be in [0, 1)");
  ga.validate();
}

Ensemble::Ensemble(std::vector<ElmModel> members, std::vector<MemberOrigin> origins, SelectionTrace trace)
    : members_(std::move(members)), origins_(std::move(origins)), trace_(std::move(trace)) {
  if (members_.empty()) throw DimensionError("an ensemble needs at least one member");
  if (origins_.size() != members_.size()) throw DimensionError("one origin per ensemble member is required");
}

Seed member_seed(Seed master, std::size_t group, std::size_t index) {
  return derive_seed(master, {kMemberTag, group, index});
}

Ensemble train_rmse_elm(const Matrix& inputs, const Matrix& targets, const EnsembleConfig& config) {
  config.validate();
  const TrainingView view = make_view(inputs, targets, config.validation_fraction);
  SelectionTrace trace;
  Pool pool = first_layer(view, config, trace);

  const std::size_t n2 = pool.models.size();
  if (config.retrain_pool) {
    pool = train_group(view, config.groups, n2, config.hidden_nodes, config.activation, config.seed);
    trace.trained += n2;
  }

  trace.lambda2 = config.lambda2.kind == Lambda2Rule::Kind::Fixed ? config.lambda2.value
                                                                   : 1.0 / static_cast<double>(n2);
  const auto chosen = select_pool(pool, view, ga_for(config.ga, config.seed, config.groups), trace.lambda2);
  return finish(keep(std::move(pool), chosen), std::move(trace));
}

Ensemble train_e_gasen(const Matrix& inputs, const Matrix& targets, const EnsembleConfig& config) {
  config.validate();
  const TrainingView view = make_view(inputs, targets, config.validation_fraction);
  SelectionTrace trace;
  Pool pool = first_layer(view, config, trace);
  return finish(std::move(pool), std::move(trace));
}

Ensemble train_gasen_elm(const Matrix& inputs, const Matrix& targets, std::size_t n_learners,
                         Eigen::Index hidden_nodes, Activation activation, double lambda, const GaConfig& ga,
                         Seed seed) {
  EnsembleConfig config;
  config.groups = 1;
  config.group_size = n_learners;
  config.hidden_nodes = hidden_nodes;
  config.activation = activation;
  config.lambda1 = lambda;
  config.ga = ga;
  config.seed = seed;
  // One group whose survivors are averaged directly is E-GASEN with M = 1.
  return train_e_gasen(inputs, targets, config);
}

Ensemble train_simple_ensemble(const Matrix& inputs, const Matrix& targets, std::size_t n_learners,
                               Eigen::Index hidden_nodes, Activation activation, Seed seed) {
  if (n_learners == 0) throw ConfigError("n_learners must be positive");
  const TrainingView view = make_view(inputs, targets, 0.0);
  Pool pool = train_group(view, 0, n_learners, hidden_nodes, activation, seed);
  SelectionTrace trace;
  trace.trained = n_learners;
  return finish(std::move(pool), std::move(trace));
}

Matrix predict_ensemble(const Ensemble& ensemble, const Matrix& inputs) {
  Matrix sum = predict(ensemble.members().front(), inputs);
  for (std::size_t i = 1; i < ensemble.size(); ++i) sum += predict(ensemble.members()[i], inputs);
  return sum / static_cast<double>(ensemble.size());
}

}  // namespace rmse_elm
