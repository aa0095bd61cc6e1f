#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "rmse_elm/elm.hpp"
#include "rmse_elm/random.hpp"
#include "rmse_elm/selective.hpp"

namespace rmse_elm {

/// How the second-layer threshold is chosen.
struct Lambda2Rule {
  enum class Kind { ReciprocalOfPool, Fixed } kind = Kind::ReciprocalOfPool;
  double value = 0.0;  // used when kind == Fixed

  static Lambda2Rule reciprocal_of_pool() { return {}; }
  static Lambda2Rule fixed(double v) { return {Kind::Fixed, v}; }
};

struct EnsembleConfig {
  std::size_t groups = 4;       // first-layer groups M
  std::size_t group_size = 20;  // ELMs per group N1
  Eigen::Index hidden_nodes = 50;
  Activation activation = Activation::Sigmoid;
  // First-layer threshold. Defaults to 1/N1 (= 0.05 for N1 = 20) when unset.
  std::optional<double> lambda1;
  Lambda2Rule lambda2;
  GaConfig ga;
  Seed seed = kDefaultSeed;
  // Retrain N2 fresh ELMs for the second layer instead of reusing the
  // first-layer survivors.
  bool retrain_pool = false;
  // Fraction of training rows held out (from the end) to estimate the
  // correlation matrices. 0 uses the full training set.
  double validation_fraction = 0.0;

  double first_layer_lambda() const;
  void validate() const;
};

/// Where a member came from: (group, index within group). Second-layer
/// retrained members use group == groups.
struct MemberOrigin {
  std::size_t group;
  std::size_t index;
  friend bool operator==(const MemberOrigin&, const MemberOrigin&) = default;
  friend auto operator<=>(const MemberOrigin&, const MemberOrigin&) = default;
};

/// Survivor bookkeeping for one training call.
struct SelectionTrace {
  std::size_t trained = 0;                   // total ELMs trained
  std::vector<std::size_t> group_survivors;  // n_i per first-layer group
  std::size_t pool_size = 0;                 // N2 (0 for single-layer methods)
  std::size_t final_size = 0;
  double lambda2 = 0.0;
  std::vector<MemberOrigin> pool;            // first-layer survivors
};

/// Simple-average ensemble of trained ELMs.
class Ensemble {
 public:
  Ensemble(std::vector<ElmModel> members, std::vector<MemberOrigin> origins, SelectionTrace trace);

  const std::vector<ElmModel>& members() const noexcept { return members_; }
  const std::vector<MemberOrigin>& origins() const noexcept { return origins_; }
  const SelectionTrace& trace() const noexcept { return trace_; }
  std::size_t size() const noexcept { return members_.size(); }

 private:
  std::vector<ElmModel> members_;
  std::vector<MemberOrigin> origins_;
  SelectionTrace trace_;
};

/// Per-member seed derived from the master seed and member position.
Seed member_seed(Seed master, std::size_t group, std::size_t index);

/// Two-layer recursive selective ensemble: per-group GA selection feeds a
/// candidate pool that is selected again.
Ensemble train_rmse_elm(const Matrix& inputs, const Matrix& targets, const EnsembleConfig& config);

/// As train_rmse_elm, but the second layer averages the whole pool.
Ensemble train_e_gasen(const Matrix& inputs, const Matrix& targets, const EnsembleConfig& config);

/// Single-layer GA selective ensemble over n_learners ELMs.
Ensemble train_gasen_elm(const Matrix& inputs, const Matrix& targets, std::size_t n_learners,
                         Eigen::Index hidden_nodes, Activation activation, double lambda, const GaConfig& ga,
                         Seed seed);

/// Average of n_learners ELMs with no selection.
Ensemble train_simple_ensemble(const Matrix& inputs, const Matrix& targets, std::size_t n_learners,
                               Eigen::Index hidden_nodes, Activation activation, Seed seed);

/// Arithmetic mean of the member predictions.
Matrix predict_ensemble(const Ensemble& ensemble, const Matrix& inputs);

}  // namespace rmse_elm
