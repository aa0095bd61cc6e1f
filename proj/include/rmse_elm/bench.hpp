#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rmse_elm/data.hpp"
#include "rmse_elm/elm.hpp"
#include "rmse_elm/ensemble.hpp"

namespace rmse_elm {

enum class Method { Elm, SimpleEnsemble, GasenElm, EGasen, RmseElm };

inline constexpr Method kAllMethods[] = {Method::Elm, Method::SimpleEnsemble, Method::GasenElm, Method::EGasen,
                                         Method::RmseElm};

std::string_view to_string(Method m) noexcept;
std::optional<Method> parse_method(std::string_view name);

/// Everything needed to train any of the methods on one dataset.
struct MethodParams {
  EnsembleConfig ensemble;          // M, N1, L, activation, lambdas, GA
  std::size_t gasen_size = 20;      // learners in single-layer GASEN-ELM
  std::optional<std::size_t> simple_size;  // simple ensemble size; defaults to M * N1
  std::optional<double> gasen_lambda;      // defaults to 1 / gasen_size

  std::size_t simple_ensemble_size() const { return simple_size.value_or(ensemble.groups * ensemble.group_size); }
  double gasen_threshold() const { return gasen_lambda.value_or(1.0 / static_cast<double>(gasen_size)); }
};

/// A trained model of any method.
class TrainedModel {
 public:
  explicit TrainedModel(ElmModel m) : model_(std::move(m)) {}
  explicit TrainedModel(Ensemble e) : model_(std::move(e)) {}

  Matrix predict(const Matrix& inputs) const;
  std::size_t member_count() const;
  /// Selection bookkeeping; nullptr for a plain ELM.
  const SelectionTrace* trace() const;

 private:
  std::variant<ElmModel, Ensemble> model_;
};

/// Trains `method` with member seeds derived from `seed`.
TrainedModel train_method(Method method, const Matrix& inputs, const Matrix& targets, const MethodParams& params,
                          Seed seed);

/// Mean squared error over all entries.
double mse(const Vector& pred, const Vector& target);

/// Sample standard deviation (n - 1 denominator). Needs at least two values.
double std_over_runs(std::span<const double> values);

/// (other - ours) / other * 100. Positive means `ours` is lower.
double comparison_pct(double other, double ours);

struct RunRecord {
  Method method;
  std::string dataset;
  std::string noise_spec_id;
  std::size_t run_index;
  double test_mse;
  double wall_time_s;  // training call only
  Seed seed;
};

/// Where a benchmark dataset comes from.
struct DatasetSource {
  std::string name;
  std::filesystem::path path;  // CSV file; empty when generated
  CsvOptions csv;
  std::optional<std::size_t> waveform_samples;  // use the waveform generator instead of a file
  SplitSpec split;
};

struct BenchConfig {
  std::vector<DatasetSource> datasets;
  std::vector<NoiseSpec> noise_specs;  // seeds are derived per dataset; the seed field is ignored
  std::vector<Method> methods{std::begin(kAllMethods), std::end(kAllMethods)};
  std::size_t runs = 5;
  Seed master_seed = kDefaultSeed;
  MethodParams params;
  BlendOrder blend_order = BlendOrder::NormalizeThenBlend;
  bool resample_noise = false;  // fresh noise columns every run
  std::size_t jobs = 1;
  bool serial_timing = false;   // force one worker so CC numbers are not contended
  std::filesystem::path out_dir;

  void validate() const;
};

/// Reads the INI-style benchmark configuration. Relative dataset paths are
/// resolved against the config file's directory. Throws ConfigError.
BenchConfig load_bench_config(const std::filesystem::path& path);

struct CellKey {
  std::string dataset;
  std::string noise;
  Method method;
  friend auto operator<=>(const CellKey&, const CellKey&) = default;
};

struct CellSummary {
  std::size_t runs = 0;
  double mean_mse = 0.0;
  std::optional<double> std_mse;  // undefined for a single run
  double mean_cc_s = 0.0;
  std::optional<std::string> error;  // set when the cell could not run
};

struct ExperimentReport {
  std::vector<std::string> datasets;  // config order
  std::vector<std::string> noises;
  std::vector<Method> methods;
  std::vector<RunRecord> records;
  std::map<CellKey, CellSummary> cells;
  // Run settings; unknown when the report is rebuilt from runs.csv.
  std::optional<BlendOrder> blend_order;
  std::optional<Seed> master_seed;
  bool resample_noise = false;

  const CellSummary* cell(const std::string& dataset, const std::string& noise, Method m) const;
  /// comparison_pct of `other` against RMSE-ELM on mean MSE, or nullopt if
  /// either cell is missing.
  std::optional<double> mse_comparison(const std::string& dataset, const std::string& noise, Method other) const;
  std::optional<double> std_comparison(const std::string& dataset, const std::string& noise, Method other) const;
};

/// Folds run records into per-cell summaries (failed cells are added separately).
std::map<CellKey, CellSummary> summarize(std::span<const RunRecord> records);

/// Label used for the no-noise condition in reports.
inline constexpr const char* kNoNoiseId = "none";

ExperimentReport run_experiment(const BenchConfig& config);

/// Reads records written to runs.csv by write_report.
std::vector<RunRecord> load_run_records(const std::filesystem::path& path);

/// Rebuilds a report (without failed cells) from persisted run records.
ExperimentReport report_from_records(std::vector<RunRecord> records);

/// Writes runs.csv, mse.csv, std.csv, cc.csv, mse_comparison.csv,
/// std_comparison.csv and summary.txt into `dir`.
void write_report(const ExperimentReport& report, const std::filesystem::path& dir);

std::string format_summary(const ExperimentReport& report);

}  // namespace rmse_elm
