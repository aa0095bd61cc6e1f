#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rmse_elm/elm.hpp"
#include "rmse_elm/random.hpp"

namespace rmse_elm {

struct Dataset {
  Matrix x;  // n_samples x n_features
  Vector y;  // n_samples
  std::vector<std::string> feature_names;
  std::string target_name;
  std::string name;

  Eigen::Index n_samples() const noexcept { return x.rows(); }
  Eigen::Index n_features() const noexcept { return x.cols(); }
  /// Throws DataError on shape disagreement or non-finite values.
  void validate() const;
};

/// Maps the string values of a categorical column to numbers.
struct CategoricalEncoding {
  std::string column;  // header name or zero-based index
  std::map<std::string, double> codes;
};

/// Abalone's sex attribute: F -> -1, I -> 0, M -> 1.
CategoricalEncoding abalone_sex_encoding(std::string column = "0");

struct CsvOptions {
  std::string target = "-1";  // header name or index; negative counts from the end
  bool has_header = true;
  char delimiter = ',';
  std::vector<CategoricalEncoding> categorical;
};

/// Parse errors name the offending row and column.
Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options);

/// Writes features then target, with a header row.
void save_csv(const Dataset& ds, const std::filesystem::path& path);

struct NormalizationParams {
  Vector mean;
  Vector scale;  // population standard deviation; 0 marks a constant column
};

/// Column statistics of `x` (population std). Needs at least two rows.
NormalizationParams fit_normalization(const Matrix& x);
/// z-score with the given statistics; constant columns map to 0.
Matrix apply_normalization(const NormalizationParams& params, const Matrix& x);
/// Fits on `ds` and transforms it.
std::pair<Dataset, NormalizationParams> normalize(const Dataset& ds);

/// Irrelevant Gaussian columns N(0, variance), one per entry.
struct NoiseSpec {
  std::string id;
  std::vector<double> variances;
  Seed seed = kDefaultSeed;

  void validate() const;
};

/// The two blending protocols: 7 and 10 irrelevant variables.
std::vector<double> noise_variances_7();
std::vector<double> noise_variances_10();

/// Appends one i.i.d. N(0, variance) column per spec entry. Column j draws
/// from its own stream, so original columns and earlier noise columns do
/// not depend on later ones.
Dataset blend_noise(const Dataset& ds, const NoiseSpec& spec);

struct SplitSpec {
  std::size_t n_train = 0;
  std::optional<Seed> shuffle_seed;  // nullopt keeps file order
};

/// Row permutation the split uses (identity without a shuffle seed).
std::vector<Eigen::Index> split_order(Eigen::Index n_samples, const SplitSpec& spec);

/// First n_train rows (after the optional shuffle) train, the rest test.
std::pair<Dataset, Dataset> split(const Dataset& ds, const SplitSpec& spec);

enum class BlendOrder {
  NormalizeThenBlend,  // z-score original features, append noise at its own variance
  BlendThenNormalize,  // append noise, then z-score every column
};

std::string_view to_string(BlendOrder order) noexcept;

struct PreparedData {
  Dataset train;
  Dataset test;
  NormalizationParams normalization;
};

/// Full blended-data pipeline: blend noise over all rows, split, then
/// normalise with training-row statistics according to `order`.
PreparedData prepare(const Dataset& raw, const std::optional<NoiseSpec>& noise, const SplitSpec& split_spec,
                     BlendOrder order);

/// Breiman's 21-attribute waveform generator (three classes, N(0,1) noise).
/// The class label 0/1/2 is the numeric target.
Dataset generate_waveform(std::size_t n_samples, Seed seed);

/// Plain-text `key: value` manifest recording how a dataset was produced.
void write_manifest(const std::filesystem::path& path, const std::vector<std::pair<std::string, std::string>>& entries);

}  // namespace rmse_elm
