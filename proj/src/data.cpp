#include "rmse_elm/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "rmse_elm/errors.hpp"

namespace rmse_elm {

void Dataset::validate() const {
  if (x.rows() != y.size()) throw DataError(name + ": feature and target row counts differ");
  if (static_cast<Eigen::Index>(feature_names.size()) != x.cols())
    throw DataError(name + ": feature name count differs from column count");
  if (!x.allFinite() || !y.allFinite()) throw DataError(name + ": non-finite values");
}

CategoricalEncoding abalone_sex_encoding(std::string column) {
  return {std::move(column), {{"F", -1.0}, {"I", 0.0}, {"M", 1.0}}};
}

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\"'";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_fields(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string_view rest(line);
  while (true) {
    const auto pos = rest.find(delim);
    out.emplace_back(trim(rest.substr(0, pos)));
    if (pos == std::string_view::npos) break;
    rest.remove_prefix(pos + 1);
  }
  return out;
}

std::optional<double> parse_number(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

bool is_blank(const std::string& line) { return trim(line).empty(); }

// Resolves a header name or (possibly negative) index to a column position.
std::optional<std::size_t> resolve_column(const std::string& ref, const std::vector<std::string>& header,
                                          std::size_t n_cols) {
  if (!header.empty()) {
    const auto it = std::find(header.begin(), header.end(), ref);
    if (it != header.end()) return static_cast<std::size_t>(it - header.begin());
  }
  long idx = 0;
  const auto [ptr, ec] = std::from_chars(ref.data(), ref.data() + ref.size(), idx);
  if (ec != std::errc() || ptr != ref.data() + ref.size()) return std::nullopt;
  if (idx < 0) idx += static_cast<long>(n_cols);
  if (idx < 0 || idx >= static_cast<long>(n_cols)) return std::nullopt;
  return static_cast<std::size_t>(idx);
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset file '" + path.string() + "'");

  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
  std::vector<std::string> header;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    auto fields = split_fields(line, options.delimiter);
    if (options.has_header && header.empty() && rows.empty()) {
      header = std::move(fields);
      continue;
    }
    rows.push_back(std::move(fields));
    line_numbers.push_back(line_no);
  }
  if (rows.empty()) throw DataError(path.string() + ": no data rows");

  const std::size_t n_cols = header.empty() ? rows.front().size() : header.size();
  if (n_cols < 2) throw DataError(path.string() + ": need at least one feature and one target column");
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != n_cols) {
      throw DataError(path.string() + ": line " + std::to_string(line_numbers[r]) + " has " +
                      std::to_string(rows[r].size()) + " fields, expected " + std::to_string(n_cols));
    }
  }

  const auto target = resolve_column(options.target, header, n_cols);
  if (!target) throw DataError(path.string() + ": target column '" + options.target + "' not found");

  std::map<std::size_t, const CategoricalEncoding*> encodings;
  for (const auto& enc : options.categorical) {
    const auto col = resolve_column(enc.column, header, n_cols);
    if (!col) throw DataError(path.string() + ": categorical column '" + enc.column + "' not found");
    encodings[*col] = &enc;
  }

  Dataset ds;
  ds.name = path.stem().string();
  const auto n = static_cast<Eigen::Index>(rows.size());
  ds.x.resize(n, static_cast<Eigen::Index>(n_cols - 1));
  ds.y.resize(n);
  for (std::size_t c = 0; c < n_cols; ++c) {
    const std::string name = header.empty() ? "x" + std::to_string(c) : header[c];
    if (c == *target)
      ds.target_name = name;
    else
      ds.feature_names.push_back(name);
  }

  for (Eigen::Index r = 0; r < n; ++r) {
    Eigen::Index out_col = 0;
    for (std::size_t c = 0; c < n_cols; ++c) {
      const std::string& cell = rows[static_cast<std::size_t>(r)][c];
      std::optional<double> value;
      if (const auto enc = encodings.find(c); enc != encodings.end()) {
        const auto code = enc->second->codes.find(cell);
        if (code != enc->second->codes.end()) value = code->second;
      } else {
        value = parse_number(cell);
      }
      if (!value) {
        throw DataError(path.string() + ": line " + std::to_string(line_numbers[static_cast<std::size_t>(r)]) +
                        ", column " + std::to_string(c + 1) + ": cannot parse '" + cell + "'");
      }
      if (c == *target)
        ds.y(r) = *value;
      else
        ds.x(r, out_col++) = *value;
    }
  }
  ds.validate();
  return ds;
}

void save_csv(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out.precision(17);
  for (const auto& name : ds.feature_names) out << name << ',';
  out << (ds.target_name.empty() ? "target" : ds.target_name) << '\n';
  for (Eigen::Index r = 0; r < ds.n_samples(); ++r) {
    for (Eigen::Index c = 0; c < ds.n_features(); ++c) out << ds.x(r, c) << ',';
    out << ds.y(r) << '\n';
  }
  if (!out) throw DataError("failed writing '" + path.string() + "'");
}

NormalizationParams fit_normalization(const Matrix& x) {
  if (x.rows() < 2) throw DataError("normalisation needs at least two rows");
  NormalizationParams p;
  p.mean = x.colwise().mean().transpose();
  const Matrix centred = x.rowwise() - p.mean.transpose();
  p.scale = (centred.colwise().squaredNorm() / static_cast<double>(x.rows())).cwiseSqrt().transpose();
  return p;
}

Matrix apply_normalization(const NormalizationParams& params, const Matrix& x) {
  if (x.cols() != params.mean.size()) throw DimensionError("normalisation parameters do not match column count");
  Matrix out(x.rows(), x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    if (params.scale(c) > 0.0)
      out.col(c) = (x.col(c).array() - params.mean(c)) / params.scale(c);
    else
      out.col(c).setZero();
  }
  return out;
}

std::pair<Dataset, NormalizationParams> normalize(const Dataset& ds) {
  auto params = fit_normalization(ds.x);
  Dataset out = ds;
  out.x = apply_normalization(params, ds.x);
  return {std::move(out), std::move(params)};
}

void NoiseSpec::validate() const {
  if (variances.empty()) throw ConfigError("noise spec '" + id + "' has no variances");
  for (double v : variances)
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("noise spec '" + id + "' has a non-positive variance");
}

std::string_view to_string(BlendOrder order) noexcept {
  return order == BlendOrder::NormalizeThenBlend ? "normalize-then-blend" : "blend-then-normalize";
}

std::vector<double> noise_variances_7() { return {2.0, 1.0, 0.5, 0.1, 0.005, 0.001, 0.0005}; }

std::vector<double> noise_variances_10() { return {2.0, 1.0, 0.5, 0.1, 0.05, 0.01, 0.005, 0.001, 0.0005, 0.0001}; }

Dataset blend_noise(const Dataset& ds, const NoiseSpec& spec) {
  spec.validate();
  const auto n = ds.n_samples();
  const auto d = ds.n_features();
  const auto k = static_cast<Eigen::Index>(spec.variances.size());

  Dataset out = ds;
  out.x.conservativeResize(n, d + k);
  for (Eigen::Index j = 0; j < k; ++j) {
    Rng rng = make_rng(derive_seed(spec.seed, {static_cast<std::uint64_t>(j)}));
    std::normal_distribution<double> gauss(0.0, std::sqrt(spec.variances[static_cast<std::size_t>(j)]));
    for (Eigen::Index r = 0; r < n; ++r) out.x(r, d + j) = gauss(rng);
    out.feature_names.push_back("noise" + std::to_string(j));
  }
  return out;
}

std::vector<Eigen::Index> split_order(Eigen::Index n_samples, const SplitSpec& spec) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n_samples));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  if (spec.shuffle_seed) {
    Rng rng = make_rng(*spec.shuffle_seed);
    // Explicit Fisher-Yates: std::shuffle's output is implementation-defined.
    for (std::size_t i = order.size(); i > 1; --i) {
      std::uniform_int_distribution<std::size_t> pick(0, i - 1);
      std::swap(order[i - 1], order[pick(rng)]);
    }
  }
  return order;
}

namespace {

Dataset take_rows(const Dataset& ds, std::span<const Eigen::Index> rows) {
  Dataset out;
  out.name = ds.name;
  out.feature_names = ds.feature_names;
  out.target_name = ds.target_name;
  out.x.resize(static_cast<Eigen::Index>(rows.size()), ds.n_features());
  out.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.x.row(static_cast<Eigen::Index>(i)) = ds.x.row(rows[i]);
    out.y(static_cast<Eigen::Index>(i)) = ds.y(rows[i]);
  }
  return out;
}

}  // namespace

std::pair<Dataset, Dataset> split(const Dataset& ds, const SplitSpec& spec) {
  if (spec.n_train == 0 || static_cast<Eigen::Index>(spec.n_train) >= ds.n_samples()) {
    throw ConfigError("n_train must be in [1, " + std::to_string(ds.n_samples() - 1) + "], got " +
                      std::to_string(spec.n_train));
  }
  const auto order = split_order(ds.n_samples(), spec);
  const std::span<const Eigen::Index> all(order);
  return {take_rows(ds, all.first(spec.n_train)), take_rows(ds, all.subspan(spec.n_train))};
}

PreparedData prepare(const Dataset& raw, const std::optional<NoiseSpec>& noise, const SplitSpec& split_spec,
                     BlendOrder order) {
  raw.validate();
  const Eigen::Index original = raw.n_features();
  const Dataset blended = noise ? blend_noise(raw, *noise) : raw;
  auto [train, test] = split(blended, split_spec);

  const Eigen::Index normalized_cols = order == BlendOrder::NormalizeThenBlend ? original : blended.n_features();
  PreparedData out;
  out.normalization = fit_normalization(train.x.leftCols(normalized_cols));
  train.x.leftCols(normalized_cols) = apply_normalization(out.normalization, train.x.leftCols(normalized_cols));
  test.x.leftCols(normalized_cols) = apply_normalization(out.normalization, test.x.leftCols(normalized_cols));
  out.train = std::move(train);
  out.test = std::move(test);
  return out;
}

Dataset generate_waveform(std::size_t n_samples, Seed seed) {
  constexpr int kAttrs = 21;
  // Triangular bases peaking at attributes 11, 15 and 7 (1-based).
  auto base = [](int peak, int i) { return std::max(6.0 - std::abs(i - peak), 0.0); };
  constexpr int kPeaks[3] = {11, 15, 7};
  constexpr int kPairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};

  Rng rng = make_rng(seed);
  std::uniform_int_distribution<int> pick_class(0, 2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Dataset ds;
  ds.name = "waveform";
  ds.target_name = "class";
  ds.x.resize(static_cast<Eigen::Index>(n_samples), kAttrs);
  ds.y.resize(static_cast<Eigen::Index>(n_samples));
  for (int a = 0; a < kAttrs; ++a) ds.feature_names.push_back("x" + std::to_string(a + 1));

  for (Eigen::Index r = 0; r < static_cast<Eigen::Index>(n_samples); ++r) {
    const int cls = pick_class(rng);
    const double u = unit(rng);
    const int first = kPeaks[kPairs[cls][0]];
    const int second = kPeaks[kPairs[cls][1]];
    for (int a = 0; a < kAttrs; ++a) {
      const int i = a + 1;
      ds.x(r, a) = u * base(first, i) + (1.0 - u) * base(second, i) + gauss(rng);
    }
    ds.y(r) = cls;
  }
  return ds;
}

void write_manifest(const std::filesystem::path& path,
                    const std::vector<std::pair<std::string, std::string>>& entries) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write manifest '" + path.string() + "'");
  for (const auto& [key, value] : entries) out << key << ": " << value << '\n';
  if (!out) throw DataError("failed writing manifest '" + path.string() + "'");
}

}  // namespace rmse_elm
