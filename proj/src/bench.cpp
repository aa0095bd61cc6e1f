#include "rmse_elm/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "rmse_elm/errors.hpp"

namespace rmse_elm {

std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::Elm: return "ELM";
    case Method::SimpleEnsemble: return "SimpleEnsemble";
    case Method::GasenElm: return "GASEN-ELM";
    case Method::EGasen: return "E-GASEN";
    case Method::RmseElm: return "RMSE-ELM";
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  lower.erase(std::remove(lower.begin(), lower.end(), '-'), lower.end());
  lower.erase(std::remove(lower.begin(), lower.end(), '_'), lower.end());
  if (lower == "elm") return Method::Elm;
  if (lower == "simpleensemble" || lower == "simple" || lower == "average") return Method::SimpleEnsemble;
  if (lower == "gasenelm" || lower == "gasen") return Method::GasenElm;
  if (lower == "egasen") return Method::EGasen;
  if (lower == "rmseelm" || lower == "rmse") return Method::RmseElm;
  return std::nullopt;
}

Matrix TrainedModel::predict(const Matrix& inputs) const {
  return std::visit(
      [&](const auto& m) -> Matrix {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, ElmModel>)
          return rmse_elm::predict(m, inputs);
        else
          return predict_ensemble(m, inputs);
      },
      model_);
}

std::size_t TrainedModel::member_count() const {
  if (const auto* e = std::get_if<Ensemble>(&model_)) return e->size();
  return 1;
}

const SelectionTrace* TrainedModel::trace() const {
  if (const auto* e = std::get_if<Ensemble>(&model_)) return &e->trace();
  return nullptr;
}

TrainedModel train_method(Method method, const Matrix& inputs, const Matrix& targets, const MethodParams& params,
                          Seed seed) {
  const EnsembleConfig& ec = params.ensemble;
  switch (method) {
    case Method::Elm:
      return TrainedModel(train_elm(inputs, targets, ec.hidden_nodes, ec.activation, member_seed(seed, 0, 0)));
    case Method::SimpleEnsemble:
      return TrainedModel(
          train_simple_ensemble(inputs, targets, params.simple_ensemble_size(), ec.hidden_nodes, ec.activation, seed));
    case Method::GasenElm:
      return TrainedModel(train_gasen_elm(inputs, targets, params.gasen_size, ec.hidden_nodes, ec.activation,
                                          params.gasen_threshold(), ec.ga, seed));
    case Method::EGasen: {
      EnsembleConfig c = ec;
      c.seed = seed;
      return TrainedModel(train_e_gasen(inputs, targets, c));
    }
    case Method::RmseElm: {
      EnsembleConfig c = ec;
      c.seed = seed;
      return TrainedModel(train_rmse_elm(inputs, targets, c));
    }
  }
  throw ConfigError("unknown method");
}

double mse(const Vector& pred, const Vector& target) {
  if (pred.size() != target.size()) throw DimensionError("mse: prediction and target lengths differ");
  if (pred.size() == 0) throw DimensionError("mse: empty input");
  return (pred - target).squaredNorm() / static_cast<double>(pred.size());
}

double std_over_runs(std::span<const double> values) {
  if (values.size() < 2) throw DimensionError("std_over_runs needs at least two values");
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / (n - 1.0));
}

double comparison_pct(double other, double ours) {
  if (!(other > 0.0)) throw DimensionError("comparison_pct: reference value must be positive");
  return (other - ours) / other * 100.0;
}

void BenchConfig::validate() const {
  if (datasets.empty()) throw ConfigError("no datasets configured");
  if (methods.empty()) throw ConfigError("no methods configured");
  if (runs == 0) throw ConfigError("runs must be positive");
  if (jobs == 0) throw ConfigError("jobs must be positive");
  for (const auto& n : noise_specs) n.validate();
  for (const auto& d : datasets) {
    if (d.split.n_train == 0) throw ConfigError("dataset '" + d.name + "' needs n_train");
    if (d.path.empty() && !d.waveform_samples) throw ConfigError("dataset '" + d.name + "' needs a path or generator");
  }
  params.ensemble.validate();
  if (params.gasen_size == 0) throw ConfigError("gasen_size must be positive");
  if (params.simple_ensemble_size() == 0) throw ConfigError("simple_size must be positive");
}

namespace {

namespace pt = boost::property_tree;

constexpr std::uint64_t kRunTag = 0x52554e;    // "RUN"
constexpr std::uint64_t kNoiseTag = 0x4e4f49;  // "NOI"
constexpr std::uint64_t kGenTag = 0x47454e;    // "GEN"

// FNV-1a; stable across platforms, unlike std::hash.
std::uint64_t stable_hash(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string trim_copy(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s, char delim = ',') {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, delim)) {
    auto t = trim_copy(item);
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

template <typename T>
T parse_value(const std::string& section, const std::string& key, const std::string& text) {
  std::istringstream in(text);
  T v{};
  in >> v;
  if (!in || !(in >> std::ws).eof())
    throw ConfigError("[" + section + "] " + key + ": cannot parse '" + text + "'");
  return v;
}

bool parse_bool(const std::string& section, const std::string& key, const std::string& text) {
  if (text == "true" || text == "yes" || text == "1" || text == "on") return true;
  if (text == "false" || text == "no" || text == "0" || text == "off") return false;
  throw ConfigError("[" + section + "] " + key + ": expected a boolean, got '" + text + "'");
}

std::optional<Seed> parse_optional_seed(const std::string& section, const std::string& key, const std::string& text) {
  if (text == "none" || text.empty()) return std::nullopt;
  return parse_value<Seed>(section, key, text);
}

void apply_experiment(BenchConfig& cfg, const pt::ptree& sec, const std::filesystem::path& base) {
  for (const auto& [key, node] : sec) {
    const auto v = node.get_value<std::string>();
    if (key == "runs") cfg.runs = parse_value<std::size_t>("experiment", key, v);
    else if (key == "seed") cfg.master_seed = parse_value<Seed>("experiment", key, v);
    else if (key == "jobs") cfg.jobs = parse_value<std::size_t>("experiment", key, v);
    else if (key == "serial_timing") cfg.serial_timing = parse_bool("experiment", key, v);
    else if (key == "resample_noise") cfg.resample_noise = parse_bool("experiment", key, v);
    else if (key == "out") cfg.out_dir = base / v;
    else if (key == "blend_order") {
      if (v == "normalize-then-blend") cfg.blend_order = BlendOrder::NormalizeThenBlend;
      else if (v == "blend-then-normalize") cfg.blend_order = BlendOrder::BlendThenNormalize;
      else throw ConfigError("[experiment] blend_order: expected normalize-then-blend or blend-then-normalize");
    } else if (key == "methods") {
      cfg.methods.clear();
      for (const auto& name : split_list(v)) {
        const auto m = parse_method(name);
        if (!m) throw ConfigError("[experiment] methods: unknown method '" + name + "'");
        cfg.methods.push_back(*m);
      }
    } else {
      throw ConfigError("[experiment] unknown key '" + key + "'");
    }
  }
}

void apply_ensemble(MethodParams& p, const pt::ptree& sec) {
  auto& e = p.ensemble;
  for (const auto& [key, node] : sec) {
    const auto v = node.get_value<std::string>();
    if (key == "groups") e.groups = parse_value<std::size_t>("ensemble", key, v);
    else if (key == "group_size") e.group_size = parse_value<std::size_t>("ensemble", key, v);
    else if (key == "hidden") e.hidden_nodes = parse_value<Eigen::Index>("ensemble", key, v);
    else if (key == "activation") {
      const auto a = parse_activation(v);
      if (!a) throw ConfigError("[ensemble] activation: unknown '" + v + "'");
      e.activation = *a;
    } else if (key == "lambda") e.lambda1 = parse_value<double>("ensemble", key, v);
    else if (key == "lambda2") {
      e.lambda2 = v == "pool" ? Lambda2Rule::reciprocal_of_pool() : Lambda2Rule::fixed(parse_value<double>("ensemble", key, v));
    } else if (key == "retrain_pool") e.retrain_pool = parse_bool("ensemble", key, v);
    else if (key == "validation_fraction") e.validation_fraction = parse_value<double>("ensemble", key, v);
    else if (key == "gasen_size") p.gasen_size = parse_value<std::size_t>("ensemble", key, v);
    else if (key == "gasen_lambda") p.gasen_lambda = parse_value<double>("ensemble", key, v);
    else if (key == "simple_size") p.simple_size = parse_value<std::size_t>("ensemble", key, v);
    else throw ConfigError("[ensemble] unknown key '" + key + "'");
  }
}

void apply_ga(GaConfig& g, const pt::ptree& sec) {
  for (const auto& [key, node] : sec) {
    const auto v = node.get_value<std::string>();
    if (key == "population") g.population_size = parse_value<std::size_t>("ga", key, v);
    else if (key == "generations") g.generations = parse_value<std::size_t>("ga", key, v);
    else if (key == "crossover") g.crossover_prob = parse_value<double>("ga", key, v);
    else if (key == "mutation") g.mutation_prob = parse_value<double>("ga", key, v);
    else if (key == "mutation_scale") g.mutation_scale = parse_value<double>("ga", key, v);
    else if (key == "elitism") g.elitism_count = parse_value<std::size_t>("ga", key, v);
    else if (key == "seed") g.seed = parse_value<Seed>("ga", key, v);
    else throw ConfigError("[ga] unknown key '" + key + "'");
  }
}

NoiseSpec parse_noise(const std::string& id, const pt::ptree& sec) {
  NoiseSpec spec;
  spec.id = id;
  for (const auto& [key, node] : sec) {
    const auto v = node.get_value<std::string>();
    const std::string where = "noise." + id;
    if (key == "variances") {
      if (v == "n7") spec.variances = noise_variances_7();
      else if (v == "n10") spec.variances = noise_variances_10();
      else
        for (const auto& item : split_list(v)) spec.variances.push_back(parse_value<double>(where, key, item));
    } else {
      throw ConfigError("[" + where + "] unknown key '" + key + "'");
    }
  }
  spec.validate();
  return spec;
}

// "col: A=1 B=2" -> encoding for column col.
CategoricalEncoding parse_categorical(const std::string& where, const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ConfigError("[" + where + "] categorical: expected 'column: A=1 B=2'");
  CategoricalEncoding enc;
  enc.column = trim_copy(text.substr(0, colon));
  for (const auto& pair : split_list(text.substr(colon + 1), ' ')) {
    const auto eq = pair.find('=');
    if (eq == std::string::npos) throw ConfigError("[" + where + "] categorical: bad code '" + pair + "'");
    enc.codes[pair.substr(0, eq)] = parse_value<double>(where, "categorical", pair.substr(eq + 1));
  }
  return enc;
}

DatasetSource parse_dataset(const std::string& name, const pt::ptree& sec, const std::filesystem::path& base) {
  DatasetSource d;
  d.name = name;
  const std::string where = "dataset." + name;
  for (const auto& [key, node] : sec) {
    const auto v = node.get_value<std::string>();
    if (key == "path") d.path = base / v;
    else if (key == "target") d.csv.target = v;
    else if (key == "header") d.csv.has_header = parse_bool(where, key, v);
    else if (key == "n_train") d.split.n_train = parse_value<std::size_t>(where, key, v);
    else if (key == "shuffle_seed") d.split.shuffle_seed = parse_optional_seed(where, key, v);
    else if (key == "categorical") d.csv.categorical.push_back(parse_categorical(where, v));
    else if (key == "generator") {
      if (v != "waveform") throw ConfigError("[" + where + "] generator: only 'waveform' is available");
      d.waveform_samples = d.waveform_samples.value_or(5000);
    } else if (key == "samples") d.waveform_samples = parse_value<std::size_t>(where, key, v);
    else throw ConfigError("[" + where + "] unknown key '" + key + "'");
  }
  return d;
}

}  // namespace

BenchConfig load_bench_config(const std::filesystem::path& path) {
  pt::ptree tree;
  try {
    pt::read_ini(path.string(), tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("cannot read config: ") + e.what());
  }
  const auto base = path.parent_path();
  BenchConfig cfg;
  cfg.out_dir = base / "results";
  for (const auto& [section, body] : tree) {
    if (section == "experiment") apply_experiment(cfg, body, base);
    else if (section == "ensemble") apply_ensemble(cfg.params, body);
    else if (section == "ga") apply_ga(cfg.params.ensemble.ga, body);
    else if (section.rfind("noise.", 0) == 0) cfg.noise_specs.push_back(parse_noise(section.substr(6), body));
    else if (section.rfind("dataset.", 0) == 0) cfg.datasets.push_back(parse_dataset(section.substr(8), body, base));
    else throw ConfigError("unknown config section [" + section + "]");
  }
  cfg.validate();
  return cfg;
}

const CellSummary* ExperimentReport::cell(const std::string& dataset, const std::string& noise, Method m) const {
  const auto it = cells.find({dataset, noise, m});
  return it == cells.end() ? nullptr : &it->second;
}

std::optional<double> ExperimentReport::mse_comparison(const std::string& dataset, const std::string& noise,
                                                       Method other) const {
  const auto* o = cell(dataset, noise, other);
  const auto* r = cell(dataset, noise, Method::RmseElm);
  if (!o || !r || o->error || r->error || !(o->mean_mse > 0.0)) return std::nullopt;
  return comparison_pct(o->mean_mse, r->mean_mse);
}

std::optional<double> ExperimentReport::std_comparison(const std::string& dataset, const std::string& noise,
                                                       Method other) const {
  const auto* o = cell(dataset, noise, other);
  const auto* r = cell(dataset, noise, Method::RmseElm);
  if (!o || !r || !o->std_mse || !r->std_mse || !(*o->std_mse > 0.0)) return std::nullopt;
  return comparison_pct(*o->std_mse, *r->std_mse);
}

std::map<CellKey, CellSummary> summarize(std::span<const RunRecord> records) {
  std::map<CellKey, std::vector<const RunRecord*>> grouped;
  for (const auto& r : records) grouped[{r.dataset, r.noise_spec_id, r.method}].push_back(&r);

  std::map<CellKey, CellSummary> out;
  for (auto& [key, runs] : grouped) {
    std::sort(runs.begin(), runs.end(), [](auto* a, auto* b) { return a->run_index < b->run_index; });
    std::vector<double> mses;
    double cc = 0.0;
    for (const auto* r : runs) {
      mses.push_back(r->test_mse);
      cc += r->wall_time_s;
    }
    CellSummary s;
    s.runs = runs.size();
    double total = 0.0;
    for (double m : mses) total += m;
    s.mean_mse = total / static_cast<double>(mses.size());
    if (mses.size() >= 2) s.std_mse = std_over_runs(mses);
    s.mean_cc_s = cc / static_cast<double>(runs.size());
    out.emplace(key, s);
  }
  return out;
}

namespace {

struct CellTask {
  std::size_t dataset_index;
  std::size_t noise_index;  // == noise_specs.size() for the no-noise condition
  std::string noise_id;
};

Dataset load_source(const DatasetSource& src, Seed master) {
  if (src.waveform_samples) {
    Dataset ds = generate_waveform(*src.waveform_samples, derive_seed(master, {kGenTag, stable_hash(src.name)}));
    ds.name = src.name;
    return ds;
  }
  Dataset ds = load_csv(src.path, src.csv);
  ds.name = src.name;
  return ds;
}

}  // namespace

ExperimentReport run_experiment(const BenchConfig& config) {
  config.validate();

  ExperimentReport report;
  report.methods = config.methods;
  report.blend_order = config.blend_order;
  report.master_seed = config.master_seed;
  report.resample_noise = config.resample_noise;
  for (const auto& d : config.datasets) report.datasets.push_back(d.name);
  if (config.noise_specs.empty()) report.noises.push_back(kNoNoiseId);
  for (const auto& n : config.noise_specs) report.noises.push_back(n.id);

  std::vector<CellTask> tasks;
  for (std::size_t d = 0; d < config.datasets.size(); ++d) {
    if (config.noise_specs.empty()) tasks.push_back({d, 0, kNoNoiseId});
    for (std::size_t n = 0; n < config.noise_specs.size(); ++n) tasks.push_back({d, n, config.noise_specs[n].id});
  }

  std::mutex sink_mutex;
  std::vector<RunRecord> records;
  std::map<CellKey, std::string> failures;

  auto run_task = [&](const CellTask& task) {
    const DatasetSource& src = config.datasets[task.dataset_index];
    try {
      const Dataset raw = load_source(src, config.master_seed);
      SplitSpec split_spec = src.split;
      for (std::size_t run = 0; run < config.runs; ++run) {
        std::optional<NoiseSpec> noise;
        if (!config.noise_specs.empty()) {
          noise = config.noise_specs[task.noise_index];
          noise->seed = config.resample_noise
                            ? derive_seed(config.master_seed, {kNoiseTag, stable_hash(src.name), stable_hash(noise->id), run})
                            : derive_seed(config.master_seed, {kNoiseTag, stable_hash(src.name), stable_hash(noise->id)});
        }
        const PreparedData data = prepare(raw, noise, split_spec, config.blend_order);
        const Matrix y_train = data.train.y;
        const Seed run_seed = derive_seed(config.master_seed, {kRunTag, run});

        for (Method method : config.methods) {
          const auto start = std::chrono::steady_clock::now();
          const TrainedModel model = train_method(method, data.train.x, y_train, config.params, run_seed);
          const auto stop = std::chrono::steady_clock::now();
          const Vector pred = model.predict(data.test.x).col(0);
          RunRecord rec{method,
                        src.name,
                        task.noise_id,
                        run,
                        mse(pred, data.test.y),
                        std::chrono::duration<double>(stop - start).count(),
                        run_seed};
          std::lock_guard lock(sink_mutex);
          records.push_back(std::move(rec));
        }
      }
    } catch (const std::exception& e) {
      std::lock_guard lock(sink_mutex);
      for (Method m : config.methods) failures[{src.name, task.noise_id, m}] = e.what();
    }
  };

  const std::size_t workers = config.serial_timing ? 1 : std::min(config.jobs, tasks.size());
  if (workers <= 1) {
    for (const auto& t : tasks) run_task(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) run_task(tasks[i]);
      });
    }
    for (auto& t : pool) t.join();
  }

  // Deterministic record order regardless of scheduling.
  auto position = [&](const std::string& name, const std::vector<std::string>& list) {
    return std::find(list.begin(), list.end(), name) - list.begin();
  };
  auto method_pos = [&](Method m) { return std::find(config.methods.begin(), config.methods.end(), m) - config.methods.begin(); };
  std::sort(records.begin(), records.end(), [&](const RunRecord& a, const RunRecord& b) {
    return std::tuple(position(a.dataset, report.datasets), position(a.noise_spec_id, report.noises), a.run_index,
                      method_pos(a.method)) <
           std::tuple(position(b.dataset, report.datasets), position(b.noise_spec_id, report.noises), b.run_index,
                      method_pos(b.method));
  });

  report.records = std::move(records);
  report.cells = summarize(report.records);
  for (auto& [key, msg] : failures) {
    CellSummary s;
    s.error = msg;
    report.cells[key] = s;
  }
  return report;
}

std::vector<RunRecord> load_run_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open run records '" + path.string() + "'");
  std::string line;
  std::getline(in, line);  // header
  std::vector<RunRecord> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim_copy(line).empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string item; std::getline(ss, item, ',');) f.push_back(trim_copy(item));
    const std::string where = path.filename().string() + " line " + std::to_string(line_no);
    if (f.size() != 7) throw DataError(where + ": expected 7 fields");
    const auto m = parse_method(f[0]);
    if (!m) throw DataError(where + ": unknown method '" + f[0] + "'");
    try {
      out.push_back({*m, f[1], f[2], std::stoul(f[3]), std::stod(f[5]), std::stod(f[6]), std::stoull(f[4])});
    } catch (const std::exception&) {
      throw DataError(where + ": malformed number");
    }
  }
  return out;
}

ExperimentReport report_from_records(std::vector<RunRecord> records) {
  ExperimentReport report;
  auto add_unique = [](auto& list, const auto& v) {
    if (std::find(list.begin(), list.end(), v) == list.end()) list.push_back(v);
  };
  for (const auto& r : records) {
    add_unique(report.datasets, r.dataset);
    add_unique(report.noises, r.noise_spec_id);
    add_unique(report.methods, r.method);
  }
  report.records = std::move(records);
  report.cells = summarize(report.records);
  return report;
}

namespace {

std::string fmt(double v, int precision = 6) {
  std::ostringstream out;
  out << std::setprecision(precision) << v;
  return out.str();
}

void write_table(const ExperimentReport& report, const std::filesystem::path& path,
                 const std::function<std::string(const std::string&, const std::string&, Method)>& value,
                 bool skip_rmse) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << "dataset,noise";
  for (Method m : report.methods)
    if (!(skip_rmse && m == Method::RmseElm)) out << ',' << to_string(m);
  out << '\n';
  for (const auto& d : report.datasets) {
    for (const auto& n : report.noises) {
      out << d << ',' << n;
      for (Method m : report.methods)
        if (!(skip_rmse && m == Method::RmseElm)) out << ',' << value(d, n, m);
      out << '\n';
    }
  }
}

}  // namespace

void write_report(const ExperimentReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "runs.csv");
    if (!out) throw DataError("cannot write runs.csv in '" + dir.string() + "'");
    out << "method,dataset,noise,run,seed,test_mse,train_time_s\n";
    out << std::setprecision(17);
    for (const auto& r : report.records) {
      out << to_string(r.method) << ',' << r.dataset << ',' << r.noise_spec_id << ',' << r.run_index << ',' << r.seed
          << ',' << r.test_mse << ',' << r.wall_time_s << '\n';
    }
  }
  auto cell_value = [&](auto getter) {
    return [&report, getter](const std::string& d, const std::string& n, Method m) -> std::string {
      const auto* c = report.cell(d, n, m);
      if (!c || c->error) return "error";
      return getter(*c);
    };
  };
  write_table(report, dir / "mse.csv", cell_value([](const CellSummary& c) { return fmt(c.mean_mse); }), false);
  write_table(report, dir / "std.csv",
              cell_value([](const CellSummary& c) { return c.std_mse ? fmt(*c.std_mse) : std::string("undefined"); }),
              false);
  write_table(report, dir / "cc.csv", cell_value([](const CellSummary& c) { return fmt(c.mean_cc_s); }), false);
  auto comparison = [](auto fn) {
    return [fn](const std::string& d, const std::string& n, Method m) -> std::string {
      const auto v = fn(d, n, m);
      return v ? fmt(*v, 4) : std::string("n/a");
    };
  };
  write_table(report, dir / "mse_comparison.csv",
              comparison([&](const auto& d, const auto& n, Method m) { return report.mse_comparison(d, n, m); }), true);
  write_table(report, dir / "std_comparison.csv",
              comparison([&](const auto& d, const auto& n, Method m) { return report.std_comparison(d, n, m); }), true);

  std::ofstream summary(dir / "summary.txt");
  summary << format_summary(report);
}

std::string format_summary(const ExperimentReport& report) {
  std::ostringstream out;
  if (report.master_seed) out << "master seed: " << *report.master_seed << '\n';
  if (report.blend_order)
    out << "blend order: " << to_string(*report.blend_order)
        << (report.resample_noise ? ", noise resampled per run" : ", noise fixed across runs") << "\n\n";
  for (const auto& n : report.noises) {
    out << "noise spec: " << n << '\n';
    out << std::left << std::setw(10) << "dataset" << std::setw(16) << "method" << std::right << std::setw(14)
        << "mean MSE" << std::setw(12) << "STD" << std::setw(12) << "CC (s)" << std::setw(14) << "vs RMSE-ELM"
        << '\n';
    for (const auto& d : report.datasets) {
      for (Method m : report.methods) {
        const auto* c = report.cell(d, n, m);
        out << std::left << std::setw(10) << d << std::setw(16) << to_string(m) << std::right;
        if (!c) {
          out << "  missing\n";
          continue;
        }
        if (c->error) {
          out << "  error: " << *c->error << '\n';
          continue;
        }
        out << std::setw(14) << fmt(c->mean_mse) << std::setw(12) << (c->std_mse ? fmt(*c->std_mse, 4) : "undefined")
            << std::setw(12) << fmt(c->mean_cc_s, 4);
        const auto cmp = m == Method::RmseElm ? std::nullopt : report.mse_comparison(d, n, m);
        out << std::setw(14) << (cmp ? fmt(*cmp, 4) + "%" : std::string("-")) << '\n';
      }
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace rmse_elm
