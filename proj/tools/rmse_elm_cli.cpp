// rmse-elm command line: train, bench, report, blend.

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "rmse_elm/bench.hpp"
#include "rmse_elm/data.hpp"
#include "rmse_elm/errors.hpp"

namespace fs = std::filesystem;
using namespace rmse_elm;

namespace {

enum ExitCode : int { kOk = 0, kFailure = 1, kConfigError = 2, kDataError = 3, kNumericalError = 4 };

struct DataFlags {
  std::string dataset;
  std::string target = "-1";
  bool no_header = false;
  std::vector<std::string> categorical;
  std::size_t waveform = 0;
};

void add_data_flags(CLI::App* cmd, DataFlags& f) {
  cmd->add_option("--dataset", f.dataset, "CSV dataset path");
  cmd->add_option("--target-col", f.target, "Target column name or index (negative counts from the end)");
  cmd->add_flag("--no-header", f.no_header, "CSV has no header row");
  cmd->add_option("--categorical", f.categorical, "Categorical encoding 'column: A=1 B=2' (repeatable)");
  cmd->add_option("--waveform", f.waveform, "Generate N waveform samples instead of reading --dataset");
}

CategoricalEncoding parse_encoding(const std::string& text) {
  if (text == "abalone") return abalone_sex_encoding();
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ConfigError("--categorical expects 'column: A=1 B=2' or 'abalone'");
  CategoricalEncoding enc;
  enc.column = text.substr(0, colon);
  std::istringstream in(text.substr(colon + 1));
  for (std::string pair; in >> pair;) {
    const auto eq = pair.find('=');
    if (eq == std::string::npos) throw ConfigError("--categorical: bad code '" + pair + "'");
    enc.codes[pair.substr(0, eq)] = std::stod(pair.substr(eq + 1));
  }
  return enc;
}

Dataset load_dataset(const DataFlags& f, Seed seed) {
  if (f.waveform > 0) return generate_waveform(f.waveform, derive_seed(seed, {0x47454e}));
  if (f.dataset.empty()) throw ConfigError("--dataset or --waveform is required");
  if (!fs::exists(f.dataset)) throw DataError("dataset file not found: " + f.dataset);
  CsvOptions opts;
  opts.target = f.target;
  opts.has_header = !f.no_header;
  for (const auto& c : f.categorical) opts.categorical.push_back(parse_encoding(c));
  return load_csv(f.dataset, opts);
}

std::optional<NoiseSpec> noise_from_flags(const std::vector<double>& variances, const std::string& preset, Seed seed) {
  NoiseSpec spec;
  spec.seed = derive_seed(seed, {0x4e4f49});
  if (preset == "n7") spec.variances = noise_variances_7();
  else if (preset == "n10") spec.variances = noise_variances_10();
  else if (!preset.empty()) throw ConfigError("--noise-preset must be n7 or n10");
  spec.variances.insert(spec.variances.end(), variances.begin(), variances.end());
  if (spec.variances.empty()) return std::nullopt;
  spec.id = preset.empty() ? "custom" : preset;
  return spec;
}

std::string join(const std::vector<double>& v) {
  std::ostringstream out;
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << v[i];
  return out.str();
}

int run_guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const DimensionError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Extreme learning machines, GASEN selective ensembles and the two-layer RMSE-ELM"};
  app.require_subcommand(1);

  // train
  DataFlags train_data;
  std::string method_name = "RMSE-ELM";
  std::size_t groups = 4, group_size = 20, n_train = 0, train_runs = 1;
  Eigen::Index hidden = 50;
  std::string activation = "sigmoid";
  std::optional<double> lambda;
  Seed train_seed = kDefaultSeed;
  std::optional<Seed> shuffle_seed;
  std::vector<double> train_noise;
  std::string train_preset;
  std::string train_config;
  auto* train = app.add_subcommand("train", "Train one model and report its test MSE");
  add_data_flags(train, train_data);
  train->add_option("--method", method_name, "ELM, SimpleEnsemble, GASEN-ELM, E-GASEN or RMSE-ELM");
  train->add_option("--groups", groups, "First-layer groups M");
  train->add_option("--group-size", group_size, "ELMs per group N1");
  train->add_option("--hidden", hidden, "Hidden nodes per ELM");
  train->add_option("--activation", activation, "sigmoid, hardlim, gaussian or multiquadric");
  train->add_option("--lambda", lambda, "First-layer selection threshold (default 1/N1)");
  train->add_option("--seed", train_seed, "Master seed");
  train->add_option("--runs", train_runs, "Repeat training with run-derived seeds and report mean/std MSE")
      ->check(CLI::PositiveNumber);
  train->add_option("--noise", train_noise, "Noise column variances to blend in (repeatable)")->delimiter(',');
  train->add_option("--noise-preset", train_preset, "n7 or n10");
  train->add_option("--n-train", n_train, "Training rows (default: 80% of rows)");
  train->add_option("--shuffle-seed", shuffle_seed, "Shuffle rows before splitting");
  train->add_option("--config", train_config, "Benchmark config supplying ensemble/GA defaults");

  // bench
  std::string bench_config;
  std::optional<std::size_t> bench_runs, bench_jobs;
  std::optional<Seed> bench_seed;
  std::string bench_out;
  auto* bench = app.add_subcommand("bench", "Run the experiment matrix from a config file");
  bench->add_option("--config", bench_config, "Benchmark config file")->required();
  bench->add_option("--runs", bench_runs, "Runs per cell");
  bench->add_option("--seed", bench_seed, "Master seed");
  bench->add_option("--jobs", bench_jobs, "Worker threads (1 for authoritative timing)");
  bench->add_option("--out", bench_out, "Output directory");

  // report
  std::string report_runs;
  std::string report_out;
  auto* report = app.add_subcommand("report", "Rebuild report tables from a runs.csv");
  report->add_option("--runs-csv", report_runs, "runs.csv written by bench")->required();
  report->add_option("--out", report_out, "Directory for regenerated tables (default: print only)");

  // blend
  DataFlags blend_data;
  std::vector<double> blend_noise_vars;
  std::string blend_preset;
  Seed blend_seed = kDefaultSeed;
  std::string blend_out;
  auto* blend = app.add_subcommand("blend", "Append irrelevant Gaussian columns and write CSV + manifest");
  add_data_flags(blend, blend_data);
  blend->add_option("--noise", blend_noise_vars, "Noise column variances (repeatable)")->delimiter(',');
  blend->add_option("--noise-preset", blend_preset, "n7 or n10");
  blend->add_option("--seed", blend_seed, "Master seed");
  blend->add_option("--out", blend_out, "Output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  if (*train) {
    return run_guarded([&] {
      std::cout << "seed: " << train_seed << '\n';
      const auto method = parse_method(method_name);
      if (!method) throw ConfigError("unknown method '" + method_name + "'");

      MethodParams params;
      if (!train_config.empty()) params = load_bench_config(train_config).params;
      // Flags override the config file.
      auto& ec = params.ensemble;
      if (train->count("--groups")) ec.groups = groups;
      if (train->count("--group-size")) ec.group_size = group_size;
      if (train->count("--hidden")) ec.hidden_nodes = hidden;
      if (train->count("--activation") || train_config.empty()) {
        const auto act = parse_activation(activation);
        if (!act) throw ConfigError("unknown activation '" + activation + "'");
        ec.activation = *act;
      }
      if (lambda) {
        ec.lambda1 = *lambda;
        params.gasen_lambda = *lambda;
      }
      if (train->count("--group-size")) params.gasen_size = group_size;
      ec.validate();

      const Dataset raw = load_dataset(train_data, train_seed);
      SplitSpec sp;
      sp.n_train = n_train ? n_train : static_cast<std::size_t>(raw.n_samples() * 4 / 5);
      sp.shuffle_seed = shuffle_seed;
      const auto noise = noise_from_flags(train_noise, train_preset, train_seed);
      const PreparedData data = prepare(raw, noise, sp, BlendOrder::NormalizeThenBlend);

      std::cout << "method: " << to_string(*method) << '\n'
                << "features: " << data.train.n_features() << " (" << (noise ? noise->variances.size() : 0)
                << " noise)\n"
                << "train/test rows: " << data.train.n_samples() << '/' << data.test.n_samples() << '\n';

      const Matrix y = data.train.y;
      std::vector<double> mses;
      for (std::size_t run = 0; run < train_runs; ++run) {
        // Same run seeds as the bench subcommand.
        const Seed seed = train_runs == 1 ? train_seed : derive_seed(train_seed, {0x52554e, run});
        if (train_runs > 1) std::cout << "run " << run << " (seed " << seed << ")\n";
        const auto start = std::chrono::steady_clock::now();
        const TrainedModel model = train_method(*method, data.train.x, y, params, seed);
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const double test_mse = mse(model.predict(data.test.x).col(0), data.test.y);
        mses.push_back(test_mse);

        std::cout << "test MSE: " << test_mse << '\n'
                  << "training time (s): " << seconds << '\n'
                  << "members: " << model.member_count() << '\n';
        if (const auto* t = model.trace()) {
          std::cout << "trained ELMs: " << t->trained << '\n';
          if (!t->group_survivors.empty()) {
            std::cout << "layer-1 survivors per group:";
            for (auto n : t->group_survivors) std::cout << ' ' << n;
            std::cout << '\n' << "layer-1 pool size N2: " << t->pool_size << '\n';
          }
          if (*method == Method::RmseElm) std::cout << "layer-2 survivors: " << t->final_size << '\n';
        }
      }
      if (mses.size() > 1) {
        double mean = 0.0;
        for (double m : mses) mean += m;
        mean /= static_cast<double>(mses.size());
        std::cout << "mean test MSE: " << mean << '\n' << "std test MSE: " << std_over_runs(mses) << '\n';
      }
      return kOk;
    });
  }

  if (*bench) {
    return run_guarded([&] {
      BenchConfig cfg = load_bench_config(bench_config);
      if (bench_runs) cfg.runs = *bench_runs;
      if (bench_seed) cfg.master_seed = *bench_seed;
      if (bench_jobs) cfg.jobs = *bench_jobs;
      if (!bench_out.empty()) cfg.out_dir = bench_out;
      cfg.validate();
      std::cout << "seed: " << cfg.master_seed << '\n';

      const ExperimentReport rep = run_experiment(cfg);
      write_report(rep, cfg.out_dir);
      std::cout << format_summary(rep) << "reports written to " << cfg.out_dir.string() << '\n';

      std::size_t failed = 0;
      for (const auto& [key, cell] : rep.cells) {
        if (cell.error) {
          ++failed;
          std::cerr << "cell " << key.dataset << '/' << key.noise << '/' << to_string(key.method)
                    << " failed: " << *cell.error << '\n';
        }
      }
      return failed > 0 && failed == rep.cells.size() ? kDataError : kOk;
    });
  }

  if (*report) {
    return run_guarded([&] {
      const ExperimentReport rep = report_from_records(load_run_records(report_runs));
      std::cout << format_summary(rep);
      if (!report_out.empty()) {
        write_report(rep, report_out);
        std::cout << "reports written to " << report_out << '\n';
      }
      return kOk;
    });
  }

  if (*blend) {
    return run_guarded([&] {
      std::cout << "seed: " << blend_seed << '\n';
      const Dataset raw = load_dataset(blend_data, blend_seed);
      const auto noise = noise_from_flags(blend_noise_vars, blend_preset, blend_seed);
      if (!noise) throw ConfigError("blend needs --noise or --noise-preset");
      const Dataset blended = blend_noise(raw, *noise);
      save_csv(blended, blend_out);
      const fs::path manifest = fs::path(blend_out).string() + ".manifest.txt";
      write_manifest(manifest, {{"source", blend_data.waveform ? "waveform generator" : blend_data.dataset},
                                {"master_seed", std::to_string(blend_seed)},
                                {"noise_seed", std::to_string(noise->seed)},
                                {"noise_variances", join(noise->variances)},
                                {"rows", std::to_string(blended.n_samples())},
                                {"original_features", std::to_string(raw.n_features())},
                                {"total_features", std::to_string(blended.n_features())}});
      std::cout << "wrote " << blend_out << " (" << blended.n_samples() << " rows, " << blended.n_features()
                << " features) and " << manifest.string() << '\n';
      return kOk;
    });
  }
  return kFailure;
}
