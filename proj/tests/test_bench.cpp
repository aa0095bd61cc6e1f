#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

#include "rmse_elm/bench.hpp"
#include "rmse_elm/errors.hpp"
#include "test_util.hpp"

using namespace rmse_elm;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("rmse_elm_bench_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

BenchConfig tiny_config(std::vector<Method> methods, std::size_t runs) {
  BenchConfig cfg;
  DatasetSource wav;
  wav.name = "wav";
  wav.waveform_samples = 120;
  wav.split = {90, std::nullopt};
  cfg.datasets.push_back(wav);
  cfg.noise_specs.push_back({"n2", {1.0, 0.1}, 0});
  cfg.methods = std::move(methods);
  cfg.runs = runs;
  cfg.master_seed = 17;
  auto& e = cfg.params.ensemble;
  e.groups = 2;
  e.group_size = 4;
  e.hidden_nodes = 8;
  e.ga.population_size = 10;
  e.ga.generations = 5;
  cfg.params.gasen_size = 4;
  return cfg;
}

}  // namespace

TEST_CASE("mse") {
  const Vector t = (Vector(3) << 1.0, -2.0, 0.5).finished();
  CHECK(mse(t, t) == 0.0);
  CHECK(mse(t.array() + 1.0, t) == doctest::Approx(1.0));
  CHECK(mse((Vector(2) << 1.0, 2.0).finished(), Vector::Zero(2)) == doctest::Approx(2.5));
  CHECK_THROWS_AS(mse(Vector::Zero(2), Vector::Zero(3)), DimensionError);
  CHECK_THROWS_AS(mse(Vector::Zero(0), Vector::Zero(0)), DimensionError);
}

TEST_CASE("std_over_runs") {
  const std::vector<double> same{3.0, 3.0, 3.0};
  CHECK(std_over_runs(same) == 0.0);
  const std::vector<double> two{0.0, 2.0};
  CHECK(std_over_runs(two) == doctest::Approx(std::sqrt(2.0)));

  const std::vector<double> five{4.77, 5.12, 4.31, 6.02, 4.95};
  double mean = 0.0;
  for (double v : five) mean += v;
  mean /= 5.0;
  double ss = 0.0;
  for (double v : five) ss += (v - mean) * (v - mean);
  CHECK(std::abs(std_over_runs(five) - std::sqrt(ss / 4.0)) < 1e-12);

  const std::vector<double> one{1.0};
  CHECK_THROWS_AS(std_over_runs(one), DimensionError);
}

TEST_CASE("comparison_pct") {
  CHECK(comparison_pct(3.0, 3.0) == 0.0);
  CHECK(comparison_pct(5.8564, 4.7763) == doctest::Approx(18.44).epsilon(0.01 / 18.44));
  CHECK(comparison_pct(1.0, 2.0) == doctest::Approx(-100.0));
  CHECK_THROWS_AS(comparison_pct(0.0, 1.0), DimensionError);

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  for (int i = 0; i < 100; ++i) {
    const double a = u(rng), b = u(rng);
    CHECK(std::abs(comparison_pct(a, b) + comparison_pct(b, a) * (b / a)) < 1e-12);
  }
}

TEST_CASE("method names round trip") {
  for (Method m : kAllMethods) CHECK(parse_method(to_string(m)) == m);
  CHECK(parse_method("rmse-elm") == Method::RmseElm);
  CHECK_FALSE(parse_method("bagging").has_value());
}

TEST_CASE("train_method member counts") {
  std::mt19937_64 rng(3);
  const Matrix x = rmse_elm::testing::random_matrix(60, 3, rng);
  const Matrix y = x.col(0).array().sin().matrix();
  MethodParams p;
  p.ensemble.groups = 2;
  p.ensemble.group_size = 3;
  p.ensemble.hidden_nodes = 6;
  p.ensemble.ga.generations = 5;
  p.gasen_size = 5;
  CHECK(train_method(Method::Elm, x, y, p, 1).member_count() == 1);
  CHECK(train_method(Method::Elm, x, y, p, 1).trace() == nullptr);
  CHECK(train_method(Method::SimpleEnsemble, x, y, p, 1).member_count() == 6);
  CHECK(train_method(Method::GasenElm, x, y, p, 1).member_count() <= 5);
  const auto r = train_method(Method::RmseElm, x, y, p, 1);
  REQUIRE(r.trace() != nullptr);
  CHECK(r.member_count() <= r.trace()->pool_size);
}

TEST_CASE("single run, single method report flags the undefined std") {
  auto cfg = tiny_config({Method::Elm}, 1);
  const auto report = run_experiment(cfg);
  CHECK(report.cells.size() == 1);
  const auto* c = report.cell("wav", "n2", Method::Elm);
  REQUIRE(c != nullptr);
  CHECK(c->runs == 1);
  CHECK_FALSE(c->std_mse.has_value());
  CHECK(std::isfinite(c->mean_mse));
  CHECK(report.blend_order == BlendOrder::NormalizeThenBlend);
  CHECK(format_summary(report).find("blend order: normalize-then-blend") != std::string::npos);

  cfg.noise_specs.clear();
  const auto clean = run_experiment(cfg);
  CHECK(clean.cells.size() == 1);
  CHECK(clean.cell("wav", kNoNoiseId, Method::Elm) != nullptr);
}

TEST_CASE("reports are deterministic and recomputable from run records") {
  auto cfg = tiny_config({Method::Elm, Method::SimpleEnsemble, Method::RmseElm}, 3);
  const auto a = run_experiment(cfg);
  cfg.jobs = 2;
  const auto b = run_experiment(cfg);
  REQUIRE(a.records.size() == b.records.size());
  CHECK(a.records.size() == 3 * 3);  // runs x methods
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].test_mse == b.records[i].test_mse);
    CHECK(a.records[i].seed == b.records[i].seed);
  }

  const auto dir = temp_dir("determinism");
  write_report(a, dir);
  for (const char* f : {"runs.csv", "mse.csv", "std.csv", "cc.csv", "mse_comparison.csv", "std_comparison.csv",
                        "summary.txt"})
    CHECK(fs::exists(dir / f));

  const auto back = report_from_records(load_run_records(dir / "runs.csv"));
  for (const auto& [key, cell] : a.cells) {
    const auto* r = back.cell(key.dataset, key.noise, key.method);
    REQUIRE(r != nullptr);
    CHECK(std::abs(r->mean_mse - cell.mean_mse) <= 1e-12 * std::max(1.0, cell.mean_mse));
    REQUIRE(r->std_mse.has_value());
    CHECK(std::abs(*r->std_mse - *cell.std_mse) <= 1e-12 * std::max(1.0, *cell.std_mse));
  }

  const auto pct = a.mse_comparison("wav", "n2", Method::Elm);
  REQUIRE(pct.has_value());
  const double expect = comparison_pct(a.cell("wav", "n2", Method::Elm)->mean_mse,
                                       a.cell("wav", "n2", Method::RmseElm)->mean_mse);
  CHECK(*pct == doctest::Approx(expect));
}

TEST_CASE("a missing dataset fails its cell only") {
  auto cfg = tiny_config({Method::Elm}, 2);
  DatasetSource missing;
  missing.name = "gone";
  missing.path = fs::temp_directory_path() / "rmse_elm_missing_dataset.csv";
  missing.split = {10, std::nullopt};
  cfg.datasets.push_back(missing);
  const auto report = run_experiment(cfg);
  const auto* bad = report.cell("gone", "n2", Method::Elm);
  REQUIRE(bad != nullptr);
  CHECK(bad->error.has_value());
  const auto* good = report.cell("wav", "n2", Method::Elm);
  REQUIRE(good != nullptr);
  CHECK_FALSE(good->error.has_value());
  CHECK(good->runs == 2);
}

TEST_CASE("load_bench_config") {
  const auto dir = temp_dir("config");
  std::ofstream(dir / "data.csv") << "a,b,y\n1,2,3\n4,5,6\n7,8,9\n";
  std::ofstream(dir / "ok.ini") << "[experiment]\nruns = 3\nseed = 42\nmethods = ELM, RMSE-ELM\nout = res\n"
                                   "[ensemble]\ngroups = 2\nhidden = 30\nlambda = 0.1\n"
                                   "[ga]\ngenerations = 7\n"
                                   "[noise.p7]\nvariances = n7\n"
                                   "[noise.two]\nvariances = 1, 0.5\n"
                                   "[dataset.small]\npath = data.csv\nn_train = 2\n"
                                   "[dataset.wav]\ngenerator = waveform\nsamples = 100\nn_train = 80\n";
  const auto cfg = load_bench_config(dir / "ok.ini");
  CHECK(cfg.runs == 3);
  CHECK(cfg.master_seed == 42);
  CHECK(cfg.methods == std::vector<Method>{Method::Elm, Method::RmseElm});
  CHECK(cfg.out_dir == dir / "res");
  CHECK(cfg.params.ensemble.groups == 2);
  CHECK(cfg.params.ensemble.hidden_nodes == 30);
  CHECK(cfg.params.ensemble.first_layer_lambda() == 0.1);
  CHECK(cfg.params.ensemble.ga.generations == 7);
  REQUIRE(cfg.noise_specs.size() == 2);
  CHECK(cfg.noise_specs[0].variances.size() == 7);
  CHECK(cfg.noise_specs[1].variances == std::vector<double>{1.0, 0.5});
  REQUIRE(cfg.datasets.size() == 2);
  CHECK(cfg.datasets[0].path == dir / "data.csv");
  CHECK(cfg.datasets[1].waveform_samples == std::size_t{100});

  std::ofstream(dir / "bad.ini") << "[experiment]\nruns = 3\ncolour = red\n";
  CHECK_THROWS_AS(load_bench_config(dir / "bad.ini"), ConfigError);
  std::ofstream(dir / "badsec.ini") << "[nonsense]\nx = 1\n";
  CHECK_THROWS_AS(load_bench_config(dir / "badsec.ini"), ConfigError);
  CHECK_THROWS_AS(load_bench_config(dir / "absent.ini"), ConfigError);
}
