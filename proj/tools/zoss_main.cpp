// Copyright 2026 The zoss-stability Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// zoss: command-line front end for the stability and generalization
// experiments. Every subcommand writes JSON and CSV reports plus a
// manifest.json into --out.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "manifest.hpp"
#include "zoss/bounds.hpp"
#include "zoss/dataset.hpp"
#include "zoss/estimator.hpp"
#include "zoss/harness.hpp"
#include "zoss/losses.hpp"
#include "zoss/optimizers.hpp"
#include "zoss/report_io.hpp"

namespace {

using zoss::cli::RunManifest;
using Files = std::map<std::string, std::string>;

struct Globals {
  std::uint64_t seed = 42;
  int threads = 0;
  std::string out = "zoss-out";
};

// Options shared by the trajectory-based experiments.
struct Experiment {
  std::string loss = "sigmoid01";
  std::string algorithm = "zoss";
  int d = 5;
  double radius = 1.0;
  double label_noise = 0.1;
  long long n = 20;
  int T = 50;
  int K = 4;
  std::optional<double> mu;
  double c = 0.5;
  int batch_size = 1;
  std::string schedule = "decreasing-over-gamma";
  double C = 0.5;
  int replicas = 200;
  int t0 = 0;
};

void add_experiment_options(CLI::App& sub, Experiment& e) {
  sub.add_option("--loss", e.loss, "Loss model")
      ->check(CLI::IsMember(zoss::registered_losses()))
      ->capture_default_str();
  sub.add_option("--algorithm", e.algorithm, "zoss, sgd or gd")
      ->check(CLI::IsMember({"zoss", "sgd", "gd"}))
      ->capture_default_str();
  sub.add_option("--d", e.d, "Dimension")->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub.add_option("--radius", e.radius, "Feature ball radius")
      ->check(CLI::PositiveNumber)->capture_default_str();
  sub.add_option("--label-noise", e.label_noise, "Label flip probability")
      ->check(CLI::Range(0.0, 0.5))->capture_default_str();
  sub.add_option("--n", e.n, "Training set size")->check(CLI::Range(2LL, 1LL << 40))
      ->capture_default_str();
  sub.add_option("--T", e.T, "Iterations")->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  sub.add_option("--K", e.K, "Perturbation directions per step")
      ->check(CLI::PositiveNumber)->capture_default_str();
  sub.add_option("--mu", e.mu, "Smoothing radius (default: half the cap)")
      ->check(CLI::PositiveNumber);
  sub.add_option("--c", e.c, "Cap constant c")->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub.add_option("--batch-size", e.batch_size, "Mini-batch size m")
      ->check(CLI::PositiveNumber)->capture_default_str();
  sub.add_option("--schedule", e.schedule, "Step-size schedule")
      ->check(CLI::IsMember({"decreasing-over-gamma", "decreasing-plain",
                             "constant-over-t-gamma", "log-constant-nonconvex",
                             "log-constant-convex", "constant-plain"}))
      ->capture_default_str();
  sub.add_option("--C", e.C, "Schedule constant C")->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub.add_option("--replicas", e.replicas, "Monte Carlo replicas")
      ->check(CLI::PositiveNumber)->capture_default_str();
}

zoss::DatasetSpec dataset_spec(const Experiment& e, std::uint64_t seed) {
  zoss::DatasetSpec spec;
  spec.dim = e.d;
  spec.radius = e.radius;
  spec.label_noise = e.label_noise;
  spec.seed = seed;
  spec.validate();
  return spec;
}

zoss::RunConfig run_config(const Experiment& e, const zoss::LossModel& model,
                           std::uint64_t seed) {
  zoss::RunConfig config;
  config.loss = e.loss;
  config.algorithm = zoss::parse_algorithm(e.algorithm);
  config.K = e.K;
  config.c = e.c;
  config.batch_size =
      config.algorithm == zoss::Algorithm::kGd ? static_cast<int>(e.n)
                                               : e.batch_size;
  config.T = e.T;
  config.schedule_kind = zoss::parse_schedule_kind(e.schedule);
  config.C = e.C;
  config.master_seed = seed;
  if (e.mu) {
    config.mu = *e.mu;
  } else {
    config.mu = 0.5 * zoss::mu_cap(e.c, model.lipschitz_L(),
                                   zoss::gamma(e.d, e.K), e.n,
                                   model.smoothness_beta(), e.d);
  }
  return config;
}

void note_failure(RunManifest& m, const std::string& line) {
  m.pass = false;
  m.failures.push_back(line);
}

std::string stability_line(const zoss::StabilityReport& r) {
  return "stability m=" + std::to_string(r.config.batch_size) +
         " swap=" + std::to_string(r.swap_index) +
         ": mean_delta=" + zoss::format_number(r.mean_delta) +
         " stderr=" + zoss::format_number(r.std_error) +
         " bound=" + zoss::format_number(r.theoretical_bound) +
         " failed=" + std::to_string(r.failed_replicas);
}

std::vector<int> default_swaps(long long n) {
  std::vector<int> swaps = {0, static_cast<int>(n / 2) - 1,
                            static_cast<int>(n) - 1};
  swaps.erase(std::unique(swaps.begin(), swaps.end()), swaps.end());
  return swaps;
}

}  // namespace

int main(int argc, char** argv) {
  const auto started = std::chrono::steady_clock::now();
  CLI::App app{"Zeroth-order stochastic search: stability and generalization "
               "experiments"};
  app.set_version_flag("--version", std::string(ZOSS_VERSION));
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "INI file; [subcommand] sections hold keys")
      ->check(CLI::ExistingFile);
  app.config_formatter(std::make_shared<CLI::ConfigINI>());

  Globals g;
  g.threads = static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
  app.add_option("--seed", g.seed, "Master seed")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads")
      ->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--out", g.out, "Output directory")->capture_default_str();

  // stability
  Experiment stab;
  std::vector<int> swaps;
  bool write_trajectory = false;
  bool with_iterates = false;
  auto* stability = app.add_subcommand("stability", "Coupled-trajectory stability");
  add_experiment_options(*stability, stab);
  stability->add_option("--swap", swaps,
                        "0-based swap positions (default first, middle, last)");
  stability->add_option("--t0", stab.t0, "Discard replicas that hit the swap by t0")
      ->check(CLI::NonNegativeNumber)->capture_default_str();
  stability->add_flag("--trajectory", write_trajectory,
                      "Also write replica 0's trajectory on S");
  stability->add_flag("--with-iterates", with_iterates,
                      "Include w components in trajectory.csv");

  // generalize
  Experiment gen;
  gen.n = 50;
  gen.T = 100;
  gen.C = 0.3;
  long long test_size = 5000;
  auto* generalize = app.add_subcommand("generalize", "Generalization gap");
  add_experiment_options(*generalize, gen);
  generalize->add_option("--test-size", test_size, "Fresh test examples")
      ->check(CLI::Range(1000LL, 1LL << 40))->capture_default_str();

  // sweep-batch
  Experiment sweep;
  std::vector<int> m_values;
  int sweep_swap = 0;
  auto* sweep_batch = app.add_subcommand("sweep-batch", "Stability across batch sizes");
  add_experiment_options(*sweep_batch, sweep);
  sweep_batch->add_option("--m", m_values, "Batch sizes (default 1, 5, n)");
  sweep_batch->add_option("--swap", sweep_swap, "0-based swap position")
      ->check(CLI::NonNegativeNumber)->capture_default_str();

  // sgd-limit
  std::string limit_loss = "quadratic";
  int limit_d = 5;
  double limit_radius = 1.0;
  int limit_replicas = 100;
  std::vector<long long> limit_K = {1, 4, 16, 64, 256};
  std::vector<double> limit_mu = {1e-2, 5e-3, 2.5e-3, 1.25e-3, 6.25e-4};
  auto* sgd_limit = app.add_subcommand("sgd-limit", "Estimator error as K grows and mu shrinks");
  sgd_limit->add_option("--loss", limit_loss, "Loss model")
      ->check(CLI::IsMember(zoss::registered_losses()))->capture_default_str();
  sgd_limit->add_option("--d", limit_d, "Dimension")->check(CLI::PositiveNumber)
      ->capture_default_str();
  sgd_limit->add_option("--radius", limit_radius, "Feature ball radius")
      ->check(CLI::PositiveNumber)->capture_default_str();
  sgd_limit->add_option("--replicas", limit_replicas, "Replicas per point")
      ->check(CLI::Range(2, 1 << 30))->capture_default_str();
  sgd_limit->add_option("--K", limit_K, "Increasing query counts")->capture_default_str();
  sgd_limit->add_option("--mu", limit_mu, "Decreasing smoothing radii")->capture_default_str();

  // verify-lemma1
  std::vector<int> lemma_d = {10};
  std::vector<int> lemma_K = {4};
  long long lemma_mc = 100000;
  auto* lemma1 = app.add_subcommand("verify-lemma1", "Variance-reduction check");
  lemma1->add_option("--d", lemma_d, "Dimensions")->capture_default_str();
  lemma1->add_option("--K", lemma_K, "Query counts")->capture_default_str();
  lemma1->add_option("--mc", lemma_mc, "Monte Carlo samples")
      ->check(CLI::Range(1000LL, 1LL << 40))->capture_default_str();

  // verify-moments
  std::vector<int> moment_d = {1, 3, 10};
  long long moment_mc = 100000;
  int moment_max_d = 200;
  auto* moments = app.add_subcommand("verify-moments", "Gaussian third-moment check");
  moments->add_option("--d", moment_d, "Dimensions for the Monte Carlo check")
      ->capture_default_str();
  moments->add_option("--mc", moment_mc, "Monte Carlo samples")
      ->check(CLI::Range(2LL, 1LL << 40))->capture_default_str();
  moments->add_option("--max-d", moment_max_d, "Analytic check for d = 1..max-d")
      ->check(CLI::PositiveNumber)->capture_default_str();

  // bounds
  zoss::BoundInputs in;
  std::string bounds_K = "1";
  std::string format = "csv";
  bool table1_flag = false;
  auto* bounds = app.add_subcommand("bounds", "Evaluate the closed-form bounds");
  bounds->add_flag("--table1", table1_flag, "Emit every table row with its SGD limit");
  bounds->add_option("--L", in.L, "Lipschitz constant")->capture_default_str();
  bounds->add_option("--beta", in.beta, "Smoothness constant")->capture_default_str();
  bounds->add_option("--n", in.n, "Sample size")->capture_default_str();
  bounds->add_option("--T", in.T, "Iterations")->capture_default_str();
  bounds->add_option("--d", in.d, "Dimension")->capture_default_str();
  bounds->add_option("--K", bounds_K, "Query count, or inf")->capture_default_str();
  bounds->add_option("--C", in.C, "Schedule constant")->capture_default_str();
  bounds->add_option("--c", in.c, "Cap constant")->capture_default_str();
  bounds->add_option("--mu", in.mu, "Smoothing radius")->capture_default_str();
  bounds->add_option("--m", in.m, "Batch size")->capture_default_str();
  bounds->add_option("--t0", in.t0, "Conditioning step")->capture_default_str();
  bounds->add_option("--format", format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  RunManifest manifest;
  manifest.command.assign(argv, argv + argc);
  CLI::App* active = app.get_subcommands().front();
  manifest.subcommand = active->get_name();
  manifest.config_text = "seed=" + std::to_string(g.seed) + "\n" +
                         active->config_to_str(true, false);

  Files files;
  zoss::ExecutionOptions exec;
  exec.threads = g.threads;
  try {
    if (active == stability || active == sweep_batch) {
      Experiment& e = active == stability ? stab : sweep;
      const zoss::LossModel model = zoss::make_loss(e.loss, e.d, e.radius);
      const zoss::DatasetSpec spec = dataset_spec(e, g.seed);
      const zoss::Dataset base = zoss::generate_dataset(spec, e.n);
      const zoss::RunConfig config = run_config(e, model, g.seed);
      exec.t0 = e.t0;
      std::vector<zoss::StabilityReport> reports;
      nlohmann::json j;
      if (active == stability) {
        const zoss::SwapSweep result = zoss::run_swap_sweep(
            model, base, swaps.empty() ? default_swaps(e.n) : swaps, config,
            e.replicas, exec);
        reports = result.reports;
        j = zoss::to_json(result);
        if (write_trajectory) {
          zoss::RunConfig traj_config = config;
          traj_config.dataset_id = base.id;
          const zoss::Trajectory traj =
              zoss::run_trajectory(model, traj_config, base.view(), 0);
          files["trajectory.csv"] = zoss::trajectory_csv(traj, with_iterates);
          files["trajectory.json"] = zoss::dump(zoss::trajectory_summary(traj));
        }
      } else {
        if (m_values.empty()) m_values = {1, 5, static_cast<int>(e.n)};
        const zoss::NeighborPair pair =
            zoss::make_neighbor(base, sweep_swap, g.seed);
        reports = zoss::run_batch_size_sweep(model, pair, config, m_values,
                                             e.replicas, exec);
        j = {{"kind", "batch_sweep"}, {"reports", nlohmann::json::array()}};
        for (const auto& r : reports) j["reports"].push_back(zoss::to_json(r));
      }
      bool all = true;
      for (const auto& r : reports) {
        all = all && r.pass;
        if (!r.pass) note_failure(manifest, stability_line(r));
      }
      j["pass"] = all;
      const std::string stem = manifest.subcommand;
      files[stem + ".json"] = zoss::dump(j);
      files[stem + ".csv"] = zoss::stability_csv(reports);
      for (const auto& r : reports) {
        std::cout << (r.pass ? "PASS " : "FAIL ") << stability_line(r) << '\n';
      }
    } else if (active == generalize) {
      const zoss::LossModel model = zoss::make_loss(gen.loss, gen.d, gen.radius);
      const zoss::DatasetSpec spec = dataset_spec(gen, g.seed);
      const zoss::RunConfig config = run_config(gen, model, g.seed);
      const zoss::GenReport r = zoss::run_generalization(
          model, config, spec, gen.n, gen.replicas, test_size, exec);
      const std::string line =
          "generalize: mean_gap=" + zoss::format_number(r.mean_gap) +
          " stderr=" + zoss::format_number(r.std_error) +
          " bound=" + zoss::format_number(r.theoretical_bound) + " (" +
          r.bound_name + ")";
      if (!r.pass) note_failure(manifest, line);
      std::cout << (r.pass ? "PASS " : "FAIL ") << line << '\n';
      files["generalize.json"] = zoss::dump(zoss::to_json(r));
      files["generalize.csv"] = zoss::gen_csv({r});
    } else if (active == sgd_limit) {
      const zoss::LossModel model =
          zoss::make_loss(limit_loss, limit_d, limit_radius);
      zoss::DatasetSpec spec;
      spec.dim = limit_d;
      spec.radius = limit_radius;
      spec.seed = g.seed;
      const zoss::SgdLimitReport r = zoss::run_sgd_limit_check(
          model, spec, limit_K, limit_mu, limit_replicas, g.seed, exec);
      for (const auto& p : r.points) {
        std::cout << "K=" << p.K << " mu=" << zoss::format_number(p.mu)
                  << " error=" << zoss::format_number(p.mean_error)
                  << " envelope=" << zoss::format_number(p.envelope) << '\n';
      }
      if (!r.non_increasing) note_failure(manifest, "sgd-limit: error increased with K");
      if (!r.final_within_envelope) {
        note_failure(manifest, "sgd-limit: final error above envelope");
      }
      files["sgd-limit.json"] = zoss::dump(zoss::to_json(r));
      files["sgd-limit.csv"] = zoss::sgd_limit_csv(r);
    } else if (active == lemma1) {
      std::vector<zoss::VarianceReductionReport> reports;
      nlohmann::json j = nlohmann::json::array();
      for (int d : lemma_d) {
        for (int K : lemma_K) {
          zoss::CounterRng rng(zoss::stream_key(zoss::StreamPurpose::kTest, g.seed,
                                                static_cast<std::uint64_t>(d),
                                                static_cast<std::uint64_t>(K)));
          zoss::Vector v = zoss::sample_gaussian(rng, d);
          v.normalize();
          reports.push_back(
              zoss::verify_variance_reduction(d, K, v, lemma_mc, g.seed));
          const auto& r = reports.back();
          j.push_back(zoss::to_json(r));
          const std::string line =
              "verify-lemma1 d=" + std::to_string(d) + " K=" + std::to_string(K) +
              ": mean=" + zoss::format_number(r.lhs_mean) +
              " bound=" + zoss::format_number(r.bound_first) +
              " second=" + zoss::format_number(r.lhs_second_moment) +
              " exact=" + zoss::format_number(r.exact_second_moment);
          if (!r.pass) note_failure(manifest, line);
          std::cout << (r.pass ? "PASS " : "FAIL ") << line << '\n';
        }
      }
      files["verify-lemma1.json"] = zoss::dump(j);
      files["verify-lemma1.csv"] = zoss::lemma1_csv(reports);
    } else if (active == moments) {
      std::vector<zoss::ThirdMomentReport> reports;
      nlohmann::json mc = nlohmann::json::array();
      for (int d : moment_d) {
        reports.push_back(zoss::verify_third_moment(d, moment_mc, g.seed));
        const auto& r = reports.back();
        mc.push_back(zoss::to_json(r));
        const std::string line =
            "verify-moments d=" + std::to_string(d) +
            ": mc=" + zoss::format_number(r.mc_estimate) +
            " exact=" + zoss::format_number(r.exact) +
            " bound=" + zoss::format_number(r.bound);
        if (!r.pass) note_failure(manifest, line);
        std::cout << (r.pass ? "PASS " : "FAIL ") << line << '\n';
      }
      int worst_d = 0;
      for (int d = 1; d <= moment_max_d; ++d) {
        if (zoss::gaussian_norm_third_moment(d) > std::pow(3.0 + d, 1.5)) {
          worst_d = d;
          note_failure(manifest, "verify-moments: analytic bound fails at d=" +
                                     std::to_string(d));
        }
      }
      std::cout << (worst_d == 0 ? "PASS" : "FAIL")
                << " verify-moments: analytic bound for d=1.." << moment_max_d
                << '\n';
      files["verify-moments.json"] =
          zoss::dump({{"monte_carlo", mc},
                      {"analytic_max_d", moment_max_d},
                      {"analytic_pass", worst_d == 0}});
      files["verify-moments.csv"] = zoss::moments_csv(reports);
    } else if (active == bounds) {
      if (bounds_K == "inf") {
        in.K = std::nullopt;
      } else {
        in.K = std::stoll(bounds_K);
      }
      std::vector<zoss::BoundReport> rows = zoss::table1(in);
      const std::string csv = zoss::bounds_csv(rows, in, table1_flag);
      nlohmann::json j = {{"inputs", zoss::to_json(in)},
                          {"rows", nlohmann::json::array()}};
      for (auto& r : rows) {
        nlohmann::json row = zoss::to_json(r);
        if (!table1_flag) row.erase("sgd_limit");
        j["rows"].push_back(row);
      }
      files["bounds.csv"] = csv;
      files["bounds.json"] = zoss::dump(j);
      std::cout << (format == "csv" ? csv : zoss::dump(j));
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::logic_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }

  try {
    zoss::cli::write_outputs(g.out, files, manifest);
    manifest.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
            .count();
    std::ofstream(std::filesystem::path(g.out) / "manifest.json")
        << zoss::dump(zoss::cli::to_json(manifest));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  for (const auto& line : manifest.failures) std::cerr << "FAILED " << line << '\n';
  return manifest.pass ? 0 : 1;
}
