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

#include "zoss/report_io.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace zoss {

namespace {

nlohmann::json number(double x) {
  if (std::isfinite(x)) return x;
  return format_number(x);
}

std::string join_indices(const std::vector<int>& batch) {
  std::string out;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (i > 0) out += ';';
    out += std::to_string(batch[i]);
  }
  return out;
}

std::string queries_label(const RunConfig& c) {
  if (c.algorithm != Algorithm::kZoss) return "inf";
  return std::to_string(c.K);
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

nlohmann::json to_json(const RunConfig& c) {
  return {{"loss", c.loss},
          {"dataset_id", c.dataset_id},
          {"algorithm", std::string(to_string(c.algorithm))},
          {"K", c.K},
          {"mu", c.mu},
          {"c", c.c},
          {"batch_size", c.batch_size},
          {"T", c.T},
          {"schedule", std::string(to_string(c.schedule_kind))},
          {"C", c.C},
          {"master_seed", c.master_seed}};
}

nlohmann::json to_json(const StabilityReport& r) {
  return {{"kind", "stability"},
          {"config", to_json(r.config)},
          {"dataset_id", r.dataset_id},
          {"n", r.n},
          {"swap_index", r.swap_index},
          {"replicas", r.replicas},
          {"used_replicas", r.used_replicas},
          {"failed_replicas", r.failed_replicas},
          {"t0", r.t0},
          {"mean_delta", r.mean_delta},
          {"stderr", r.std_error},
          {"theoretical_bound", number(r.theoretical_bound)},
          {"bound_name", r.bound_name},
          {"mu_cap", r.mu_cap},
          {"pass", r.pass},
          {"deltas", r.deltas}};
}

nlohmann::json to_json(const SwapSweep& s) {
  nlohmann::json reports = nlohmann::json::array();
  for (const auto& r : s.reports) reports.push_back(to_json(r));
  return {{"kind", "swap_sweep"},
          {"reports", reports},
          {"worst", s.worst},
          {"pass", s.pass}};
}

nlohmann::json to_json(const GenReport& r) {
  return {{"kind", "generalization"},
          {"config", to_json(r.config)},
          {"dataset", to_json(r.spec)},
          {"n", r.n},
          {"replicas", r.replicas},
          {"failed_replicas", r.failed_replicas},
          {"test_size", r.test_size},
          {"mean_train", r.mean_train},
          {"mean_test", r.mean_test},
          {"mean_gap", r.mean_gap},
          {"stderr", r.std_error},
          {"theoretical_bound", number(r.theoretical_bound)},
          {"bound_name", r.bound_name},
          {"pass", r.pass}};
}

nlohmann::json to_json(const SgdLimitPoint& p) {
  return {{"K", p.K},
          {"mu", p.mu},
          {"mean_error", p.mean_error},
          {"stderr", p.std_error},
          {"envelope", p.envelope}};
}

nlohmann::json to_json(const SgdLimitReport& r) {
  nlohmann::json points = nlohmann::json::array();
  for (const auto& p : r.points) points.push_back(to_json(p));
  return {{"kind", "sgd_limit"},
          {"loss", r.loss},
          {"probes", r.probes},
          {"replicas", r.replicas},
          {"points", points},
          {"non_increasing", r.non_increasing},
          {"final_within_envelope", r.final_within_envelope},
          {"pass", r.pass}};
}

nlohmann::json to_json(const ExpansivityReport& r) {
  return {{"kind", "expansivity"},
          {"alpha", r.alpha},
          {"n_probes", r.n_probes},
          {"max_ratio", r.max_ratio},
          {"eta_bound", r.eta_bound},
          {"max_step", r.max_step},
          {"sigma_bound", r.sigma_bound},
          {"pass", r.pass}};
}

nlohmann::json trajectory_summary(const Trajectory& traj) {
  std::vector<double> final_w(traj.final_iterate().begin(),
                              traj.final_iterate().end());
  return {{"steps", traj.alphas.size()},
          {"evaluations", traj.evaluations},
          {"gradient_calls", traj.gradient_calls},
          {"final_norm", traj.final_iterate().norm()},
          {"final_iterate", final_w}};
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

std::string stability_csv(const std::vector<StabilityReport>& reports) {
  std::ostringstream out;
  out << "algorithm,loss,K,batch_size,T,schedule,C,mu,swap_index,replicas,"
         "used_replicas,failed_replicas,mean_delta,stderr,bound_name,"
         "theoretical_bound,pass\n";
  for (const auto& r : reports) {
    const RunConfig& c = r.config;
    out << to_string(c.algorithm) << ',' << c.loss << ',' << queries_label(c)
        << ',' << c.batch_size << ',' << c.T << ','
        << to_string(c.schedule_kind) << ',' << format_number(c.C) << ','
        << format_number(c.mu) << ',' << r.swap_index << ',' << r.replicas
        << ',' << r.used_replicas << ',' << r.failed_replicas << ','
        << format_number(r.mean_delta) << ',' << format_number(r.std_error)
        << ',' << r.bound_name << ',' << format_number(r.theoretical_bound)
        << ',' << (r.pass ? "true" : "false") << '\n';
  }
  return out.str();
}

std::string gen_csv(const std::vector<GenReport>& reports) {
  std::ostringstream out;
  out << "algorithm,loss,K,T,schedule,C,c,n,replicas,failed_replicas,"
         "test_size,mean_train,mean_test,mean_gap,stderr,bound_name,"
         "theoretical_bound,pass\n";
  for (const auto& r : reports) {
    const RunConfig& c = r.config;
    out << to_string(c.algorithm) << ',' << c.loss << ',' << queries_label(c)
        << ',' << c.T << ',' << to_string(c.schedule_kind) << ','
        << format_number(c.C) << ',' << format_number(c.c) << ',' << r.n
        << ',' << r.replicas << ',' << r.failed_replicas << ',' << r.test_size
        << ',' << format_number(r.mean_train) << ','
        << format_number(r.mean_test) << ',' << format_number(r.mean_gap)
        << ',' << format_number(r.std_error) << ',' << r.bound_name << ','
        << format_number(r.theoretical_bound) << ','
        << (r.pass ? "true" : "false") << '\n';
  }
  return out.str();
}

std::string sgd_limit_csv(const SgdLimitReport& report) {
  std::ostringstream out;
  out << "K,mu,mean_error,stderr,envelope\n";
  for (const auto& p : report.points) {
    out << p.K << ',' << format_number(p.mu) << ','
        << format_number(p.mean_error) << ',' << format_number(p.std_error)
        << ',' << format_number(p.envelope) << '\n';
  }
  return out.str();
}

std::string bounds_csv(const std::vector<BoundReport>& rows,
                       const BoundInputs& in, bool with_sgd_limit) {
  std::ostringstream out;
  out << "name,schedule,value," << (with_sgd_limit ? "sgd_limit," : "")
      << "L,beta,n,T,d,K,C,c,mu\n";
  for (const auto& r : rows) {
    out << r.name << ',' << r.schedule << ',' << format_number(r.value) << ',';
    if (with_sgd_limit) out << format_number(r.sgd_limit) << ',';
    out << format_number(in.L) << ','
        << format_number(in.beta) << ',' << in.n << ',' << in.T << ','
        << in.d << ',' << (in.K ? std::to_string(*in.K) : "inf") << ','
        << format_number(in.C) << ',' << format_number(in.c) << ','
        << format_number(in.mu) << '\n';
  }
  return out.str();
}

std::string lemma1_csv(const std::vector<VarianceReductionReport>& reports) {
  std::ostringstream out;
  out << "d,K,n_mc,mean_error,stderr,bound,second_moment,"
         "second_moment_stderr,exact_second_moment,pass\n";
  for (const auto& r : reports) {
    out << r.d << ',' << r.K << ',' << r.n_mc << ','
        << format_number(r.lhs_mean) << ','
        << format_number(r.lhs_mean_stderr) << ','
        << format_number(r.bound_first) << ','
        << format_number(r.lhs_second_moment) << ','
        << format_number(r.second_moment_stderr) << ','
        << format_number(r.exact_second_moment) << ','
        << (r.pass ? "true" : "false") << '\n';
  }
  return out.str();
}

std::string moments_csv(const std::vector<ThirdMomentReport>& reports) {
  std::ostringstream out;
  out << "d,n_mc,mc_estimate,stderr,exact,bound,pass\n";
  for (const auto& r : reports) {
    out << r.d << ',' << r.n_mc << ',' << format_number(r.mc_estimate) << ','
        << format_number(r.std_error) << ',' << format_number(r.exact) << ','
        << format_number(r.bound) << ',' << (r.pass ? "true" : "false")
        << '\n';
  }
  return out.str();
}

std::string trajectory_csv(const Trajectory& traj, bool with_iterates) {
  std::ostringstream out;
  const auto dim = traj.iterates.front().size();
  out << "t,alpha_t,index_or_batch";
  if (with_iterates) {
    for (Eigen::Index k = 0; k < dim; ++k) out << ",w" << k;
  }
  out << '\n';
  for (std::size_t t = 0; t < traj.alphas.size(); ++t) {
    out << (t + 1) << ',' << format_number(traj.alphas[t]) << ','
        << join_indices(traj.batches[t]);
    if (with_iterates) {
      for (double v : traj.iterates[t + 1]) out << ',' << format_number(v);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace zoss
