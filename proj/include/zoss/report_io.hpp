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


#ifndef ZOSS_REPORT_IO_HPP_
#define ZOSS_REPORT_IO_HPP_

#include <string>
#include <vector>

#include "json.hpp"

#include "zoss/bounds.hpp"
#include "zoss/estimator.hpp"
#include "zoss/harness.hpp"
#include "zoss/optimizers.hpp"

namespace zoss {

// Shortest round-trip decimal form; "inf" / "nan" for non-finite values.
std::string format_number(double x);

nlohmann::json to_json(const RunConfig& config);
nlohmann::json to_json(const StabilityReport& report);
nlohmann::json to_json(const SwapSweep& sweep);
nlohmann::json to_json(const GenReport& report);
nlohmann::json to_json(const SgdLimitPoint& point);
nlohmann::json to_json(const SgdLimitReport& report);
nlohmann::json to_json(const ExpansivityReport& report);
nlohmann::json trajectory_summary(const Trajectory& traj);

// Stable serialization: sorted keys, two-space indent, trailing newline.
std::string dump(const nlohmann::json& j);

// One header line plus one row per report; see README for the columns.
std::string stability_csv(const std::vector<StabilityReport>& reports);
std::string gen_csv(const std::vector<GenReport>& reports);
std::string sgd_limit_csv(const SgdLimitReport& report);
std::string bounds_csv(const std::vector<BoundReport>& rows,
                       const BoundInputs& inputs, bool with_sgd_limit);
std::string lemma1_csv(const std::vector<VarianceReductionReport>& reports);
std::string moments_csv(const std::vector<ThirdMomentReport>& reports);
std::string trajectory_csv(const Trajectory& traj, bool with_iterates);

}  // namespace zoss

#endif  // ZOSS_REPORT_IO_HPP_
