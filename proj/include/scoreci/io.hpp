// Copyright 2026 The scoreci Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// File formats: the x_/y_/z_ dataset CSV, long-format ensemble CSV, loss
// trace and p-value CSVs, and the JSON reports.

#ifndef SCORECI_IO_HPP_
#define SCORECI_IO_HPP_

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "scoreci/common.hpp"
#include "scoreci/crt.hpp"
#include "scoreci/gof.hpp"
#include "scoreci/harness.hpp"
#include "scoreci/langevin.hpp"
#include "scoreci/trainer.hpp"

namespace scoreci {

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Comma-separated, header row required. Columns must be named x_*, y_* or
// z_*; at least one x_ and one y_ column; every cell a finite real. When
// require_z is set, a file without z_ columns is rejected. Errors name the
// line and column.
Dataset parse_dataset_csv(std::istream& in, const std::string& source,
                          bool require_z = true);
Dataset read_dataset_csv(const std::string& path, bool require_z = true);

void write_dataset_csv(const Dataset& data, std::ostream& out);

// Columns set_id,row_id,x_0,... ; one line per (set, row), sets in order.
void write_ensemble_csv(const NullEnsemble& ensemble, std::ostream& out,
                        const Preprocessor* to_raw = nullptr);

void write_loss_trace_csv(const std::vector<double>& trace, std::ostream& out);
void write_pvalues_csv(const std::vector<double>& p_values, std::ostream& out);
void write_permutation_stats_csv(const GofResult& gof, std::ostream& out);

// Shortest decimal form that reads back to the same double.
std::string format_double(double v);

nlohmann::json to_json(const GofResult& gof);
nlohmann::json to_json(const CITestConfig& config);
nlohmann::json to_json(const CITestReport& report, const CITestConfig& config);
nlohmann::json to_json(const MetricsSummary& summary);

}  // namespace scoreci

#endif  // SCORECI_IO_HPP_
