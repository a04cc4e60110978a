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

#include "scoreci/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

namespace scoreci {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

[[noreturn]] void csv_fail(const std::string& source, std::size_t line,
                           const std::string& what) {
  std::ostringstream msg;
  msg << source << ":" << line << ": " << what;
  throw CsvError(msg.str());
}

enum class Role { kX, kY, kZ };

nlohmann::json seeds_json(const StageSeeds& s) {
  return {{"master", s.master},   {"train", s.train},
          {"sampler", s.sampler}, {"gof", s.gof},
          {"statistic", s.statistic}};
}

}  // namespace

Dataset parse_dataset_csv(std::istream& in, const std::string& source,
                          bool require_z) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) csv_fail(source, 1, "missing header row");
  ++line_no;
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

  const auto header = split_fields(line);
  std::vector<Role> roles;
  std::vector<std::string> names;
  int dx = 0, dy = 0, dz = 0;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string name(header[c]);
    if (name.rfind("x_", 0) == 0) {
      roles.push_back(Role::kX);
      ++dx;
    } else if (name.rfind("y_", 0) == 0) {
      roles.push_back(Role::kY);
      ++dy;
    } else if (name.rfind("z_", 0) == 0) {
      roles.push_back(Role::kZ);
      ++dz;
    } else {
      csv_fail(source, 1, "column " + std::to_string(c + 1) + " ('" + name +
                              "') must be named x_*, y_* or z_*");
    }
    names.push_back(name);
  }
  if (dx == 0) csv_fail(source, 1, "need at least one x_ column");
  if (dy == 0) csv_fail(source, 1, "need at least one y_ column");
  if (dz == 0 && require_z) {
    csv_fail(source, 1,
             "need at least one z_ column (the test conditions on Z)");
  }

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      csv_fail(source, line_no,
               "expected " + std::to_string(header.size()) + " fields, got " +
                   std::to_string(fields.size()));
    }
    std::vector<double> values(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const std::string_view f = fields[c];
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (f.empty() || ec != std::errc() || ptr != f.data() + f.size() ||
          !std::isfinite(v)) {
        csv_fail(source, line_no,
                 "column " + std::to_string(c + 1) + " ('" + names[c] +
                     "'): '" + std::string(f) + "' is not a finite number");
      }
      values[c] = v;
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) csv_fail(source, line_no, "no data rows");

  Dataset data;
  const auto n = static_cast<Eigen::Index>(rows.size());
  data.x.resize(n, dx);
  data.y.resize(n, dy);
  data.z.resize(n, dz);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index cx = 0, cy = 0, cz = 0;
    for (std::size_t c = 0; c < roles.size(); ++c) {
      const double v = rows[static_cast<std::size_t>(i)][c];
      switch (roles[c]) {
        case Role::kX: data.x(i, cx++) = v; break;
        case Role::kY: data.y(i, cy++) = v; break;
        case Role::kZ: data.z(i, cz++) = v; break;
      }
    }
  }
  return data;
}

Dataset read_dataset_csv(const std::string& path, bool require_z) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open " + path);
  return parse_dataset_csv(in, path, require_z);
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) return std::to_string(v);
  return std::string(buf, ptr);
}

void write_dataset_csv(const Dataset& data, std::ostream& out) {
  bool first = true;
  auto header = [&](const char* prefix, Eigen::Index count) {
    for (Eigen::Index j = 0; j < count; ++j) {
      out << (first ? "" : ",") << prefix << j;
      first = false;
    }
  };
  header("x_", data.x.cols());
  header("y_", data.y.cols());
  header("z_", data.z.cols());
  out << '\n';
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    first = true;
    for (const Matrix* m : {&data.x, &data.y, &data.z}) {
      for (Eigen::Index j = 0; j < m->cols(); ++j) {
        out << (first ? "" : ",") << format_double((*m)(i, j));
        first = false;
      }
    }
    out << '\n';
  }
}

void write_ensemble_csv(const NullEnsemble& ensemble, std::ostream& out,
                        const Preprocessor* to_raw) {
  if (ensemble.sets.empty()) return;
  const Eigen::Index dx = ensemble.sets.front().cols();
  out << "set_id,row_id";
  for (Eigen::Index j = 0; j < dx; ++j) out << ",x_" << j;
  out << '\n';
  for (std::size_t b = 0; b < ensemble.sets.size(); ++b) {
    const Matrix values =
        to_raw ? to_raw->inverse_transform(ensemble.sets[b]) : ensemble.sets[b];
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
      out << b << ',' << i;
      for (Eigen::Index j = 0; j < dx; ++j) out << ',' << format_double(values(i, j));
      out << '\n';
    }
  }
}

void write_loss_trace_csv(const std::vector<double>& trace, std::ostream& out) {
  out << "epoch,mean_loss\n";
  for (std::size_t e = 0; e < trace.size(); ++e) {
    out << e + 1 << ',' << format_double(trace[e]) << '\n';
  }
}

void write_pvalues_csv(const std::vector<double>& p_values, std::ostream& out) {
  out << "trial,p_value\n";
  for (std::size_t t = 0; t < p_values.size(); ++t) {
    out << t << ',' << format_double(p_values[t]) << '\n';
  }
}

void write_permutation_stats_csv(const GofResult& gof, std::ostream& out) {
  out << "permutation,mmd2\n";
  out << "observed," << format_double(gof.mmd_observed) << '\n';
  for (std::size_t p = 0; p < gof.permutation_stats.size(); ++p) {
    out << p << ',' << format_double(gof.permutation_stats[p]) << '\n';
  }
}

nlohmann::json to_json(const GofResult& gof) {
  return {{"mmd_observed", gof.mmd_observed},
          {"p_value", gof.p_value},
          {"num_permutations", gof.num_permutations},
          {"pass", gof.pass},
          {"alpha_gof", gof.alpha},
          {"bandwidth", gof.bandwidth}};
}

nlohmann::json to_json(const CITestConfig& c) {
  return {
      {"alpha", c.alpha},
      {"train",
       {{"learning_rate", c.train.learning_rate},
        {"epochs", c.train.epochs},
        {"batch_size", c.train.batch_size},
        {"m", c.train.m},
        {"hidden", c.train.hidden},
        {"adam_beta1", c.train.adam_beta1},
        {"adam_beta2", c.train.adam_beta2},
        {"adam_eps", c.train.adam_eps}}},
      {"sampler",
       {{"step_size", c.sampler.step_size},
        {"steps", c.sampler.steps},
        {"B", c.sampler.num_sets},
        {"double_precision", c.sampler.double_precision}}},
      {"statistic",
       {{"kind", to_string(c.statistic.kind)},
        {"k", c.statistic.rdc.k},
        {"s", c.statistic.rdc.s},
        {"ridge", c.statistic.rdc.ridge}}},
      {"gof",
       {{"enabled", c.gof.enabled},
        {"num_permutations", c.gof.num_permutations},
        {"alpha_gof", c.gof.alpha},
        {"strict", c.gof.strict},
        {"all_sets", c.gof.all_sets}}},
      {"train_fraction", c.train_fraction},
  };
}

nlohmann::json to_json(const CITestReport& report, const CITestConfig& config) {
  nlohmann::json j;
  j["p_value"] = report.p_value;
  j["reject"] = report.reject;
  j["alpha"] = report.alpha;
  j["statistic_observed"] = report.statistic_observed;
  j["statistics_null"] = report.statistics_null;
  if (report.gof) {
    j["gof"] = to_json(*report.gof);
    if (report.gof_all) {
      j["gof"]["all_sets"] = {{"min_p_value", report.gof_all->min_p_value},
                              {"median_p_value", report.gof_all->median_p_value},
                              {"sets", report.gof_all->per_set.size()}};
    }
  } else {
    j["gof"] = nullptr;
  }
  j["seeds"] = seeds_json(report.seeds);
  j["config_echo"] = to_json(config);
  j["n_train"] = report.n_train;
  j["n_test"] = report.n_test;
  j["warnings"] = report.warnings;
  return j;
}

nlohmann::json to_json(const MetricsSummary& s) {
  return {{"label", s.label},
          {"type_label", s.type_label()},
          {"rejection_rate", s.rejection_rate},
          {"ks_statistic", s.ks_statistic},
          {"aupc", s.aupc},
          {"alpha", s.alpha},
          {"trials", s.trials},
          {"failures", s.failures},
          {"failure_messages", s.failure_messages},
          {"p_values", s.p_values}};
}

}  // namespace scoreci
