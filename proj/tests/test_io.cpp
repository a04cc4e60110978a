#include <sstream>
#include <string>

#include "doctest.h"
#include "scoreci/io.hpp"
#include "scoreci/synthgen.hpp"

using namespace scoreci;

namespace {

std::string error_of(const std::string& csv, bool require_z = true) {
  std::istringstream in(csv);
  try {
    parse_dataset_csv(in, "data.csv", require_z);
  } catch (const CsvError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("parse a well formed file with columns in any order") {
  std::istringstream in("z_0,x_0,y_0,z_1\n1,2,3,4\n5, 6 ,7,8\r\n\n");
  const Dataset d = parse_dataset_csv(in, "mem");
  CHECK(d.rows() == 2);
  CHECK(d.x(1, 0) == 6.0);
  CHECK(d.y(0, 0) == 3.0);
  CHECK(d.z(0, 0) == 1.0);
  CHECK(d.z(1, 1) == 8.0);
}

TEST_CASE("parse errors name the problem and its location") {
  const std::string missing_y = error_of("x_0,z_0\n1,2\n");
  CHECK(missing_y.find("y_") != std::string::npos);
  CHECK(missing_y.find("data.csv:1") != std::string::npos);

  CHECK(error_of("x_0,y_0\n1,2\n").find("z_") != std::string::npos);
  CHECK(error_of("x_0,y_0\n1,2\n", false).empty());

  const std::string bad_cell = error_of("x_0,y_0,z_0\n1,2,3\n4,abc,6\n");
  CHECK(bad_cell.find("data.csv:3") != std::string::npos);
  CHECK(bad_cell.find("y_0") != std::string::npos);

  CHECK(error_of("x_0,y_0,z_0\n1,2\n").find("expected 3 fields") != std::string::npos);
  CHECK(error_of("x_0,y_0,w\n1,2,3\n").find("'w'") != std::string::npos);
  CHECK(error_of("x_0,y_0,z_0\n1,nan,3\n").find("finite") != std::string::npos);
  CHECK(error_of("x_0,y_0,z_0\n").find("no data rows") != std::string::npos);
}

TEST_CASE("dataset CSV round-trips exactly") {
  BenchmarkSpec spec;
  spec.n = 30;
  spec.d_z = 3;
  spec.case_id = 4;
  spec.f1 = LinkFunction::kCos;
  const Dataset d = gen_benchmark(spec);
  std::stringstream buf;
  write_dataset_csv(d, buf);
  const Dataset back = parse_dataset_csv(buf, "buf");
  CHECK(back.x == d.x);
  CHECK(back.y == d.y);
  CHECK(back.z == d.z);
}

TEST_CASE("ensemble CSV has one line per set and row") {
  NullEnsemble e;
  e.sets = {Matrix::Constant(4, 2, 0.5), Matrix::Constant(4, 2, -1.0), Matrix::Zero(4, 2)};
  std::stringstream buf;
  write_ensemble_csv(e, buf);
  std::string line;
  std::getline(buf, line);
  CHECK(line == "set_id,row_id,x_0,x_1");
  int rows = 0;
  while (std::getline(buf, line)) ++rows;
  CHECK(rows == 12);
}

TEST_CASE("ensemble CSV in raw space inverts the preprocessing") {
  Matrix raw(3, 1);
  raw << 2.0, 4.0, 6.0;
  const Preprocessor pre = Preprocessor::fit(raw);
  NullEnsemble e;
  e.sets = {pre.transform(Matrix::Constant(1, 1, 5.0))};
  std::stringstream buf;
  write_ensemble_csv(e, buf, &pre);
  std::string header, line;
  std::getline(buf, header);
  std::getline(buf, line);
  CHECK(std::stod(line.substr(line.rfind(',') + 1)) == doctest::Approx(5.0).epsilon(1e-9));
}

TEST_CASE("small CSV writers and number formatting") {
  std::stringstream trace, pv;
  write_loss_trace_csv({-0.1, -0.2}, trace);
  CHECK(trace.str() == "epoch,mean_loss\n1,-0.1\n2,-0.2\n");
  write_pvalues_csv({0.5}, pv);
  CHECK(pv.str() == "trial,p_value\n0,0.5\n");
  CHECK(std::stod(format_double(0.1 + 0.2)) == 0.1 + 0.2);
}

TEST_CASE("report JSON carries the documented keys") {
  CITestConfig cfg;
  CITestReport r;
  r.statistics_null = {0.1, 0.2};
  r.gof = GofResult{};
  const nlohmann::json j = to_json(r, cfg);
  for (const char* key : {"p_value", "reject", "alpha", "statistic_observed", "statistics_null",
                          "gof", "seeds", "config_echo", "n_train", "n_test", "warnings"})
    CHECK(j.contains(key));
  CHECK(j["config_echo"]["sampler"]["B"] == 100);
  CHECK(j["gof"]["num_permutations"] == 0);
  const nlohmann::json m = to_json(summarize_p_values({0.2, 0.01}, 0.05, false));
  CHECK(m["type_label"] == "H1");
  CHECK(m["rejection_rate"] == 0.5);
}
