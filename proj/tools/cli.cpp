#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "scoreci/crt.hpp"
#include "scoreci/harness.hpp"
#include "scoreci/io.hpp"
#include "scoreci/synthgen.hpp"

namespace scoreci::cli {
namespace {

struct Options {
  // Test configuration.
  double alpha = 0.05;
  int num_sets = 100;
  int epochs = 100;
  double lr = 1e-4;
  int batch = 50;
  int m = 1;
  double h = 0.1;
  int steps = 200;
  int hidden = 64;
  std::string statistic = "rdc";
  std::uint64_t seed = 0;
  int threads = 1;
  bool strict_gof = false;
  bool no_gof = false;
  bool gof_all_sets = false;
  int permutations = 199;
  double alpha_gof = 0.05;
  double train_fraction = 1.0;
  int rdc_k = 20;
  // Outputs.
  std::string out_dir;
  bool raw_space = false;
  bool double_precision = false;
  bool perm_stats = false;
  std::string output;
  // Data input.
  std::string data_path;
  std::string family;
  // Synthetic generators and bench grid.
  int trials = 0;
  bool full = false;
  int n = 0;
  std::string dz;
  int dx = 1;
  std::string cases = "3";
  std::string f1 = "linear";
  std::string f2 = "linear";
  std::string pairs;
  std::string b = "0";
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) {
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

// "1,3,5" or "1..5".
std::vector<int> parse_int_list(const std::string& s, const std::string& flag) {
  std::vector<int> values;
  try {
    for (const auto& part : split(s, ',')) {
      const auto dots = part.find("..");
      if (dots == std::string::npos) {
        values.push_back(std::stoi(part));
      } else {
        const int lo = std::stoi(part.substr(0, dots));
        const int hi = std::stoi(part.substr(dots + 2));
        if (hi < lo) throw std::invalid_argument("empty range");
        for (int v = lo; v <= hi; ++v) values.push_back(v);
      }
    }
  } catch (const std::exception&) {
    throw std::invalid_argument("--" + flag + ": cannot parse '" + s + "'");
  }
  if (values.empty()) throw std::invalid_argument("--" + flag + ": empty list");
  return values;
}

std::vector<double> parse_double_list(const std::string& s, const std::string& flag) {
  std::vector<double> values;
  try {
    for (const auto& part : split(s, ',')) values.push_back(std::stod(part));
  } catch (const std::exception&) {
    throw std::invalid_argument("--" + flag + ": cannot parse '" + s + "'");
  }
  if (values.empty()) throw std::invalid_argument("--" + flag + ": empty list");
  return values;
}

std::vector<LinkFunction> parse_functions(const std::string& s) {
  if (s == "all") {
    return {LinkFunction::kLinear, LinkFunction::kSquare, LinkFunction::kCos,
            LinkFunction::kTanh, LinkFunction::kExp};
  }
  std::vector<LinkFunction> out;
  for (const auto& part : split(s, ',')) out.push_back(parse_link_function(part));
  return out;
}

CITestConfig make_config(const Options& o) {
  CITestConfig c;
  c.alpha = o.alpha;
  c.train.learning_rate = o.lr;
  c.train.epochs = o.epochs;
  c.train.batch_size = o.batch;
  c.train.m = o.m;
  c.train.hidden = o.hidden;
  c.sampler.step_size = o.h;
  c.sampler.steps = o.steps;
  c.sampler.num_sets = o.num_sets;
  c.sampler.double_precision = o.double_precision;
  c.statistic.kind = parse_statistic_kind(o.statistic);
  c.statistic.rdc.k = o.rdc_k;
  c.gof.enabled = !o.no_gof;
  c.gof.strict = o.strict_gof;
  c.gof.all_sets = o.gof_all_sets;
  c.gof.num_permutations = o.permutations;
  c.gof.alpha = o.alpha_gof;
  c.master_seed = o.seed;
  c.train_fraction = o.train_fraction;
  c.threads = o.threads;
  c.validate();
  return c;
}

std::ofstream open_output(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path path = std::filesystem::path(dir) / name;
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  return f;
}

struct TrainedModel {
  Preprocessor pre;
  Matrix x;  // preprocessed
  TrainResult trained;
  StageSeeds seeds;
};

// Same seeds and preprocessing as ci_test, so gof and gen reproduce the
// model that `test` would use.
TrainedModel train_model(const Dataset& data, const CITestConfig& config) {
  if (data.z.cols() == 0) {
    throw PipelineError(Stage::kInput, "data needs at least one z column");
  }
  TrainedModel m{{}, {}, {ScoreNet(NetConfig{}), {}}, StageSeeds::from_master(config.master_seed)};
  try {
    data.validate();
    m.pre = Preprocessor::fit(data.x);
    m.x = m.pre.transform(data.x);
  } catch (const std::invalid_argument& e) {
    throw PipelineError(Stage::kInput, e.what());
  }
  TrainConfig tc = config.train;
  tc.seed = m.seeds.train;
  try {
    m.trained = train(m.x, data.z, tc);
  } catch (const std::exception& e) {
    throw PipelineError(Stage::kTraining, e.what());
  }
  return m;
}

SamplerConfig sampler_for(const CITestConfig& config, const StageSeeds& seeds) {
  SamplerConfig s = config.sampler;
  s.seed = seeds.sampler;
  s.threads = config.threads;
  return s;
}

int cmd_test(const Options& o, std::ostream& out, std::ostream& err) {
  const CITestConfig config = make_config(o);
  const Dataset data = read_dataset_csv(o.data_path);
  const CITestReport report = ci_test(data, config);
  for (const auto& w : report.warnings) err << "warning: " << w << '\n';
  const std::string json = to_json(report, config).dump(2);
  out << json << '\n';
  if (!o.out_dir.empty()) {
    open_output(o.out_dir, "report.json") << json << '\n';
    std::ofstream trace = open_output(o.out_dir, "losstrace.csv");
    write_loss_trace_csv(report.loss_trace, trace);
    std::ofstream pv = open_output(o.out_dir, "pvalues.csv");
    write_pvalues_csv({report.p_value}, pv);
  }
  return kOk;
}

int cmd_gof(const Options& o, std::ostream& out, std::ostream& err) {
  CITestConfig config = make_config(o);
  const Dataset data = read_dataset_csv(o.data_path);
  const TrainedModel model = train_model(data, config);
  SamplerConfig sampler = sampler_for(config, model.seeds);
  Matrix generated;
  try {
    generated = sample_set(model.trained.net, data.z, sampler, 0);
  } catch (const std::exception& e) {
    throw PipelineError(Stage::kSampling, e.what());
  }
  GofResult gof;
  try {
    gof = gof_test(join_columns(model.x, data.z), join_columns(generated, data.z),
                   config.gof.num_permutations, config.gof.alpha,
                   derive_seed(model.seeds.gof, std::uint64_t{0}), config.threads);
  } catch (const std::exception& e) {
    throw PipelineError(Stage::kGof, e.what());
  }
  nlohmann::json j = to_json(gof);
  j["seeds"] = {{"master", model.seeds.master}, {"sampler", model.seeds.sampler},
                {"gof", model.seeds.gof}};
  out << j.dump(2) << '\n';
  if (!o.out_dir.empty()) {
    open_output(o.out_dir, "gof.json") << j.dump(2) << '\n';
    std::ofstream trace = open_output(o.out_dir, "losstrace.csv");
    write_loss_trace_csv(model.trained.loss_trace, trace);
    if (o.perm_stats) {
      std::ofstream f = open_output(o.out_dir, "gof_permutations.csv");
      write_permutation_stats_csv(gof, f);
    }
  }
  if (!gof.pass) {
    err << "warning: goodness-of-fit check failed (p = " << gof.p_value << ")\n";
    if (config.gof.strict) return kPipelineError;
  }
  return kOk;
}

int cmd_gen(const Options& o, std::ostream& out, std::ostream&) {
  const CITestConfig config = make_config(o);
  const Dataset data = read_dataset_csv(o.data_path);
  const TrainedModel model = train_model(data, config);
  NullEnsemble ensemble;
  try {
    ensemble = sample_conditional(model.trained.net, data.z, sampler_for(config, model.seeds));
  } catch (const std::exception& e) {
    throw PipelineError(Stage::kSampling, e.what());
  }
  const std::string dir = o.out_dir.empty() ? "." : o.out_dir;
  {
    std::ofstream f = open_output(dir, "ensemble.csv");
    write_ensemble_csv(ensemble, f, o.raw_space ? &model.pre : nullptr);
  }
  {
    std::ofstream f = open_output(dir, "losstrace.csv");
    write_loss_trace_csv(model.trained.loss_trace, f);
  }
  const nlohmann::json j = {
      {"ensemble", (std::filesystem::path(dir) / "ensemble.csv").string()},
      {"sets", ensemble.sets.size()},
      {"rows", static_cast<std::size_t>(data.rows()) * ensemble.sets.size()},
      {"raw_space", o.raw_space}};
  out << j.dump(2) << '\n';
  return kOk;
}

int default_n(const std::string& family, bool full) {
  if (family == "chain") return 2000;
  return full ? 1000 : 500;
}

std::vector<GeneratorSpec> build_grid(const Options& o) {
  const int n = o.n > 0 ? o.n : default_n(o.family, o.full);
  std::vector<GeneratorSpec> grid;
  if (o.family == "benchmark") {
    const auto dzs = parse_int_list(o.dz.empty() ? (o.full ? "10" : "5") : o.dz, "dz");
    std::vector<std::pair<LinkFunction, LinkFunction>> fpairs;
    if (!o.pairs.empty()) {
      for (const auto& p : split(o.pairs, ',')) {
        const auto colon = p.find(':');
        if (colon == std::string::npos)
          throw std::invalid_argument("--pairs: expected f1:f2, got '" + p + "'");
        fpairs.emplace_back(parse_link_function(p.substr(0, colon)),
                            parse_link_function(p.substr(colon + 1)));
      }
    } else {
      for (auto a : parse_functions(o.f1))
        for (auto c : parse_functions(o.f2)) fpairs.emplace_back(a, c);
    }
    for (int case_id : parse_int_list(o.cases, "case"))
      for (int dz : dzs)
        for (const auto& [a, c] : fpairs)
          grid.push_back(BenchmarkSpec{case_id, a, c, n, dz, 0});
  } else if (o.family == "highdim") {
    const auto dzs = parse_int_list(o.dz.empty() ? "50" : o.dz, "dz");
    for (int dz : dzs)
      for (double b : parse_double_list(o.b, "b")) grid.push_back(HighDimSpec{b, n, dz, 0});
  } else if (o.family == "chain") {
    for (int dz : parse_int_list(o.dz.empty() ? "1" : o.dz, "dz"))
      grid.push_back(ChainSpec{dz, o.dx, n, 0});
  } else {
    throw std::invalid_argument("unknown family '" + o.family +
                                "' (expected benchmark, highdim or chain)");
  }
  return grid;
}

int cmd_bench(const Options& o, std::ostream& out, std::ostream& err) {
  const CITestConfig config = make_config(o);
  const int trials = o.trials > 0 ? o.trials : (o.full ? 100 : 50);
  const std::vector<GeneratorSpec> grid = build_grid(o);
  HarnessOptions harness;
  harness.threads = o.threads;
  harness.strict = o.strict_gof;
  nlohmann::json summaries = nlohmann::json::array();
  std::ostringstream pvalues;
  pvalues << "point,trial,p_value\n";
  for (std::size_t g = 0; g < grid.size(); ++g) {
    err << "[" << g + 1 << "/" << grid.size() << "] " << describe(grid[g]) << '\n';
    const MetricsSummary s = run_trials(grid[g], config, trials, o.seed, harness);
    err << "  " << s.type_label() << " rate " << s.rejection_rate << " ks " << s.ks_statistic
        << " aupc " << s.aupc << (s.failures ? " failures " + std::to_string(s.failures) : "")
        << '\n';
    summaries.push_back(to_json(s));
    for (std::size_t t = 0; t < s.p_values.size(); ++t)
      pvalues << g << ',' << t << ',' << format_double(s.p_values[t]) << '\n';
  }
  nlohmann::json j = {{"family", o.family}, {"trials", trials}, {"summaries", summaries},
                      {"config_echo", to_json(config)}};
  out << j.dump(2) << '\n';
  if (!o.out_dir.empty()) {
    open_output(o.out_dir, "bench.json") << j.dump(2) << '\n';
    open_output(o.out_dir, "pvalues.csv") << pvalues.str();
  }
  return kOk;
}

int cmd_synth(const Options& o, std::ostream& out, std::ostream&) {
  Options single = o;
  std::vector<GeneratorSpec> grid = build_grid(single);
  if (grid.size() != 1) {
    throw std::invalid_argument("synth: flags describe " + std::to_string(grid.size()) +
                                " generators; give exactly one");
  }
  const Dataset data = generate(with_seed(grid.front(), o.seed));
  if (o.output.empty()) {
    write_dataset_csv(data, out);
  } else {
    std::ofstream f(o.output);
    if (!f) throw std::runtime_error("cannot write " + o.output);
    write_dataset_csv(data, f);
  }
  return kOk;
}

void add_options(CLI::App& app, Options& o) {
  app.add_option("--alpha", o.alpha, "Test level")->capture_default_str();
  app.add_option("--B", o.num_sets, "Number of generated sets")->capture_default_str();
  app.add_option("--epochs", o.epochs, "Training epochs")->capture_default_str();
  app.add_option("--lr", o.lr, "Adam learning rate")->capture_default_str();
  app.add_option("--batch", o.batch, "Minibatch size")->capture_default_str();
  app.add_option("--m", o.m, "Projections per sample")->capture_default_str();
  app.add_option("--h", o.h, "Langevin step size")->capture_default_str();
  app.add_option("--steps", o.steps, "Langevin steps")->capture_default_str();
  app.add_option("--hidden", o.hidden, "Hidden width")->capture_default_str();
  app.add_option("--statistic", o.statistic, "rdc or mmd")
      ->check(CLI::IsMember({"rdc", "mmd"}))
      ->capture_default_str();
  app.add_option("--rdc-k", o.rdc_k, "Random features per side")->capture_default_str();
  app.add_option("--seed", o.seed, "Master seed")->capture_default_str();
  app.add_option("--threads", o.threads, "Worker threads")->capture_default_str();
  app.add_flag("--strict-gof", o.strict_gof, "Treat a failed goodness-of-fit check as an error");
  app.add_flag("--no-gof", o.no_gof, "Skip the goodness-of-fit check");
  app.add_flag("--gof-all-sets", o.gof_all_sets, "Check every generated set");
  app.add_flag("--double-precision", o.double_precision,
               "Evaluate the score network in double precision while sampling");
  app.add_option("--permutations", o.permutations, "GOF permutations")->capture_default_str();
  app.add_option("--alpha-gof", o.alpha_gof, "GOF level")->capture_default_str();
  app.add_option("--train-fraction", o.train_fraction,
                 "Leading fraction of rows used for training (1 = all rows)")
      ->capture_default_str();
  app.add_option("--out", o.out_dir, "Output directory")->envname("SCORECI_OUT_DIR");
  app.add_flag("--raw-space", o.raw_space, "gen: write samples in the original X scale");
  app.add_flag("--perm-stats", o.perm_stats, "gof: also write permutation statistics");
  app.add_option("--output", o.output, "synth: CSV path (default stdout)");
  app.add_option("--trials", o.trials, "bench: trials per grid point (default 50, --full 100)");
  app.add_flag("--full", o.full, "bench/synth: full-scale sizes");
  app.add_option("--n", o.n, "Rows per synthetic dataset (default by family)");
  app.add_option("--dz", o.dz, "Conditioner dimensions, e.g. 5 or 1..5 or 1,3,5");
  app.add_option("--dx", o.dx, "chain: dimension of X")->capture_default_str();
  app.add_option("--case", o.cases, "benchmark: case ids")->capture_default_str();
  app.add_option("--f1", o.f1, "benchmark: X link functions or 'all'")->capture_default_str();
  app.add_option("--f2", o.f2, "benchmark: Y link functions or 'all'")->capture_default_str();
  app.add_option("--pairs", o.pairs, "benchmark: explicit f1:f2 pairs, comma separated");
  app.add_option("--b", o.b, "highdim: dependence strengths")->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"scoreci: conditional independence testing with score-based generators"};
  app.set_help_flag("--help", "Print help");
  app.set_config("--config", "", "Flat key = value file with flag defaults");
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  add_options(app, o);

  auto* test = app.add_subcommand("test", "Run the full test on a CSV file");
  auto* gof = app.add_subcommand("gof", "Train, sample one set and run the goodness-of-fit check");
  auto* gen = app.add_subcommand("gen", "Train and export the generated ensemble");
  auto* bench = app.add_subcommand("bench", "Repeated trials on synthetic data");
  auto* synth = app.add_subcommand("synth", "Export one synthetic dataset as CSV");
  for (auto* sub : {test, gof, gen}) {
    sub->fallthrough();
    sub->add_option("data", o.data_path, "CSV with x_*, y_* and z_* columns")
        ->required()
        ->check(CLI::ExistingFile);
  }
  for (auto* sub : {bench, synth}) {
    sub->fallthrough();
    sub->add_option("family", o.family, "benchmark, highdim or chain")
        ->required()
        ->check(CLI::IsMember({"benchmark", "highdim", "chain"}));
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (*test) return cmd_test(o, out, err);
    if (*gof) return cmd_gof(o, out, err);
    if (*gen) return cmd_gen(o, out, err);
    if (*bench) return cmd_bench(o, out, err);
    if (*synth) return cmd_synth(o, out, err);
  } catch (const PipelineError& e) {
    err << "error: " << e.what() << '\n';
    return kPipelineError;
  } catch (const CsvError& e) {
    err << "error: " << e.what() << '\n';
    return kPipelineError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kPipelineError;
  }
  return kUsageError;
}

}  // namespace scoreci::cli
