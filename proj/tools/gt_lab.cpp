#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gtlab/adaptive.hpp"
#include "gtlab/analysis.hpp"
#include "gtlab/decode_noisy.hpp"
#include "gtlab/errors.hpp"
#include "gtlab/harness.hpp"
#include "gtlab/io.hpp"

namespace {

using namespace gtlab;

constexpr int kConfigExit = 2;

struct SimArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
  std::string out;
  std::string format = "csv";
  bool timing = false;
};

int run_sim(const SimArgs& a) {
  ExperimentSpec spec = load_experiment_spec(a.config);
  if (a.seed) spec.seed = *a.seed;
  if (a.jobs) spec.jobs = *a.jobs;
  if (a.timing) spec.timing = true;
  const auto format = a.format == "jsonl" ? ResultFormat::jsonl : ResultFormat::csv;
  validate(spec);
  const auto rows = run_monte_carlo(spec);
  if (a.out.empty()) std::cout << format_results(rows, format);
  else serialize_results(rows, format, a.out);
  return 0;
}

struct DecodeArgs {
  std::string matrix;
  std::string outcomes;
  std::string decoder;
  std::optional<std::size_t> k;
  std::string noise = "noiseless";
  std::optional<double> param, param2, p;
  std::vector<std::string> options;
};

int run_decode(const DecodeArgs& a) {
  Instance inst = read_instance(a.matrix);
  OutcomeVector y;
  if (!a.outcomes.empty()) y = read_outcomes(a.outcomes);
  else if (inst.y) y = *inst.y;
  else throw ConfigError("no outcomes: pass --outcomes or append an outcome line to the matrix file");
  if (y.size() != inst.X.num_tests())
    throw ConfigError("outcome count " + std::to_string(y.size()) + " does not match T = " +
                      std::to_string(inst.X.num_tests()));

  nlohmann::json cfg;
  cfg["n"] = inst.X.num_items();
  cfg["k"] = a.k.value_or(0);
  cfg["T"] = {inst.X.num_tests()};
  nlohmann::json noise = {{"kind", a.noise}};
  if (a.param) noise["param"] = *a.param;
  if (a.param2) noise["param2"] = *a.param2;
  cfg["noise"] = noise;
  if (a.p) cfg["design"] = {{"kind", "bernoulli"}, {"p", *a.p}};
  nlohmann::json dec = {{"id", a.decoder}};
  for (const auto& kv : a.options) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--opt expects key=value, got '" + kv + "'");
    const std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
    char* end = nullptr;
    const double num = std::strtod(value.c_str(), &end);
    if (!value.empty() && end && *end == '\0') dec[key] = num;
    else dec[key] = value;
  }
  cfg["decoders"] = {dec};
  const ExperimentSpec spec = parse_experiment_spec(cfg.dump());
  const DecodeFn fn = make_decoder(spec.decoders.front(), spec, inst.X.num_tests());

  nlohmann::json out;
  out["decoder"] = a.decoder;
  if (a.decoder == "bp") {
    // Marginals come from a direct call so that they can be printed too.
    BpParams bp;
    bp.model = BpModel::from_noise(spec.noise);
    const auto& nums = spec.decoders.front().numbers;
    if (auto it = nums.find("iterations"); it != nums.end()) bp.iterations = static_cast<std::size_t>(it->second);
    bp.prior_q = spec.n ? static_cast<double>(spec.k) / static_cast<double>(spec.n) : 0.0;
    if (auto it = nums.find("prior_q"); it != nums.end()) bp.prior_q = it->second;
    const auto& strs = spec.decoders.front().strings;
    bp.top_k = strs.count("mode") && strs.at("mode") == "top_k";
    bp.k = spec.k;
    const BpResult r = bp_decode(inst.X, y, bp);
    out["estimate"] = std::vector<Item>(r.estimate.begin(), r.estimate.end());
    out["marginals"] = r.marginals;
  } else {
    const DefectiveSet est = fn(inst.X, y);
    out["estimate"] = std::vector<Item>(est.begin(), est.end());
  }
  std::cout << out.dump() << '\n';
  return 0;
}

struct RatesArgs {
  std::string id;
  std::string grid;
  double rho = 0.0, phi = 0.0, xi = 0.0;
};

int run_rates(const RatesArgs& a) {
  RateFormulaId id;
  try {
    id = parse_rate_formula(a.id);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  double lo = 0, hi = 0, step = 0;
  char c1 = 0, c2 = 0;
  std::istringstream is(a.grid);
  if (!(is >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' || !(step > 0.0) || hi < lo)
    throw ConfigError("--alpha-grid must look like a:b:step with a <= b and step > 0");
  if (!(lo > 0.0) || !(hi < 1.0)) throw ConfigError("--alpha-grid must lie inside (0, 1)");
  const RateModelParams params{a.rho, a.phi, a.xi};
  std::cout << "alpha,value\n";
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
  for (std::size_t i = 0; i <= count; ++i) {
    const double x = lo + static_cast<double>(i) * step;
    std::printf("%.6f,%.6f\n", x, theoretical_rate(id, x, params).value);
  }
  return 0;
}

struct AdaptiveArgs {
  std::string algo;
  std::size_t n = 0, k = 0, trials = 1;
  std::uint64_t seed = 1;
  unsigned s = 0;
  double c = 2.0;
  double b = 2.0;
  std::string transcript;
};

int run_adaptive(const AdaptiveArgs& a) {
  static const std::vector<std::string> algos = {"binary_split", "hwang", "dorfman", "generalized_split",
                                                 "cheng", "damaschke"};
  if (std::find(algos.begin(), algos.end(), a.algo) == algos.end())
    throw ConfigError("unknown adaptive algorithm '" + a.algo + "'");
  if (a.k > a.n) throw ConfigError("k must not exceed n");
  if (a.trials == 0) throw ConfigError("trials must be at least 1");

  std::size_t exact = 0, max_tests = 0;
  double total_tests = 0.0, total_ratio = 0.0;
  for (std::size_t trial = 0; trial < a.trials; ++trial) {
    Rng rng(derive_seed(a.seed, a.n, trial));
    const DefectiveSet K = sample_defective_set_combinatorial(a.n, a.k, rng);
    HiddenSetOracle oracle(a.n, K);
    oracle.record_transcript(trial == 0 && !a.transcript.empty());
    bool ok = false;
    if (a.algo == "binary_split") ok = binary_split_find_all(oracle, a.n).recovered == K;
    else if (a.algo == "hwang") ok = hwang_split(oracle, a.n, a.k).recovered == K;
    else if (a.algo == "dorfman") ok = dorfman(oracle, a.n, a.k).recovered == K;
    else if (a.algo == "generalized_split") ok = generalized_split_linear(oracle, a.n, a.s).recovered == K;
    else if (a.algo == "cheng") ok = cheng_count(oracle, a.n, a.c, rng).count == a.k;
    else {
      const auto est = damaschke_estimate(oracle, a.n, a.b, static_cast<double>(a.s), rng);
      ok = est.value >= static_cast<double>(a.k);
      if (a.k > 0) total_ratio += est.value / static_cast<double>(a.k);
    }
    exact += ok;
    total_tests += static_cast<double>(oracle.tests_used());
    max_tests = std::max(max_tests, oracle.tests_used());
    if (trial == 0 && !a.transcript.empty()) {
      std::ofstream out(a.transcript);
      if (!out) throw std::runtime_error("cannot open '" + a.transcript + "' for writing");
      write_transcript_jsonl(out, oracle.transcript());
    }
  }
  const double trials = static_cast<double>(a.trials);
  if (a.algo == "damaschke") {
    std::cout << "algo,n,k,trials,mean_ratio,frac_not_under,mean_tests,max_tests\n";
    std::printf("%s,%zu,%zu,%zu,%.6f,%.6f,%.6f,%zu\n", a.algo.c_str(), a.n, a.k, a.trials, total_ratio / trials,
                static_cast<double>(exact) / trials, total_tests / trials, max_tests);
  } else {
    std::cout << "algo,n,k,trials,exact_rate,mean_tests,max_tests\n";
    std::printf("%s,%zu,%zu,%zu,%.6f,%.6f,%zu\n", a.algo.c_str(), a.n, a.k, a.trials,
                static_cast<double>(exact) / trials, total_tests / trials, max_tests);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gt-lab: group testing experiments"};
  app.require_subcommand(1);

  SimArgs sim;
  auto* sim_cmd = app.add_subcommand("sim", "Run a seeded Monte-Carlo experiment from a JSON config");
  sim_cmd->add_option("--config", sim.config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  sim_cmd->add_option("--seed", sim.seed, "Override the config seed");
  sim_cmd->add_option("--out", sim.out, "Output path; stdout if omitted");
  sim_cmd->add_option("--jobs", sim.jobs, "Worker threads");
  sim_cmd->add_option("--format", sim.format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
  sim_cmd->add_flag("--timing", sim.timing, "Fill wall_time_ms (makes output run-dependent)");

  DecodeArgs dec;
  auto* dec_cmd = app.add_subcommand("decode", "Decode one instance");
  dec_cmd->add_option("--matrix", dec.matrix, "Instance file: 'T n' header then T rows of 0/1")
      ->required()
      ->check(CLI::ExistingFile);
  dec_cmd->add_option("--outcomes", dec.outcomes, "Outcome file (0/1/?)")->check(CLI::ExistingFile);
  dec_cmd->add_option("--decoder", dec.decoder, "Decoder id")->required();
  dec_cmd->add_option("--k", dec.k, "Number of defectives, where the decoder needs it");
  dec_cmd->add_option("--noise", dec.noise, "Noise kind");
  dec_cmd->add_option("--param", dec.param, "Noise parameter");
  dec_cmd->add_option("--param2", dec.param2, "Second noise parameter (threshold)");
  dec_cmd->add_option("--p", dec.p, "Bernoulli design parameter, for decoders that need it");
  dec_cmd->add_option("--opt", dec.options, "Decoder parameter key=value (repeatable)");

  RatesArgs rates;
  auto* rates_cmd = app.add_subcommand("rates", "Tabulate a rate formula as CSV");
  rates_cmd->add_option("--id", rates.id, "Formula id")->required();
  rates_cmd->add_option("--alpha-grid", rates.grid, "a:b:step")->required();
  rates_cmd->add_option("--rho", rates.rho, "Symmetric noise level");
  rates_cmd->add_option("--phi", rates.phi, "Addition noise level");
  rates_cmd->add_option("--xi", rates.xi, "Erasure probability");

  AdaptiveArgs ad;
  auto* ad_cmd = app.add_subcommand("adaptive", "Run an adaptive algorithm on random hidden sets");
  ad_cmd->add_option("--algo", ad.algo, "binary_split, hwang, dorfman, generalized_split, cheng or damaschke")
      ->required();
  ad_cmd->add_option("--n", ad.n, "Items")->required();
  ad_cmd->add_option("--k", ad.k, "Defectives")->required();
  ad_cmd->add_option("--trials", ad.trials, "Random instances");
  ad_cmd->add_option("--seed", ad.seed, "Seed");
  ad_cmd->add_option("--s", ad.s, "Group exponent (generalized_split) or offset (damaschke)");
  ad_cmd->add_option("--c", ad.c, "Repetition constant (cheng)");
  ad_cmd->add_option("--b", ad.b, "Base (damaschke)");
  ad_cmd->add_option("--transcript", ad.transcript, "Write the first trial's tests as JSONL");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigExit;
  }

  try {
    if (*sim_cmd) return run_sim(sim);
    if (*dec_cmd) return run_decode(dec);
    if (*rates_cmd) return run_rates(rates);
    if (*ad_cmd) return run_adaptive(ad);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
