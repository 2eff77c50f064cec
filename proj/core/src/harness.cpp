#include "gtlab/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "gtlab/decode_noiseless.hpp"
#include "gtlab/decode_noisy.hpp"
#include "gtlab/designs.hpp"
#include "gtlab/errors.hpp"
#include "gtlab/saffron.hpp"

namespace gtlab {

namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& msg) {
  throw ConfigError(msg);
}

std::size_t get_count(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0)
    config_error(std::string("'") + key + "' must be a nonnegative integer");
  return v.get<std::size_t>();
}

DesignSpec parse_design(const json& j) {
  if (!j.is_object()) config_error("'design' must be an object");
  DesignSpec d;
  const std::string kind = j.value("kind", "bernoulli");
  if (kind == "bernoulli") d.kind = DesignSpec::Kind::bernoulli;
  else if (kind == "near_constant_column" || kind == "ncc") d.kind = DesignSpec::Kind::near_constant_column;
  else if (kind == "individual") d.kind = DesignSpec::Kind::individual;
  else if (kind == "saffron") d.kind = DesignSpec::Kind::saffron;
  else config_error("unknown design kind '" + kind + "'");
  for (const auto& [key, value] : j.items()) {
    if (key == "kind") continue;
    if (key == "p") d.p = value.get<double>();
    else if (key == "nu") d.nu = value.get<double>();
    else if (key == "L") d.draws = value.get<std::size_t>();
    else config_error("unknown design field '" + key + "'");
  }
  if (d.kind == DesignSpec::Kind::near_constant_column && !j.contains("nu") && !d.draws)
    d.nu = std::numbers::ln2;
  return d;
}

NoiseModel parse_noise(const json& j) {
  if (j.is_string()) return parse_noise(json{{"kind", j}});
  if (!j.is_object()) config_error("'noise' must be an object");
  const NoiseKind kind = parse_noise_kind(j.value("kind", "noiseless"));
  auto param = [&](const char* key) {
    if (!j.contains(key)) config_error("noise kind '" + to_string(kind) + "' needs '" + key + "'");
    return j.at(key);
  };
  switch (kind) {
    case NoiseKind::noiseless: return NoiseModel::noiseless();
    case NoiseKind::symmetric: return NoiseModel::symmetric(param("param").get<double>());
    case NoiseKind::addition: return NoiseModel::addition(param("param").get<double>());
    case NoiseKind::dilution: return NoiseModel::dilution(param("param").get<double>());
    case NoiseKind::z: return NoiseModel::z_channel(param("param").get<double>());
    case NoiseKind::erasure: return NoiseModel::erasure(param("param").get<double>());
    case NoiseKind::threshold: {
      const auto& p = param("param");
      if (p.is_array() && p.size() == 2) return NoiseModel::threshold(p[0].get<double>(), p[1].get<double>());
      return NoiseModel::threshold(p.get<double>(), param("param2").get<double>());
    }
  }
  config_error("unknown noise kind");
}

DecoderSpec parse_decoder(const json& j) {
  DecoderSpec d;
  if (j.is_string()) {
    d.id = j.get<std::string>();
    return d;
  }
  if (!j.is_object() || !j.contains("id")) config_error("each decoder needs an 'id'");
  for (const auto& [key, value] : j.items()) {
    if (key == "id") d.id = value.get<std::string>();
    else if (key == "label") d.label = value.get<std::string>();
    else if (value.is_boolean()) d.numbers[key] = value.get<bool>() ? 1.0 : 0.0;
    else if (value.is_number()) d.numbers[key] = value.get<double>();
    else if (value.is_string()) d.strings[key] = value.get<std::string>();
    else config_error("decoder parameter '" + key + "' must be a number, boolean or string");
  }
  return d;
}

std::vector<std::size_t> parse_T(const json& j) {
  std::vector<std::size_t> out;
  if (j.is_array()) {
    for (const auto& v : j) {
      if (!v.is_number_integer() || v.get<long long>() <= 0) config_error("T values must be positive integers");
      out.push_back(v.get<std::size_t>());
    }
  } else if (j.is_number_integer()) {
    out.push_back(j.get<std::size_t>());
  } else if (j.is_object()) {
    const std::size_t start = get_count(j, "start");
    const std::size_t stop = get_count(j, "stop");
    const std::size_t step = j.contains("step") ? get_count(j, "step") : 1;
    if (step == 0 || start == 0 || stop < start) config_error("T range needs 0 < start <= stop and step > 0");
    for (std::size_t t = start; t <= stop; t += step) out.push_back(t);
  } else {
    config_error("'T' must be a list, an integer or {start, stop, step}");
  }
  return out;
}

// Parameter access that rejects names the decoder does not understand.
class Params {
 public:
  Params(const DecoderSpec& d, std::initializer_list<const char*> allowed) : d_(d) {
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [k, v] : d.numbers)
      if (!ok.count(k)) config_error("decoder '" + d.id + "' has no numeric parameter '" + k + "'");
    for (const auto& [k, v] : d.strings)
      if (!ok.count(k)) config_error("decoder '" + d.id + "' has no string parameter '" + k + "'");
  }
  std::optional<double> num(const std::string& key) const {
    auto it = d_.numbers.find(key);
    if (it == d_.numbers.end()) return std::nullopt;
    return it->second;
  }
  double num(const std::string& key, double fallback) const { return num(key).value_or(fallback); }
  std::string str(const std::string& key, const std::string& fallback) const {
    auto it = d_.strings.find(key);
    return it == d_.strings.end() ? fallback : it->second;
  }

 private:
  const DecoderSpec& d_;
};

std::size_t as_count(double v, const char* what) {
  if (!(v >= 0.0) || v != std::floor(v)) config_error(std::string(what) + " must be a nonnegative integer");
  return static_cast<std::size_t>(v);
}

bool binary_noise(const NoiseModel& m) {
  return !m.has_erasures();
}

void require_binary(const DecoderSpec& d, const ExperimentSpec& spec) {
  if (!binary_noise(spec.noise))
    config_error("decoder '" + d.id + "' needs binary outcomes; wrap it with the 'erasure' decoder for " +
                 spec.noise.name());
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

double design_probability(const ExperimentSpec& spec) {
  if (spec.design.p) return *spec.design.p;
  if (spec.k == 0) config_error("design: p = nu / k needs k >= 1");
  return spec.design.nu / static_cast<double>(spec.k);
}

ExperimentSpec parse_experiment_spec(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    config_error(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) config_error("config must be a JSON object");
  ExperimentSpec spec;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "n") spec.n = get_count(j, "n");
      else if (key == "k") spec.k = get_count(j, "k");
      else if (key == "prior") {
        const auto p = value.get<std::string>();
        if (p == "combinatorial") spec.prior = PriorKind::combinatorial;
        else if (p == "iid") spec.prior = PriorKind::iid;
        else config_error("unknown prior '" + p + "'");
      } else if (key == "design") spec.design = parse_design(value);
      else if (key == "noise") spec.noise = parse_noise(value);
      else if (key == "decoders") {
        if (!value.is_array()) config_error("'decoders' must be a list");
        for (const auto& d : value) spec.decoders.push_back(parse_decoder(d));
      } else if (key == "decoder") spec.decoders.push_back(parse_decoder(value));
      else if (key == "T") spec.T_values = parse_T(value);
      else if (key == "trials") spec.trials = get_count(j, "trials");
      else if (key == "seed") spec.seed = value.get<std::uint64_t>();
      else if (key == "jobs") spec.jobs = get_count(j, "jobs");
      else if (key == "d") spec.d = get_count(j, "d");
      else if (key == "timing") spec.timing = value.get<bool>();
      else config_error("unknown config field '" + key + "'");
    }
  } catch (const json::exception& e) {
    config_error(std::string("config field has the wrong type: ") + e.what());
  } catch (const std::invalid_argument& e) {
    config_error(e.what());
  }
  if (spec.design.kind == DesignSpec::Kind::individual && spec.T_values.empty()) spec.T_values = {spec.n};
  return spec;
}

ExperimentSpec load_experiment_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_experiment_spec(ss.str());
}

std::uint64_t trial_seed(std::uint64_t seed, std::size_t T, std::size_t trial) {
  return derive_seed(seed, T, trial);
}

DecodeFn make_decoder(const DecoderSpec& d, const ExperimentSpec& spec, std::size_t T,
                      const SaffronDesign* saffron_design) {
  const std::string& id = d.id;
  try {
    if (id == "comp" || id == "dd" || id == "scomp") {
      Params p(d, {});
      require_binary(d, spec);
      const auto which = parse_noiseless_decoder(id);
      return [which](const TestMatrix& X, const OutcomeVector& y) { return decode_noiseless(which, X, y); };
    }
    if (id == "sss") {
      Params p(d, {"cap"});
      require_binary(d, spec);
      const std::size_t cap = as_count(p.num("cap", kDefaultSssCap), "cap");
      return [cap](const TestMatrix& X, const OutcomeVector& y) { return sss_exact(X, y, cap); };
    }
    if (id == "lp") {
      Params p(d, {"rounding"});
      require_binary(d, spec);
      const std::string r = p.str("rounding", "strict_positive");
      if (r != "strict_positive" && r != "half") config_error("lp rounding must be strict_positive or half");
      const auto rounding = r == "half" ? LpRounding::half : LpRounding::strict_positive;
      return [rounding](const TestMatrix& X, const OutcomeVector& y) { return lp_decode(X, y, rounding); };
    }
    if (id == "ml") {
      Params p(d, {"k"});
      const std::size_t k = as_count(p.num("k", static_cast<double>(spec.k)), "k");
      if (log_binomial(spec.n, std::min(k, spec.n)) > std::log2(kMlOracleLimit))
        config_error("ml: C(n,k) exceeds the enumeration limit");
      const NoiseModel model = spec.noise;
      return [k, model](const TestMatrix& X, const OutcomeVector& y) { return ml_oracle(X, y, k, model); };
    }
    if (id == "ncomp") {
      Params p(d, {"rho", "delta"});
      require_binary(d, spec);
      std::optional<double> rho = p.num("rho");
      if (!rho) {
        if (spec.noise.kind != NoiseKind::symmetric) config_error("ncomp needs 'rho' unless the noise is symmetric");
        rho = spec.noise.param;
      }
      NcompParams np = NcompParams::simulation_default(*rho);
      if (auto delta = p.num("delta")) np.delta = *delta;
      const double thr = 1.0 - np.rho * (1.0 + np.delta);
      if (!(np.rho > 0.0 && np.rho < 0.5) || !(np.delta > 0.0) || !(thr > 0.0 && thr < 1.0))
        config_error("ncomp: need rho in (0, 0.5), delta > 0 and 1 - rho(1 + delta) in (0, 1)");
      return [np](const TestMatrix& X, const OutcomeVector& y) { return ncomp(X, y, np).estimate; };
    }
    if (id == "separate") {
      Params p(d, {"gamma", "gamma_rule", "delta"});
      if (!spec.noise.only_defects_matter()) config_error("separate decoding does not support " + spec.noise.name());
      if (spec.design.kind == DesignSpec::Kind::individual || spec.design.kind == DesignSpec::Kind::saffron)
        config_error("separate decoding needs a Bernoulli or near-constant column design");
      if (spec.k == 0) config_error("separate decoding needs k >= 1");
      const double prob = design_probability(spec);
      SeparateDecodingParams sp;
      if (auto g = p.num("gamma")) {
        sp = {*g, prob, spec.k};
      } else {
        const std::string rule = p.str("gamma_rule", "information");
        const double delta = p.num("delta", 1.0 / 3.0);
        if (rule == "information") {
          if (!(delta >= 0.0 && delta < 1.0)) config_error("separate: delta must lie in [0, 1)");
          sp = SeparateDecodingParams::information(spec.noise, T, spec.k, prob, delta);
        } else if (rule == "union") {
          if (!(delta > 0.0) || spec.n <= spec.k) config_error("separate: union rule needs delta > 0 and n > k");
          sp = SeparateDecodingParams::union_bound(spec.n, spec.k, prob, delta);
        } else {
          config_error("separate: gamma_rule must be information or union");
        }
      }
      const NoiseModel model = spec.noise;
      return [sp, model](const TestMatrix& X, const OutcomeVector& y) { return separate_decode(X, y, model, sp); };
    }
    if (id == "ndd") {
      Params p(d, {"gamma1", "gamma2", "nu"});
      require_binary(d, spec);
      if (spec.k == 0) config_error("ndd needs k >= 1");
      NddParams np;
      np.gamma1 = p.num("gamma1", 0.175);
      np.gamma2 = p.num("gamma2", 0.175);
      np.k = spec.k;
      if (auto nu = p.num("nu")) np.nu = *nu;
      else if (spec.design.kind == DesignSpec::Kind::bernoulli || spec.design.kind == DesignSpec::Kind::near_constant_column)
        np.nu = design_probability(spec) * static_cast<double>(spec.k);
      else config_error("ndd needs 'nu' for this design");
      if (np.gamma1 < 0.0 || np.gamma2 < 0.0 || !(np.nu > 0.0)) config_error("ndd: thresholds must be >= 0 and nu > 0");
      return [np](const TestMatrix& X, const OutcomeVector& y) { return ndd(X, y, np); };
    }
    if (id == "noisy_lp") {
      Params p(d, {"zeta", "rounding", "pin_negative_slack", "pin_positive_slack"});
      require_binary(d, spec);
      NoisyLpParams np;
      np.zeta = p.num("zeta", 0.5);
      if (!(np.zeta > 0.0)) config_error("noisy_lp: zeta must be positive");
      const std::string r = p.str("rounding", "nearest");
      if (r == "nearest") np.rounding = NoisyLpParams::Rounding::nearest;
      else if (r == "strict_positive") np.rounding = NoisyLpParams::Rounding::strict_positive;
      else config_error("noisy_lp rounding must be nearest or strict_positive");
      np.pin_negative_slack = p.num("pin_negative_slack", 0.0) != 0.0;
      np.pin_positive_slack = p.num("pin_positive_slack", 0.0) != 0.0;
      return [np](const TestMatrix& X, const OutcomeVector& y) { return noisy_lp(X, y, np); };
    }
    if (id == "bp") {
      Params p(d, {"iterations", "prior_q", "mode"});
      require_binary(d, spec);
      BpParams bp;
      try {
        bp.model = BpModel::from_noise(spec.noise);
      } catch (const UnsupportedModel& e) {
        config_error(e.what());
      }
      bp.iterations = as_count(p.num("iterations", 10.0), "iterations");
      bp.prior_q = p.num("prior_q", spec.n ? static_cast<double>(spec.k) / static_cast<double>(spec.n) : 0.0);
      if (!(bp.prior_q > 0.0 && bp.prior_q < 1.0)) config_error("bp: prior_q must lie in (0, 1)");
      const std::string mode = p.str("mode", "threshold");
      if (mode != "threshold" && mode != "top_k") config_error("bp mode must be threshold or top_k");
      bp.top_k = mode == "top_k";
      bp.k = spec.k;
      return [bp](const TestMatrix& X, const OutcomeVector& y) { return bp_decode(X, y, bp).estimate; };
    }
    if (id == "erasure") {
      Params p(d, {"inner", "cap"});
      const auto inner = parse_noiseless_decoder(p.str("inner", "dd"));
      const std::size_t cap = as_count(p.num("cap", kDefaultSssCap), "cap");
      return [inner, cap](const TestMatrix& X, const OutcomeVector& y) {
        return erasure_wrap(X, y, inner, cap).estimate;
      };
    }
    if (id == "saffron") {
      Params p(d, {});
      require_binary(d, spec);
      if (spec.design.kind != DesignSpec::Kind::saffron) config_error("the saffron decoder needs the saffron design");
      if (!saffron_design) {
        return [](const TestMatrix&, const OutcomeVector&) -> DefectiveSet {
          throw std::logic_error("saffron decoder built without a design");
        };
      }
      const SaffronDesign design = *saffron_design;
      return [design](const TestMatrix&, const OutcomeVector& y) { return saffron_decode(design, y); };
    }
  } catch (const std::invalid_argument& e) {
    config_error("decoder '" + id + "': " + e.what());
  } catch (const UnsupportedModel& e) {
    config_error("decoder '" + id + "': " + e.what());
  }
  config_error("unknown decoder id '" + id + "'");
}

void validate(const ExperimentSpec& spec) {
  if (spec.n == 0) config_error("n must be positive");
  if (spec.k > spec.n) config_error("k must not exceed n");
  if (spec.trials == 0) config_error("trials must be at least 1");
  if (spec.jobs == 0) config_error("jobs must be at least 1");
  if (spec.T_values.empty()) config_error("no T values given");
  if (spec.decoders.empty()) config_error("no decoders given");
  std::set<std::string> names;
  for (const auto& d : spec.decoders) {
    if (d.name().empty() || d.name().find_first_of(",\"\n") != std::string::npos)
      config_error("decoder label '" + d.name() + "' must be nonempty without commas, quotes or newlines");
    if (!names.insert(d.name()).second) config_error("duplicate decoder label '" + d.name() + "'");
  }
  switch (spec.design.kind) {
    case DesignSpec::Kind::bernoulli: {
      const double p = design_probability(spec);
      if (!(p >= 0.0 && p <= 1.0)) config_error("Bernoulli design: p outside [0,1]");
      break;
    }
    case DesignSpec::Kind::near_constant_column:
      if (spec.design.draws && *spec.design.draws == 0) config_error("NCC design: L must be positive");
      if (!spec.design.draws && (spec.k == 0 || !(spec.design.nu > 0.0)))
        config_error("NCC design: the nu rule needs k >= 1 and nu > 0");
      break;
    case DesignSpec::Kind::individual:
      for (std::size_t T : spec.T_values)
        if (T != spec.n) config_error("individual testing uses exactly T = n tests");
      break;
    case DesignSpec::Kind::saffron: {
      if (spec.n < 2 || spec.k == 0) config_error("saffron design needs n >= 2 and k >= 1");
      const std::size_t block = 2 * saffron_bits(spec.n);
      for (std::size_t T : spec.T_values)
        if (T % block != 0) config_error("saffron design: T must be a multiple of 2 ceil(log2 n) = " + std::to_string(block));
      break;
    }
  }
  // Building every decoder once surfaces parameter and model mismatches
  // before any trial runs.
  for (const auto& d : spec.decoders) make_decoder(d, spec, spec.T_values.front());
}

std::vector<ResultRow> run_monte_carlo(const ExperimentSpec& spec) {
  validate(spec);
  using Clock = std::chrono::steady_clock;
  const std::size_t nd = spec.decoders.size();
  std::vector<ResultRow> rows;

  struct Tally {
    std::vector<std::size_t> success, fp, fn, errors;
    std::vector<double> ms;
    explicit Tally(std::size_t nd) : success(nd), fp(nd), fn(nd), errors(nd), ms(nd) {}
  };

  for (std::size_t T : spec.T_values) {
    std::vector<DecodeFn> decoders;
    for (const auto& d : spec.decoders) decoders.push_back(make_decoder(d, spec, T));
    const bool saffron = spec.design.kind == DesignSpec::Kind::saffron;
    const std::size_t bundles = saffron ? T / (2 * saffron_bits(spec.n)) : 0;

    auto work = [&](std::size_t first, std::size_t stride, Tally& tally) {
      for (std::size_t trial = first; trial < spec.trials; trial += stride) {
        Rng rng(trial_seed(spec.seed, T, trial));
        const DefectiveSet K = spec.prior == PriorKind::combinatorial
                                   ? sample_defective_set_combinatorial(spec.n, spec.k, rng)
                                   : sample_defective_set_iid(spec.n, static_cast<double>(spec.k) / static_cast<double>(spec.n), rng);
        TestMatrix X;
        std::optional<SaffronEncoding> enc;
        switch (spec.design.kind) {
          case DesignSpec::Kind::bernoulli:
            X = sample_bernoulli_design(spec.n, T, design_probability(spec), rng);
            break;
          case DesignSpec::Kind::near_constant_column:
            X = sample_ncc_design(spec.n, T, spec.design.draws ? *spec.design.draws : ncc_draws(spec.design.nu, T, spec.k), rng);
            break;
          case DesignSpec::Kind::individual:
            X = individual_testing_design(spec.n);
            break;
          case DesignSpec::Kind::saffron:
            enc = saffron_encode(spec.n, spec.k, bundles, rng);
            X = enc->X;
            break;
        }
        const OutcomeVector y = sample_outcomes(X, K, spec.noise, rng);
        for (std::size_t j = 0; j < nd; ++j) {
          const auto start = spec.timing ? Clock::now() : Clock::time_point{};
          DefectiveSet estimate;
          try {
            if (enc && spec.decoders[j].id == "saffron")
              estimate = make_decoder(spec.decoders[j], spec, T, &enc->design)(X, y);
            else
              estimate = decoders[j](X, y);
          } catch (const ResourceLimitError&) {
            ++tally.errors[j];
          } catch (const SolverFailure&) {
            ++tally.errors[j];
          } catch (const std::invalid_argument&) {
            ++tally.errors[j];
          }
          if (spec.timing) tally.ms[j] += std::chrono::duration<double, std::milli>(Clock::now() - start).count();
          const auto rep = evaluate_recovery(K, estimate, spec.d);
          tally.success[j] += rep.success;
          tally.fp[j] += rep.false_positives;
          tally.fn[j] += rep.false_negatives;
        }
      }
    };

    const std::size_t jobs = std::min(spec.jobs, spec.trials);
    std::vector<Tally> tallies(jobs, Tally(nd));
    if (jobs == 1) {
      work(0, 1, tallies[0]);
    } else {
      std::vector<std::thread> threads;
      std::vector<std::exception_ptr> failures(jobs);
      for (std::size_t w = 0; w < jobs; ++w)
        threads.emplace_back([&, w] {
          try {
            work(w, jobs, tallies[w]);
          } catch (...) {
            failures[w] = std::current_exception();
          }
        });
      for (auto& t : threads) t.join();
      for (auto& f : failures)
        if (f) std::rethrow_exception(f);
    }

    Tally total(nd);
    for (const auto& t : tallies)
      for (std::size_t j = 0; j < nd; ++j) {
        total.success[j] += t.success[j];
        total.fp[j] += t.fp[j];
        total.fn[j] += t.fn[j];
        total.errors[j] += t.errors[j];
        total.ms[j] += t.ms[j];
      }
    const double trials = static_cast<double>(spec.trials);
    for (std::size_t j = 0; j < nd; ++j) {
      ResultRow r;
      r.T = T;
      r.decoder = spec.decoders[j].name();
      r.success_rate = static_cast<double>(total.success[j]) / trials;
      r.mean_fp = static_cast<double>(total.fp[j]) / trials;
      r.mean_fn = static_cast<double>(total.fn[j]) / trials;
      r.wall_time_ms = total.ms[j];
      r.trials = spec.trials;
      r.seed = spec.seed;
      r.decoder_errors = total.errors[j];
      rows.push_back(std::move(r));
    }
  }
  return rows;
}

std::string format_results(const std::vector<ResultRow>& rows, ResultFormat format) {
  std::string out;
  if (format == ResultFormat::csv) {
    out += kCsvHeader;
    out += '\n';
    for (const auto& r : rows) {
      out += std::to_string(r.T) + ',' + r.decoder + ',' + format_double(r.success_rate) + ',' +
             format_double(r.mean_fp) + ',' + format_double(r.mean_fn) + ',' + format_double(r.wall_time_ms) +
             ',' + std::to_string(r.trials) + ',' + std::to_string(r.seed) + '\n';
    }
    return out;
  }
  for (const auto& r : rows) {
    json j = {{"T", r.T},
              {"decoder", r.decoder},
              {"success_rate", r.success_rate},
              {"mean_fp", r.mean_fp},
              {"mean_fn", r.mean_fn},
              {"wall_time_ms", r.wall_time_ms},
              {"trials", r.trials},
              {"seed", r.seed},
              {"decoder_errors", r.decoder_errors}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

void serialize_results(const std::vector<ResultRow>& rows, ResultFormat format, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << format_results(rows, format);
  out.flush();
  if (!out) throw std::runtime_error("failed writing results to '" + path + "'");
}

std::vector<ResultRow> parse_results_jsonl(const std::string& text) {
  std::vector<ResultRow> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto j = json::parse(line);
    ResultRow r;
    r.T = j.at("T").get<std::size_t>();
    r.decoder = j.at("decoder").get<std::string>();
    r.success_rate = j.at("success_rate").get<double>();
    r.mean_fp = j.at("mean_fp").get<double>();
    r.mean_fn = j.at("mean_fn").get<double>();
    r.wall_time_ms = j.at("wall_time_ms").get<double>();
    r.trials = j.at("trials").get<std::size_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.decoder_errors = j.value("decoder_errors", std::size_t{0});
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<ResultRow> parse_results_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("results csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw std::invalid_argument("results csv: unexpected header '" + line + "'");
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 8) throw std::invalid_argument("results csv: expected 8 columns in '" + line + "'");
    ResultRow r;
    r.T = std::stoull(cells[0]);
    r.decoder = cells[1];
    r.success_rate = std::stod(cells[2]);
    r.mean_fp = std::stod(cells[3]);
    r.mean_fn = std::stod(cells[4]);
    r.wall_time_ms = std::stod(cells[5]);
    r.trials = std::stoull(cells[6]);
    r.seed = std::stoull(cells[7]);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace gtlab
