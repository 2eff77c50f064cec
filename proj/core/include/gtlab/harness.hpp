#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gtlab/model.hpp"
#include "gtlab/noise.hpp"
#include "gtlab/saffron.hpp"

namespace gtlab {

enum class PriorKind { combinatorial, iid };

struct DesignSpec {
  enum class Kind { bernoulli, near_constant_column, individual, saffron };
  Kind kind = Kind::bernoulli;
  std::optional<double> p;            // Bernoulli inclusion probability; else nu / k
  double nu = 1.0;                    // Bernoulli p = nu / k; NCC L = round(nu T / k)
  std::optional<std::size_t> draws;   // NCC: fixed L instead of the nu rule
};

// A decoder id plus its parameters. Numeric and string parameters are kept
// apart so that specs round-trip through JSON without type guessing.
struct DecoderSpec {
  std::string id;
  std::string label;  // CSV name; defaults to id
  std::map<std::string, double> numbers;
  std::map<std::string, std::string> strings;

  const std::string& name() const { return label.empty() ? id : label; }
};

struct ExperimentSpec {
  std::size_t n = 0;
  std::size_t k = 0;
  PriorKind prior = PriorKind::combinatorial;
  DesignSpec design;
  NoiseModel noise;
  std::vector<DecoderSpec> decoders;
  std::vector<std::size_t> T_values;
  std::size_t trials = 1;
  std::uint64_t seed = 1;
  std::size_t jobs = 1;
  std::size_t d = 0;     // success means at most d false positives and d false negatives
  bool timing = false;   // wall_time_ms stays 0 unless enabled, keeping output reproducible
};

struct ResultRow {
  std::size_t T = 0;
  std::string decoder;
  double success_rate = 0.0;
  double mean_fp = 0.0;
  double mean_fn = 0.0;
  double wall_time_ms = 0.0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::size_t decoder_errors = 0;  // trials where the decoder raised; scored as empty output

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

inline constexpr const char* kCsvHeader = "T,decoder,success_rate,mean_fp,mean_fn,wall_time_ms,trials,seed";

// Parsing and validation failures raise ConfigError.
ExperimentSpec parse_experiment_spec(const std::string& json_text);
ExperimentSpec load_experiment_spec(const std::string& path);
void validate(const ExperimentSpec& spec);

// Per-trial seed: derive_seed(seed, T, trial).
std::uint64_t trial_seed(std::uint64_t seed, std::size_t T, std::size_t trial);

using DecodeFn = std::function<DefectiveSet(const TestMatrix&, const OutcomeVector&)>;

// Builds a decoder for one T value; `saffron_design` supplies the design
// object for the saffron decoder. Raises ConfigError on bad parameters.
DecodeFn make_decoder(const DecoderSpec& decoder, const ExperimentSpec& spec, std::size_t T,
                      const SaffronDesign* saffron_design = nullptr);

// Bernoulli parameter implied by the design (nu / k when p is not given).
double design_probability(const ExperimentSpec& spec);

// Rows ordered by T, then by decoder order in the config.
std::vector<ResultRow> run_monte_carlo(const ExperimentSpec& spec);

enum class ResultFormat { csv, jsonl };

std::string format_results(const std::vector<ResultRow>& rows, ResultFormat format);
// Throws std::runtime_error naming the path on I/O failure.
void serialize_results(const std::vector<ResultRow>& rows, ResultFormat format, const std::string& path);
std::vector<ResultRow> parse_results_jsonl(const std::string& text);
std::vector<ResultRow> parse_results_csv(const std::string& text);

}  // namespace gtlab
