#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "wordldp/mc_harness.hpp"

namespace wordldp {

// Schema violation; `path` is a JSON pointer into the config.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& what) : std::runtime_error(path + ": " + what), path(std::move(path)) {}
  std::string path;
};

struct SimulateParams {
  std::size_t words = 1000;
  int k = 1;
};

struct EntropyParams {
  int n_max = 6;
  int k_max = 6;
};

struct RateParams {
  double alpha = 1.0;  // defaults to the renewal law's declared exponent
  int n_max = 4;
  int k_max = 6;
  std::vector<int> truncation;
};

struct VerifyParams {
  bool annealed = true;
  bool quenched = false;
  int k = 2;
  double eps = 0.1;
  std::vector<int> n_grid;
  std::uint64_t samples = 100'000;
  int replicas = 5;
  std::uint64_t x_seed = 0;  // 0: derived from the run seed
};

struct MixingAuditParams {
  int n_terms = 8;
  int window = 6;
  int past_depth = 3;
};

struct CoarseGrainParams {
  double eps = 0.5;
  std::vector<Partition> partitions;
  std::optional<WordLaw> word_law;  // over cells of the finest partition
  double alpha = 1.0;
  int n_max = 4;
  int k_max = 4;
  int reference_n_max = 3;
};

// Validated configuration. Sections a subcommand does not use may be absent.
struct ExperimentConfig {
  nlohmann::json raw;
  std::uint64_t seed = 0;
  std::optional<LetterSource> source;
  std::optional<RenewalLaw> renewal;
  std::optional<WordLaw> word_law;
  SimulateParams simulate;
  EntropyParams entropy;
  RateParams rate;
  VerifyParams verify;
  MixingAuditParams mixing;
  CoarseGrainParams coarse;

  ReferenceWordProcess reference() const;
};

nlohmann::json load_config_file(const std::string& path);

// Checks everything `subcommand` will read before any computation starts.
ExperimentConfig parse_config(const nlohmann::json& raw, const std::string& subcommand);

LetterSource parse_source(const nlohmann::json& j, const std::string& path);
RenewalLaw parse_renewal(const nlohmann::json& j, const std::string& path);
// `ref` is needed for {"type": "reference"}.
WordLaw parse_word_law(const nlohmann::json& j, const std::string& path, const ReferenceWordProcess* ref);

}  // namespace wordldp
