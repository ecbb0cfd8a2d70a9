#include "wordldp/config.hpp"

#include <fstream>
#include <set>

namespace wordldp {

using nlohmann::json;

namespace {

const json& require(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(path + "/" + key, "missing required key");
  return *it;
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  return j.get<double>();
}

std::int64_t as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
  return j.get<std::int64_t>();
}

std::uint64_t as_u64(const json& j, const std::string& path) {
  if (!j.is_number_unsigned()) throw ConfigError(path, "expected a non-negative integer");
  return j.get<std::uint64_t>();
}

int as_count(const json& j, const std::string& path, int lo, int hi) {
  const auto v = as_int(j, path);
  if (v < lo || v > hi) throw ConfigError(path, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return static_cast<int>(v);
}

std::vector<double> as_vector(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ConfigError(path, "expected a non-empty array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_number(j[i], path + "/" + std::to_string(i)));
  return out;
}

Eigen::MatrixXd as_matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ConfigError(path, "expected a non-empty array of rows");
  const auto first = as_vector(j[0], path + "/0");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(first.size()));
  for (std::size_t r = 0; r < j.size(); ++r) {
    const auto row = as_vector(j[r], path + "/" + std::to_string(r));
    if (row.size() != first.size()) throw ConfigError(path + "/" + std::to_string(r), "ragged matrix row");
    for (std::size_t c = 0; c < row.size(); ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c];
  }
  return m;
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a string");
  return j.get<std::string>();
}

// Only the listed keys may appear; catches typos early.
void only_keys(const json& j, const std::string& path, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw ConfigError(path + "/" + it.key(), "unknown key");
}

template <class F>
auto rethrow_as_config(const std::string& path, F f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  } catch (const std::domain_error& e) {
    throw ConfigError(path, e.what());
  }
}

std::vector<int> as_int_list(const json& j, const std::string& path, int lo) {
  if (!j.is_array() || j.empty()) throw ConfigError(path, "expected a non-empty array of integers");
  std::vector<int> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_count(j[i], path + "/" + std::to_string(i), lo, 1 << 30));
  return out;
}

Word as_word(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ConfigError(path, "a word is a non-empty array of letters");
  std::vector<Letter> letters;
  for (std::size_t i = 0; i < j.size(); ++i) letters.push_back(static_cast<Letter>(as_count(j[i], path + "/" + std::to_string(i), 0, 255)));
  return Word(std::move(letters));
}

Partition as_partition(const json& j, const std::string& path) {
  if (j.is_number_integer()) return Partition::dyadic(as_count(j, path, 1, 256));
  Partition p;
  p.boundaries = as_vector(j, path);
  if (p.boundaries.size() < 2 || p.boundaries.front() != 0.0 || p.boundaries.back() != 1.0)
    throw ConfigError(path, "boundaries must run from 0 to 1");
  for (std::size_t i = 1; i < p.boundaries.size(); ++i)
    if (!(p.boundaries[i] > p.boundaries[i - 1])) throw ConfigError(path, "boundaries must increase strictly");
  return p;
}

}  // namespace

ReferenceWordProcess ExperimentConfig::reference() const {
  if (!source || !renewal) throw ConfigError("", "source and renewal are required");
  return {*source, *renewal};
}

json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path);
  try {
    return json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed config: ") + e.what());
  }
}

LetterSource parse_source(const json& j, const std::string& path) {
  const auto type = as_string(require(j, "type", path), path + "/type");
  return rethrow_as_config(path, [&]() -> LetterSource {
    if (type == "iid") {
      only_keys(j, path, {"type", "p"});
      return LetterSource::iid(as_vector(require(j, "p", path), path + "/p"));
    }
    if (type == "markov") {
      only_keys(j, path, {"type", "alphabet", "order", "transition"});
      return LetterSource::markov(as_count(require(j, "alphabet", path), path + "/alphabet", 2, 256),
                                  as_count(require(j, "order", path), path + "/order", 0, 16),
                                  as_matrix(require(j, "transition", path), path + "/transition"));
    }
    if (type == "gmeasure") {
      only_keys(j, path, {"type", "base", "amplitude", "ratio", "signs", "sampling_depth"});
      const int depth = j.contains("sampling_depth") ? as_count(j["sampling_depth"], path + "/sampling_depth", 1, 4096) : 64;
      return LetterSource::gmeasure(as_matrix(require(j, "base", path), path + "/base"),
                                    as_number(require(j, "amplitude", path), path + "/amplitude"),
                                    as_number(require(j, "ratio", path), path + "/ratio"),
                                    as_matrix(require(j, "signs", path), path + "/signs"), depth);
    }
    if (type == "renewal_age") {
      only_keys(j, path, {"type", "p"});
      return LetterSource::renewal_age(as_vector(require(j, "p", path), path + "/p"));
    }
    if (type == "rwrs") {
      only_keys(j, path, {"type", "scenery_p"});
      return LetterSource::rwrs(j.contains("scenery_p") ? as_number(j["scenery_p"], path + "/scenery_p") : 0.5);
    }
    if (type == "cosine") {
      only_keys(j, path, {"type", "eps", "partition"});
      const CosineKernel kernel{as_number(require(j, "eps", path), path + "/eps")};
      return kernel.coarse_source(as_partition(require(j, "partition", path), path + "/partition"));
    }
    throw ConfigError(path + "/type", "unknown source type '" + type + "'");
  });
}

RenewalLaw parse_renewal(const json& j, const std::string& path) {
  const auto type = as_string(require(j, "type", path), path + "/type");
  return rethrow_as_config(path, [&]() -> RenewalLaw {
    if (type == "weights") {
      only_keys(j, path, {"type", "weights", "alpha"});
      const double alpha = j.contains("alpha") ? as_number(j["alpha"], path + "/alpha") : 1.0;
      return RenewalLaw::from_weights(as_vector(require(j, "weights", path), path + "/weights"), alpha);
    }
    if (type == "power") {
      only_keys(j, path, {"type", "cap", "alpha", "head"});
      std::optional<double> head;
      if (j.contains("head")) head = as_number(j["head"], path + "/head");
      return RenewalLaw::power(as_count(require(j, "cap", path), path + "/cap", 1, 1 << 24),
                               as_number(require(j, "alpha", path), path + "/alpha"), head);
    }
    if (type == "dirac") {
      only_keys(j, path, {"type", "length"});
      return RenewalLaw::dirac(as_count(require(j, "length", path), path + "/length", 1, 1 << 24));
    }
    throw ConfigError(path + "/type", "unknown renewal type '" + type + "'");
  });
}

WordLaw parse_word_law(const json& j, const std::string& path, const ReferenceWordProcess* ref) {
  const auto type = as_string(require(j, "type", path), path + "/type");
  return rethrow_as_config(path, [&]() -> WordLaw {
    if (type == "reference") {
      only_keys(j, path, {"type"});
      if (!ref) throw ConfigError(path, "a reference word law needs source and renewal");
      return WordLaw::reference(*ref);
    }
    const auto& wj = require(j, "words", path);
    if (!wj.is_array() || wj.empty()) throw ConfigError(path + "/words", "expected a non-empty array of words");
    std::vector<Word> words;
    for (std::size_t i = 0; i < wj.size(); ++i) words.push_back(as_word(wj[i], path + "/words/" + std::to_string(i)));
    if (type == "iid") {
      only_keys(j, path, {"type", "words", "probs"});
      return WordLaw::iid(std::move(words), as_vector(require(j, "probs", path), path + "/probs"));
    }
    if (type == "markov" || type == "hidden") {
      only_keys(j, path, {"type", "words", "transition"});
      auto t = as_matrix(require(j, "transition", path), path + "/transition");
      return type == "markov" ? WordLaw::markov(std::move(words), std::move(t)) : WordLaw::hidden(std::move(words), std::move(t));
    }
    throw ConfigError(path + "/type", "unknown word law type '" + type + "'");
  });
}

ExperimentConfig parse_config(const json& raw, const std::string& sub) {
  static const std::set<std::string> subs = {"simulate", "entropy", "rate", "verify-ldp", "mixing-audit", "coarse-grain"};
  if (!subs.count(sub)) throw ConfigError("", "unknown subcommand '" + sub + "'");
  only_keys(raw, "", {"seed", "source", "renewal", "word_law", "simulate", "entropy", "rate", "verify_ldp", "mixing_audit",
                      "coarse_grain"});
  ExperimentConfig c;
  c.raw = raw;
  c.seed = as_u64(require(raw, "seed", ""), "/seed");

  const bool needs_source = sub != "coarse-grain";
  const bool needs_renewal = sub != "mixing-audit";
  const bool needs_word_law = sub == "entropy" || sub == "rate" || sub == "verify-ldp";
  if (needs_source) c.source = parse_source(require(raw, "source", ""), "/source");
  if (needs_renewal) c.renewal = parse_renewal(require(raw, "renewal", ""), "/renewal");
  if (needs_word_law) {
    const auto ref = c.reference();
    c.word_law = parse_word_law(require(raw, "word_law", ""), "/word_law", &ref);
    if (c.word_law->kind() != WordLaw::Kind::Reference)
      for (const auto& w : c.word_law->support())
        for (Letter l : w.letters)
          if (l >= c.source->alphabet_size()) throw ConfigError("/word_law/words", "letter outside the source alphabet");
  }

  if (sub == "simulate" && raw.contains("simulate")) {
    const auto& s = raw["simulate"];
    only_keys(s, "/simulate", {"words", "k"});
    if (s.contains("words")) c.simulate.words = static_cast<std::size_t>(as_count(s["words"], "/simulate/words", 1, 1 << 28));
    if (s.contains("k")) c.simulate.k = as_count(s["k"], "/simulate/k", 1, 16);
  }
  if (sub == "entropy" && raw.contains("entropy")) {
    const auto& s = raw["entropy"];
    only_keys(s, "/entropy", {"n_max", "k_max"});
    if (s.contains("n_max")) c.entropy.n_max = as_count(s["n_max"], "/entropy/n_max", 1, 64);
    if (s.contains("k_max")) c.entropy.k_max = as_count(s["k_max"], "/entropy/k_max", 1, 64);
  }
  if (c.renewal) c.rate.alpha = c.renewal->alpha();
  if ((sub == "rate" || sub == "verify-ldp") && raw.contains("rate")) {
    const auto& s = raw["rate"];
    only_keys(s, "/rate", {"alpha", "n_max", "k_max", "truncation"});
    if (s.contains("alpha")) {
      c.rate.alpha = as_number(s["alpha"], "/rate/alpha");
      if (!(c.rate.alpha >= 1.0)) throw ConfigError("/rate/alpha", "alpha must be >= 1");
    }
    if (s.contains("n_max")) c.rate.n_max = as_count(s["n_max"], "/rate/n_max", 1, 64);
    if (s.contains("k_max")) c.rate.k_max = as_count(s["k_max"], "/rate/k_max", 1, 64);
    if (s.contains("truncation")) {
      c.rate.truncation = as_int_list(s["truncation"], "/rate/truncation", 1);
      if (!std::is_sorted(c.rate.truncation.begin(), c.rate.truncation.end()))
        throw ConfigError("/rate/truncation", "truncation levels must increase");
    }
  }
  if (sub == "verify-ldp") {
    const auto& s = require(raw, "verify_ldp", "");
    only_keys(s, "/verify_ldp", {"mode", "k", "eps", "n_grid", "samples", "replicas", "x_seed"});
    auto& v = c.verify;
    if (s.contains("mode")) {
      const auto mode = as_string(s["mode"], "/verify_ldp/mode");
      if (mode != "annealed" && mode != "quenched" && mode != "both") throw ConfigError("/verify_ldp/mode", "one of annealed, quenched, both");
      v.annealed = mode != "quenched";
      v.quenched = mode != "annealed";
    }
    if (s.contains("k")) v.k = as_count(s["k"], "/verify_ldp/k", 1, 8);
    if (s.contains("eps")) {
      v.eps = as_number(s["eps"], "/verify_ldp/eps");
      if (!(v.eps > 0.0 && v.eps <= 1.0)) throw ConfigError("/verify_ldp/eps", "eps must lie in (0, 1]");
    }
    v.n_grid = as_int_list(require(s, "n_grid", "/verify_ldp"), "/verify_ldp/n_grid", v.k);
    if (!std::is_sorted(v.n_grid.begin(), v.n_grid.end())) throw ConfigError("/verify_ldp/n_grid", "n_grid must increase");
    if (s.contains("samples")) {
      v.samples = as_u64(s["samples"], "/verify_ldp/samples");
      if (v.samples == 0) throw ConfigError("/verify_ldp/samples", "samples must be positive");
    }
    if (s.contains("replicas")) v.replicas = as_count(s["replicas"], "/verify_ldp/replicas", 1, 1000);
    if (s.contains("x_seed")) v.x_seed = as_u64(s["x_seed"], "/verify_ldp/x_seed");
    if (c.word_law->kind() == WordLaw::Kind::Reference && c.word_law->max_length() > 16)
      throw ConfigError("/word_law", "reference targets need renewal cap <= 16");
  }
  if (sub == "mixing-audit" && raw.contains("mixing_audit")) {
    const auto& s = raw["mixing_audit"];
    only_keys(s, "/mixing_audit", {"n_terms", "window", "past_depth"});
    if (s.contains("n_terms")) c.mixing.n_terms = as_count(s["n_terms"], "/mixing_audit/n_terms", 1, 64);
    if (s.contains("window")) c.mixing.window = as_count(s["window"], "/mixing_audit/window", 2, 10);
    if (s.contains("past_depth")) c.mixing.past_depth = as_count(s["past_depth"], "/mixing_audit/past_depth", 1, 8);
  }
  if (sub == "coarse-grain") {
    const auto& s = require(raw, "coarse_grain", "");
    only_keys(s, "/coarse_grain", {"eps", "partitions", "word_law", "alpha", "n_max", "k_max", "reference_n_max"});
    auto& g = c.coarse;
    g.eps = as_number(require(s, "eps", "/coarse_grain"), "/coarse_grain/eps");
    if (!(std::abs(g.eps) < 1.0)) throw ConfigError("/coarse_grain/eps", "|eps| must be < 1");
    const auto& pj = require(s, "partitions", "/coarse_grain");
    if (!pj.is_array() || pj.empty()) throw ConfigError("/coarse_grain/partitions", "expected a non-empty array");
    for (std::size_t i = 0; i < pj.size(); ++i) {
      const auto path = "/coarse_grain/partitions/" + std::to_string(i);
      g.partitions.push_back(as_partition(pj[i], path));
      if (i > 0 && !g.partitions[i].refines(g.partitions[i - 1])) throw ConfigError(path, "partitions must be nested, coarsest first");
    }
    g.alpha = c.renewal->alpha();
    if (s.contains("alpha")) {
      g.alpha = as_number(s["alpha"], "/coarse_grain/alpha");
      if (!(g.alpha >= 1.0)) throw ConfigError("/coarse_grain/alpha", "alpha must be >= 1");
    }
    if (s.contains("n_max")) g.n_max = as_count(s["n_max"], "/coarse_grain/n_max", 1, 64);
    if (s.contains("k_max")) g.k_max = as_count(s["k_max"], "/coarse_grain/k_max", 1, 64);
    if (s.contains("reference_n_max")) g.reference_n_max = as_count(s["reference_n_max"], "/coarse_grain/reference_n_max", 1, 64);
    if (s.contains("word_law")) {
      g.word_law = parse_word_law(s["word_law"], "/coarse_grain/word_law", nullptr);
      const int cells = g.partitions.back().c();
      for (const auto& w : g.word_law->support())
        for (Letter l : w.letters)
          if (l >= cells) throw ConfigError("/coarse_grain/word_law/words", "letter outside the finest partition");
    }
  }
  return c;
}

}  // namespace wordldp
