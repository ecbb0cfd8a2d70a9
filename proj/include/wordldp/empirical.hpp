#pragma once

#include <map>
#include "json.hpp"
#include <stdexcept>
#include <vector>

#include "wordldp/renewal.hpp"

namespace wordldp {

class WordLaw;

using WordTuple = std::vector<Word>;

// Finite-depth marginal: a law on k-tuples of keys.
template <class Key>
struct BlockLaw {
  using key_type = Key;
  int k = 0;
  std::map<Key, double> masses;

  double total() const {
    double s = 0.0;
    for (const auto& [key, m] : masses) s += m;
    return s;
  }
  double mass(const Key& key) const {
    auto it = masses.find(key);
    return it == masses.end() ? 0.0 : it->second;
  }
  BlockLaw drop_last() const { return drop(false); }
  BlockLaw drop_first() const { return drop(true); }

 private:
  BlockLaw drop(bool first) const {
    if (k < 1) throw std::invalid_argument("cannot marginalize a depth-0 block law");
    BlockLaw out;
    out.k = k - 1;
    for (const auto& [key, m] : masses) {
      Key shorter(first ? key.begin() + 1 : key.begin(), first ? key.end() : key.end() - 1);
      out.masses[shorter] += m;
    }
    return out;
  }
};

using BlockDistribution = BlockLaw<WordTuple>;
using LetterBlockDistribution = BlockLaw<std::vector<Letter>>;

template <class Key>
double tv_distance(const BlockLaw<Key>& a, const BlockLaw<Key>& b) {
  if (a.k != b.k) throw std::invalid_argument("tv_distance: depth mismatch");
  double s = 0.0;
  auto ia = a.masses.begin();
  auto ib = b.masses.begin();
  while (ia != a.masses.end() || ib != b.masses.end()) {
    if (ib == b.masses.end() || (ia != a.masses.end() && ia->first < ib->first)) {
      s += std::abs(ia->second);
      ++ia;
    } else if (ia == a.masses.end() || ib->first < ia->first) {
      s += std::abs(ib->second);
      ++ib;
    } else {
      s += std::abs(ia->second - ib->second);
      ++ia;
      ++ib;
    }
  }
  return std::min(1.0, 0.5 * s);
}

// k-marginal of the periodized empirical process: integer counts over n
// windows, so every mass is counts[t] / n exactly.
struct EmpiricalWordMeasure {
  std::int64_t n = 0;
  int k = 0;
  std::map<WordTuple, std::int64_t> counts;

  double mass(const WordTuple& t) const;
  std::map<WordTuple, std::int64_t> drop_first_counts() const;
  std::map<WordTuple, std::int64_t> drop_last_counts() const;
  BlockDistribution to_block() const;
};

EmpiricalWordMeasure empirical_measure(const WordSeq& y, int k);

// Exact k-tuple law of Q. Throws BudgetExceeded past `budget` tuples.
BlockDistribution model_block(const WordLaw& q, int k, std::size_t budget = 10'000'000);

nlohmann::json to_json(const Word& w);
nlohmann::json to_json(const BlockDistribution& b);
nlohmann::json to_json(const LetterBlockDistribution& b);

}  // namespace wordldp
