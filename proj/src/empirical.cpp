#include "wordldp/empirical.hpp"

#include <functional>

#include "wordldp/wordlaw.hpp"

namespace wordldp {

double EmpiricalWordMeasure::mass(const WordTuple& t) const {
  auto it = counts.find(t);
  return it == counts.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(n);
}

std::map<WordTuple, std::int64_t> EmpiricalWordMeasure::drop_first_counts() const {
  std::map<WordTuple, std::int64_t> out;
  for (const auto& [t, c] : counts) out[WordTuple(t.begin() + 1, t.end())] += c;
  return out;
}

std::map<WordTuple, std::int64_t> EmpiricalWordMeasure::drop_last_counts() const {
  std::map<WordTuple, std::int64_t> out;
  for (const auto& [t, c] : counts) out[WordTuple(t.begin(), t.end() - 1)] += c;
  return out;
}

BlockDistribution EmpiricalWordMeasure::to_block() const {
  BlockDistribution b;
  b.k = k;
  for (const auto& [t, c] : counts) b.masses[t] = static_cast<double>(c) / static_cast<double>(n);
  return b;
}

EmpiricalWordMeasure empirical_measure(const WordSeq& y, int k) {
  const auto n = y.size();
  if (k < 1) throw std::invalid_argument("empirical_measure: k must be >= 1");
  if (static_cast<std::size_t>(k) > n) throw std::invalid_argument("empirical_measure: k exceeds the number of words");
  EmpiricalWordMeasure e;
  e.n = static_cast<std::int64_t>(n);
  e.k = k;
  WordTuple t(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < static_cast<std::size_t>(k); ++j) t[j] = y[(i + j) % n];
    ++e.counts[t];
  }
  return e;
}

BlockDistribution model_block(const WordLaw& q, int k, std::size_t budget) {
  if (k < 1) throw std::invalid_argument("model_block: k must be >= 1");
  BlockDistribution out;
  out.k = k;
  WordTuple cur;
  std::size_t visited = 0;
  std::function<void(const WordLaw::State&, double)> rec = [&](const WordLaw::State& s, double mass) {
    const auto probs = q.next_probs(s);
    for (std::size_t i = 0; i < probs.size(); ++i) {
      if (probs[i] <= 0.0) continue;
      if (++visited > budget) throw BudgetExceeded("model_block: tuple enumeration exceeds budget");
      cur.push_back(q.support()[i]);
      if (static_cast<int>(cur.size()) == k) {
        out.masses[cur] = mass * probs[i];
      } else {
        WordLaw::State next = s;
        q.advance(next, i);
        rec(next, mass * probs[i]);
      }
      cur.pop_back();
    }
  };
  rec(q.initial_state(), 1.0);
  return out;
}

nlohmann::json to_json(const Word& w) {
  nlohmann::json a = nlohmann::json::array();
  for (Letter l : w.letters) a.push_back(static_cast<int>(l));
  return a;
}

nlohmann::json to_json(const BlockDistribution& b) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& [t, m] : b.masses) {
    nlohmann::json tuple = nlohmann::json::array();
    for (const auto& w : t) tuple.push_back(to_json(w));
    entries.push_back({{"tuple", tuple}, {"mass", m}});
  }
  return {{"k", b.k}, {"entries", entries}};
}

nlohmann::json to_json(const LetterBlockDistribution& b) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& [t, m] : b.masses) {
    nlohmann::json block = nlohmann::json::array();
    for (Letter l : t) block.push_back(static_cast<int>(l));
    entries.push_back({{"block", block}, {"mass", m}});
  }
  return {{"k", b.k}, {"entries", entries}};
}

}  // namespace wordldp
