#include "wordldp/renewal.hpp"

namespace wordldp {

RenewalLaw RenewalLaw::from_weights(std::vector<double> weights, double alpha) {
  if (weights.empty()) throw std::invalid_argument("renewal law needs at least one weight");
  if (!(alpha >= 1.0)) throw std::invalid_argument("renewal law: declared alpha must be >= 1");
  double s = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("renewal law: invalid weight");
    s += w;
  }
  if (!(s > 0.0)) throw std::invalid_argument("renewal law: weights sum to zero");
  RenewalLaw r;
  for (double& w : weights) w /= s;
  r.weights_ = std::move(weights);
  r.alpha_ = alpha;
  r.norm_ = s;
  r.alias_ = AliasTable(r.weights_);
  return r;
}

RenewalLaw RenewalLaw::power(int cap, double alpha, std::optional<double> head) {
  if (cap < 1) throw std::invalid_argument("renewal law: cap must be >= 1");
  std::vector<double> w(static_cast<std::size_t>(cap));
  for (int l = 1; l <= cap; ++l) w[static_cast<std::size_t>(l - 1)] = std::pow(static_cast<double>(l), -alpha);
  if (!head) return from_weights(std::move(w), alpha);
  if (!(*head > 0.0 && *head < 1.0) || cap < 2) throw std::invalid_argument("renewal law: head mass must be in (0,1) with cap >= 2");
  double tail = 0.0;
  for (int l = 2; l <= cap; ++l) tail += w[static_cast<std::size_t>(l - 1)];
  for (int l = 2; l <= cap; ++l) w[static_cast<std::size_t>(l - 1)] *= (1.0 - *head) / tail;
  w[0] = *head;
  RenewalLaw r = from_weights(std::move(w), alpha);
  r.norm_ = tail / (1.0 - *head);
  return r;
}

RenewalLaw RenewalLaw::dirac(int length) {
  if (length < 1) throw std::invalid_argument("renewal law: length must be >= 1");
  std::vector<double> w(static_cast<std::size_t>(length), 0.0);
  w.back() = 1.0;
  return from_weights(std::move(w), 1.0);
}

double RenewalLaw::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) m += static_cast<double>(i + 1) * weights_[i];
  return m;
}

std::vector<int> RenewalLaw::support() const {
  std::vector<int> s;
  for (std::size_t i = 0; i < weights_.size(); ++i)
    if (weights_[i] > 0.0) s.push_back(static_cast<int>(i + 1));
  return s;
}

RenewalSample sample_renewals(const RenewalLaw& rho, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_renewals: n must be >= 1");
  Rng g(seed);
  RenewalSample s;
  s.gaps.resize(n);
  s.times.resize(n + 1);
  s.times[0] = 0;
  for (std::size_t i = 0; i < n; ++i) {
    s.gaps[i] = rho.sample(g);
    s.times[i + 1] = s.times[i] + s.gaps[i];
  }
  return s;
}

WordSeq cut_words(const LetterSeq& x, const std::vector<std::int64_t>& times) {
  if (times.empty() || times[0] != 0) throw std::invalid_argument("cut_words: times must start at T_0 = 0");
  if (times.back() > static_cast<std::int64_t>(x.size())) throw std::out_of_range("cut_words: renewal time exceeds sequence length");
  WordSeq y;
  y.reserve(times.size() - 1);
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (times[i] <= times[i - 1]) throw std::invalid_argument("cut_words: times must be strictly increasing");
    y.emplace_back(std::vector<Letter>(x.letters.begin() + times[i - 1], x.letters.begin() + times[i]));
  }
  return y;
}

LetterSeq concat(const WordSeq& y) {
  LetterSeq x;
  for (const auto& w : y) x.letters.insert(x.letters.end(), w.letters.begin(), w.letters.end());
  return x;
}

double word_block_prob(const ReferenceWordProcess& ref, const WordSeq& y) {
  double lengths = 1.0;
  for (const auto& w : y) {
    if (w.size() == 0) throw std::invalid_argument("word_block_prob: empty word");
    lengths *= ref.renewal.prob(w.size());
  }
  if (lengths == 0.0) return 0.0;
  if (y.empty()) return 1.0;
  return ref.source.cylinder_prob(concat(y).letters) * lengths;
}

double conditional_word_prob(const ReferenceWordProcess& ref, const PastContext& past, const WordSeq& y) {
  double lengths = 1.0;
  for (const auto& w : y) {
    if (w.size() == 0) throw std::invalid_argument("conditional_word_prob: empty word");
    lengths *= ref.renewal.prob(w.size());
  }
  if (lengths == 0.0) return 0.0;
  if (y.empty()) return 1.0;
  return ref.source.cond_cylinder_prob(past, concat(y).letters) * lengths;
}

}  // namespace wordldp
