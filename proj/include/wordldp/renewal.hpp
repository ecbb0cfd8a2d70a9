#pragma once

#include <optional>
#include <vector>

#include "wordldp/common.hpp"
#include "wordldp/sources.hpp"

namespace wordldp {

struct Word {
  std::vector<Letter> letters;

  Word() = default;
  Word(std::initializer_list<Letter> l) : letters(l) {}
  explicit Word(std::vector<Letter> l) : letters(std::move(l)) {}

  std::size_t size() const { return letters.size(); }
  auto operator<=>(const Word&) const = default;
  bool operator==(const Word&) const = default;
};

using WordSeq = std::vector<Word>;

// Word-length law on 1..cap. `alpha` is a declared tail exponent; it is not
// inferred from the weights.
class RenewalLaw {
 public:
  static RenewalLaw from_weights(std::vector<double> weights, double alpha);
  // rho(l) proportional to l^-alpha on 1..cap. With `head`, rho(1) = head and
  // the remaining mass is spread proportional to l^-alpha on 2..cap.
  static RenewalLaw power(int cap, double alpha, std::optional<double> head = std::nullopt);
  static RenewalLaw dirac(int length);

  double prob(std::size_t length) const {
    return length >= 1 && length <= weights_.size() ? weights_[length - 1] : 0.0;
  }
  int cap() const { return static_cast<int>(weights_.size()); }
  double alpha() const { return alpha_; }
  double normalization() const { return norm_; }
  double mean() const;
  const std::vector<double>& weights() const { return weights_; }
  std::vector<int> support() const;

  int sample(Rng& g) const { return static_cast<int>(alias_.sample(g)) + 1; }

 private:
  std::vector<double> weights_;
  double alpha_ = 1.0;
  double norm_ = 1.0;
  AliasTable alias_;
};

struct RenewalSample {
  std::vector<int> gaps;
  std::vector<std::int64_t> times;  // T_0 = 0, ..., T_n
};

RenewalSample sample_renewals(const RenewalLaw& rho, std::size_t n, std::uint64_t seed);

WordSeq cut_words(const LetterSeq& x, const std::vector<std::int64_t>& times);
LetterSeq concat(const WordSeq& y);

struct ReferenceWordProcess {
  LetterSource source;
  RenewalLaw renewal;
};

// P(Y_1..Y_r = y) = nu(kappa(y)) prod rho(|y_i|).
double word_block_prob(const ReferenceWordProcess& ref, const WordSeq& y);
// Same, conditioned on the letters of the concatenated past.
double conditional_word_prob(const ReferenceWordProcess& ref, const PastContext& past, const WordSeq& y);

}  // namespace wordldp
