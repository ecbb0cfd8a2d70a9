#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "wordldp/empirical.hpp"
#include "wordldp/wordlaw.hpp"

using namespace wordldp;

namespace {

WordLaw random_law(std::uint64_t seed) {
  Rng g(seed);
  std::vector<Word> words;
  const int count = 2 + static_cast<int>(g() % 3);
  while (static_cast<int>(words.size()) < count) {
    Word w;
    const int len = 1 + static_cast<int>(g() % 3);
    for (int i = 0; i < len; ++i) w.letters.push_back(static_cast<Letter>(g() % 2));
    if (std::find(words.begin(), words.end(), w) == words.end()) words.push_back(w);
  }
  Eigen::MatrixXd t(count, count);
  for (int i = 0; i < count; ++i) {
    for (int j = 0; j < count; ++j) t(i, j) = 0.1 + uniform01(g);
    t.row(i) /= t.row(i).sum();
  }
  if (seed % 2) {
    std::vector<double> p(count);
    for (int j = 0; j < count; ++j) p[j] = t(0, j);
    return WordLaw::iid(words, p);
  }
  return WordLaw::markov(words, t);
}

}  // namespace

TEST_CASE("mean word length") {
  CHECK(mean_word_length(WordLaw::iid({Word{0}, Word{1}}, {0.5, 0.5})) == 1.0);
  CHECK(mean_word_length(WordLaw::iid({Word{0, 1}}, {1.0})) == 2.0);
  CHECK(mean_word_length(WordLaw::iid({Word{0}, Word{0, 1}}, {0.25, 0.75})) == doctest::Approx(1.75));
}

TEST_CASE("truncation pushes mass forward") {
  auto d = WordLaw::iid({Word{0, 1}}, {1.0});
  auto t1 = truncate(d, {1});
  REQUIRE(t1.support().size() == 1);
  CHECK(t1.support()[0] == Word{0});

  auto q = WordLaw::iid({Word{0, 1}, Word{0, 0, 1}, Word{1}}, {0.2, 0.3, 0.5});
  auto same = truncate(q, {3});
  CHECK(same.support() == q.support());
  CHECK(same.one_word_marginal() == q.one_word_marginal());
  auto t2 = truncate(q, {1});
  auto marg = t2.one_word_marginal();
  CHECK(marg[t2.word_index(Word{0})] == doctest::Approx(0.5));
  CHECK(mean_word_length(truncate(q, {1})) <= mean_word_length(truncate(q, {2})));
}

TEST_CASE("psi blocks") {
  auto mu = WordLaw::iid({Word{0}, Word{1}}, {0.3, 0.7});
  auto b2 = psi_q_block(mu, 2);
  CHECK(b2.mass({0, 1}) == doctest::Approx(0.21));
  CHECK(b2.mass({1, 1}) == doctest::Approx(0.49));

  auto d = WordLaw::iid({Word{0, 1}}, {1.0});
  auto d1 = psi_q_block(d, 1);
  CHECK(d1.mass({0}) == doctest::Approx(0.5));
  auto d2 = psi_q_block(d, 2);
  CHECK(d2.mass({0, 1}) == doctest::Approx(0.5));
  CHECK(d2.mass({1, 0}) == doctest::Approx(0.5));
  CHECK(d2.mass({0, 0}) == 0.0);
  CHECK(d2.mass({1, 1}) == 0.0);

  // oracle: tests/oracle/oracles.py
  auto q = WordLaw::iid({Word{0}, Word{1, 1}}, {0.5, 0.5});
  auto q3 = psi_q_block(q, 3);
  CHECK(q3.mass({0, 0, 0}) == doctest::Approx(1.0 / 12).epsilon(1e-13));
  CHECK(q3.mass({0, 1, 1}) == doctest::Approx(1.0 / 6).epsilon(1e-13));
  CHECK(q3.mass({1, 1, 1}) == doctest::Approx(1.0 / 3).epsilon(1e-13));
  CHECK(q3.mass({0, 1, 0}) == 0.0);
  CHECK(tv_distance(q3, hmm_block(psi_hmm(q), 3)) < 1e-12);
}

TEST_CASE("psi of the reference process is the letter law") {
  ReferenceWordProcess ref{fx::markov_example(), RenewalLaw::from_weights({0.5, 0.3, 0.2}, 2.0)};
  auto p = WordLaw::reference(ref);
  for (int k = 1; k <= 4; ++k) {
    auto b = psi_q_block(p, k);
    for (const auto& [blk, m] : b.masses) CHECK(std::abs(m - ref.source.cylinder_prob(blk)) < 1e-9);
  }
}

TEST_CASE("shift invariance") {
  CHECK(shift_invariance_check(WordLaw::iid({Word{0}, Word{1}}, {0.3, 0.7}), 4));
  CHECK(shift_invariance_check(WordLaw::iid({Word{0, 1}}, {1.0}), 4));
  for (std::uint64_t s = 1; s <= 12; ++s) CHECK(shift_invariance_check(random_law(s), 4));
}

TEST_CASE("model marginals are shift invariant") {
  for (std::uint64_t s = 1; s <= 12; ++s) {
    auto q = random_law(s);
    auto b = model_block(q, 3);
    CHECK(tv_distance(b.drop_first(), b.drop_last()) < 1e-12);
  }
}

TEST_CASE("specific entropy") {
  CHECK(specific_entropy(WordLaw::iid({Word{0, 1}}, {1.0})) == 0.0);
  CHECK(specific_entropy(WordLaw::iid({Word{0}, Word{1}, Word{0, 0}, Word{1, 1}}, {0.25, 0.25, 0.25, 0.25})) ==
        doctest::Approx(std::log(4.0)));
  Eigen::MatrixXd t(2, 2);
  t << 0.7, 0.3, 0.4, 0.6;
  auto mk = WordLaw::markov({Word{0}, Word{1, 0}}, t);
  CHECK(specific_entropy(mk) == doctest::Approx(0.6374988870353347).epsilon(1e-13));

  ReferenceWordProcess ref{fx::markov_example(), RenewalLaw::from_weights({0.5, 0.3, 0.2}, 1.0)};
  CHECK(specific_entropy(WordLaw::reference(ref)) == doctest::Approx(2.1134011220246425).epsilon(1e-12));
}

TEST_CASE("sampling follows the law") {
  auto q = WordLaw::iid({Word{0}, Word{1, 1}}, {0.25, 0.75});
  auto y = q.sample(100'000, 3);
  double ones = 0;
  for (const auto& w : y) ones += w.size() == 2;
  CHECK(std::abs(ones / 100'000 - 0.75) < 3 * std::sqrt(0.1875 / 100'000));
  CHECK(q.sample(50, 8) == q.sample(50, 8));
}
