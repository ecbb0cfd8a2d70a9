#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "wordldp/entropy.hpp"

using namespace wordldp;

namespace {

ReferenceWordProcess markov_ref() {
  return {fx::markov_example(), RenewalLaw::from_weights({0.5, 0.3, 0.2}, 1.0)};
}

WordLaw mixed_q() { return WordLaw::iid({Word{0}, Word{1, 1}, Word{0, 1}}, {0.5, 0.3, 0.2}); }

}  // namespace

TEST_CASE("block relative entropy") {
  ReferenceWordProcess ref{fx::uniform2(), RenewalLaw::dirac(1)};
  auto q = WordLaw::iid({Word{0}, Word{1}}, {0.75, 0.25});
  CHECK(block_rel_entropy(q, ref, 1) == doctest::Approx(0.75 * std::log(1.5) + 0.25 * std::log(0.5)).epsilon(1e-14));
  CHECK(block_rel_entropy(q, ref, 1) == doctest::Approx(0.130812).epsilon(1e-6));

  auto p1 = WordLaw::iid({Word{0}, Word{1}}, {0.5, 0.5});
  CHECK(block_rel_entropy(p1, ref, 1) == 0.0);

  ReferenceWordProcess short_ref{fx::uniform2(), RenewalLaw::from_weights({0.5, 0.5}, 1.0)};
  CHECK(std::isinf(block_rel_entropy(WordLaw::iid({Word{0, 0, 0}}, {1.0}), short_ref, 1)));
}

TEST_CASE("block entropies match enumeration") {
  // oracle: tests/oracle/oracles.py
  const double want[] = {0.9588696360443086, 1.9745766131659601, 2.9902835902876097, 4.005990567409264};
  auto h = block_rel_entropies(mixed_q(), markov_ref(), 4);
  REQUIRE(h.size() == 4);
  for (int n = 0; n < 4; ++n) CHECK(h[n] == doctest::Approx(want[n]).epsilon(1e-12));
  CHECK_THROWS_AS(block_rel_entropies(mixed_q(), markov_ref(), 4, 20), BudgetExceeded);
}

TEST_CASE("specific relative entropy bracket") {
  ReferenceWordProcess iid_ref{LetterSource::iid({0.4, 0.6}), RenewalLaw::from_weights({0.6, 0.4}, 1.0)};
  auto q = WordLaw::iid({Word{0}, Word{1, 0}}, {0.3, 0.7});
  auto b = specific_rel_entropy(q, iid_ref, variation_profile(iid_ref.source), 4);
  for (double v : b.lower_seq) CHECK(v == doctest::Approx(b.lower_seq[0]).epsilon(1e-12));
  CHECK(b.cauchy_gap < 1e-12);

  auto ref = markov_ref();
  auto bm = specific_rel_entropy(mixed_q(), ref, variation_profile(ref.source), 4);
  for (std::size_t i = 1; i < bm.lower_seq.size(); ++i) CHECK(bm.lower_seq[i] >= bm.lower_seq[i - 1] - 1e-12);
  CHECK(bm.value >= bm.lower_seq.back());

  auto p = WordLaw::reference(ref);
  auto bp = specific_rel_entropy(p, ref, variation_profile(ref.source), 3);
  for (std::size_t n = 1; n <= bp.lower_seq.size(); ++n)
    CHECK(bp.lower_seq[n - 1] == doctest::Approx(-std::log(2.0) / n).epsilon(1e-9));
  CHECK(std::abs(bp.value) < 1e-9);
}

TEST_CASE("superadditive lower bounds") {
  auto ref = markov_ref();
  auto h = block_rel_entropies(mixed_q(), ref, 6, 100'000'000);
  const double logc = std::log(2.0);
  for (int n = 1; n <= 6; ++n)
    for (int m = 1; n + m <= 6; ++m) CHECK(h[n + m - 1] - logc >= (h[n - 1] - logc) + (h[m - 1] - logc) - 1e-10);
}

TEST_CASE("entropy decomposition") {
  ReferenceWordProcess unif{fx::uniform2(), RenewalLaw::dirac(1)};
  auto mu = WordLaw::iid({Word{0}, Word{1}}, {0.8, 0.2});
  auto d = entropy_decomposition(mu, unif.source, unif.renewal);
  double kl = 0.8 * std::log(1.6) + 0.2 * std::log(0.4);
  CHECK(std::abs(d.h_q_given_p - kl) < 1e-10);

  auto ref = markov_ref();
  auto dp = entropy_decomposition(WordLaw::reference(ref), ref.source, ref.renewal);
  CHECK(std::abs(dp.h_q_given_p) <= 1e-3);
  CHECK(std::abs(dp.psi_lower) <= 1e-9);

  auto dm = entropy_decomposition(mixed_q(), ref.source, ref.renewal);
  auto b = specific_rel_entropy(mixed_q(), ref, variation_profile(ref.source), 4);
  CHECK(std::abs(dm.h_q_given_p - b.value) <= b.cauchy_gap + 1e-6);
  CHECK(dm.psi_lower <= dm.psi_upper + 1e-12);
}

TEST_CASE("psi relative entropy") {
  ReferenceWordProcess ref = markov_ref();
  auto bp = psi_rel_entropy(WordLaw::reference(ref), ref.source, variation_profile(ref.source), 4);
  CHECK(std::abs(bp.value) < 1e-9);

  auto iid = LetterSource::iid({0.5, 0.5});
  auto mu = WordLaw::iid({Word{0}, Word{1}}, {0.9, 0.1});
  auto b1 = psi_rel_entropy(mu, iid, variation_profile(iid), 3);
  CHECK(b1.value == doctest::Approx(0.9 * std::log(1.8) + 0.1 * std::log(0.2)).epsilon(1e-12));
  CHECK(b1.cauchy_gap < 1e-12);

  auto d = WordLaw::iid({Word{0, 1}}, {1.0});
  auto bd = psi_rel_entropy(d, iid, variation_profile(iid), 6);
  // Psi puts mass 1/2 on each of the two alternating k-blocks, so h_k = (k - 1) log 2
  for (int k = 1; k <= 6; ++k) CHECK(bd.h[k - 1] == doctest::Approx((k - 1) * std::log(2.0)).epsilon(1e-12));
  for (std::size_t i = 1; i < bd.lower_seq.size(); ++i) CHECK(bd.lower_seq[i] > bd.lower_seq[i - 1]);
  CHECK(bd.value == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("asymptotic entropy identity") {
  ReferenceWordProcess unif{fx::uniform2(), RenewalLaw::dirac(1)};
  auto d = WordLaw::iid({Word{0, 1}}, {1.0});
  auto c = asympt_entropy_check(d, unif.source, unif.renewal, 100, 10, 1);
  CHECK(c.target == doctest::Approx(-2 * std::log(2.0)));
  CHECK(c.mc_mean == doctest::Approx(-2 * std::log(2.0)));

  auto ref = markov_ref();
  auto cm = asympt_entropy_check(mixed_q(), ref.source, ref.renewal, 10'000, 200, 3);
  CHECK(std::abs(cm.mc_mean - cm.target) <= 3 * cm.mc_sd / std::sqrt(200.0) + 1e-12);

  ReferenceWordProcess letters{fx::markov_example(), RenewalLaw::dirac(1)};
  auto cp = asympt_entropy_check(WordLaw::reference(letters), letters.source, letters.renewal, 10'000, 100, 4);
  double rate = -(4.0 / 7 * (xlogx(0.7) + xlogx(0.3)) + 3.0 / 7 * (xlogx(0.4) + xlogx(0.6)));
  CHECK(cp.target == doctest::Approx(-rate).epsilon(1e-10));
  CHECK(cp.agrees);
}
