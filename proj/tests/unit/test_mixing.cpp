#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "wordldp/mixing.hpp"

using namespace wordldp;

TEST_CASE("phi values") {
  auto iid = LetterSource::iid({0.3, 0.7});
  for (int k = 0; k <= 3; ++k)
    for (int ell = 1; ell <= 3; ++ell) CHECK(phi_exact(iid, k, ell).value == 0.0);

  auto m = fx::markov_example();
  CHECK(phi_exact(m, 0, 1).value == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(phi_exact(m, 1, 1).value == 0.0);
  CHECK(phi_exact(m, 0, 2).value == doctest::Approx(phi_exact(m, 0, 1).value).epsilon(1e-14));
  for (int ell = 1; ell <= 4; ++ell)
    CHECK(std::abs(phi_exact(m, 0, ell).value - phi_event_bruteforce(m, 0, ell)) < 1e-12);
}

TEST_CASE("phi is monotone in both arguments") {
  Eigen::MatrixXd t2(4, 2);
  t2 << 0.9, 0.1, 0.2, 0.8, 0.5, 0.5, 0.35, 0.65;
  for (const auto& s : {fx::markov_example(), LetterSource::markov(2, 2, t2)}) {
    for (int k = 0; k <= 4; ++k)
      for (int ell = 1; ell <= 4; ++ell) {
        double v = phi_exact(s, k, ell).value;
        if (k < 4) CHECK(phi_exact(s, k + 1, ell).value <= v + 1e-12);
        if (ell < 4) CHECK(phi_exact(s, k, ell + 1).value >= v - 1e-12);
      }
  }
}

TEST_CASE("c_phi and psi bound") {
  auto iid = variation_profile(LetterSource::iid({0.5, 0.5}));
  CHECK(c_phi(iid) == 1.0);
  CHECK(psi_upper_bound(iid) == 0.0);
  auto mk = variation_profile(fx::markov_example());
  CHECK(std::abs(c_phi(mk) - 2.0) < 1e-12);
  CHECK(psi_upper_bound(mk) == doctest::Approx(std::log(2.0)));
  auto age = variation_profile(LetterSource::renewal_age({0.5, 0.25, 0.25}));
  CHECK(std::isinf(c_phi(age)));
  CHECK_FALSE(age.finite());
  CHECK_THROWS(psi_upper_bound(age));
}

TEST_CASE("telescoping") {
  auto m = fx::markov_example();
  auto prof = variation_profile(m);
  auto r = telescoping_check(m, prof, 0, 2);
  CHECK(r.ok);
  CHECK(std::abs(r.slack) < 1e-12);
  auto iid = LetterSource::iid({0.2, 0.8});
  auto r0 = telescoping_check(iid, variation_profile(iid), 1, 3);
  CHECK(r0.slack == 0.0);

  Eigen::MatrixXd base(2, 2), signs(2, 2);
  base << 0.6, 0.4, 0.3, 0.7;
  signs << 1, -1, -1, 1;
  auto g = LetterSource::gmeasure(base, 0.0625, 0.5, signs);
  auto gp = variation_profile(g);
  for (int k = 0; k <= 3; ++k)
    for (int ell = 1; ell <= 3; ++ell) {
      auto t = telescoping_check(g, gp, k, ell);
      CHECK(t.ok);
      CHECK(t.slack >= -1e-12);
    }
  // sampled pasts only see part of the supremum, so they stay under the declared value
  CHECK(phi_sampled_lower(g, 2, 1, 200, 20, 3) <= gp.phi(2) + 1e-12);
}

TEST_CASE("sandwich holds for depth-one pasts") {
  auto m = fx::markov_example();
  auto prof = variation_profile(m);
  double worst = 0;
  for (int len = 1; len <= 3; ++len)
    for (int code = 0; code < (1 << len); ++code) {
      Block b;
      for (int i = 0; i < len; ++i) b.push_back(static_cast<Letter>((code >> i) & 1));
      for (Letter x = 0; x < 2; ++x)
        for (Letter xh = 0; xh < 2; ++xh) {
          auto r = sandwich_check(m, {b}, PastContext{{x}}, PastContext{{xh}}, 1, prof);
          CHECK(r.ok);
          worst = std::max(worst, r.log_ratio_pasts);
        }
    }
  CHECK(worst <= std::log(c_phi(prof)) + 1e-12);

  auto iid = LetterSource::iid({0.3, 0.7});
  auto r = sandwich_check(iid, {Block{0, 1}}, PastContext{{0}}, PastContext{{1}}, 1, variation_profile(iid));
  CHECK(r.log_ratio_pasts == 0.0);
}

TEST_CASE("decoupling") {
  auto m = fx::markov_example();
  auto prof = variation_profile(m);
  for (int s1 = 0; s1 < 6; ++s1)
    for (int s2 = s1 + 1; s2 < 6; ++s2)
      for (Letter a = 0; a < 2; ++a)
        for (Letter b = 0; b < 2; ++b) {
          auto r = decoupling_check(m, {CylinderEvent{s1, {Block{a}}}, CylinderEvent{s2, {Block{b}}}}, prof);
          CHECK(r.ok);
          CHECK(r.ratio <= 2.0 + 1e-12);
        }
  auto r3 = decoupling_check(
      m, {CylinderEvent{0, {Block{0, 1}}}, CylinderEvent{2, {Block{1}}}, CylinderEvent{4, {Block{0, 0}, Block{1, 0}}}},
      prof);
  CHECK(r3.ok);
  CHECK(r3.bound == doctest::Approx(4.0));

  auto iid = LetterSource::iid({0.3, 0.7});
  auto ri = decoupling_check(iid, {CylinderEvent{0, {Block{1}}}, CylinderEvent{3, {Block{0, 1}}}}, variation_profile(iid));
  CHECK(ri.ratio == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("pattern occurrences") {
  Pattern one{{Block{1}}};
  LetterSeq ones{std::vector<Letter>(50, 1), 0};
  auto s = pattern_occurrences(ones, one, 10);
  for (auto g : s.gaps) CHECK(g == 1);

  LetterSeq alt;
  for (int i = 0; i < 50; ++i) alt.letters.push_back(static_cast<Letter>(i % 2));
  auto s2 = pattern_occurrences(alt, one, 10);
  for (auto g : s2.gaps) CHECK(g == 2);
  for (std::size_t i = 1; i < s2.sigma.size(); ++i) CHECK(s2.sigma[i] > s2.sigma[i - 1]);
  // E[gap] = 2 and C = 1 under the alternating chain: the boundary case lhs = rhs
  auto r = recurrence_stat(s2, 2.0, variation_profile(LetterSource::iid({0.5, 0.5})));
  CHECK(r.lhs == doctest::Approx(std::log(2.0)));
  CHECK(r.rhs == doctest::Approx(std::log(2.0)));
  CHECK(r.ok);

  CHECK_THROWS_AS(pattern_occurrences(alt, one, 100), InsufficientOccurrences);
}

TEST_CASE("iid gaps are geometric") {
  auto x = fx::uniform2().sample(400'000, 12);
  auto s = pattern_occurrences(x, Pattern{{Block{1}}}, 100'000);
  std::vector<double> obs(9, 0.0);
  for (auto g : s.gaps) obs[std::min<std::int64_t>(g, 8)] += 1;
  double chi2 = 0;
  const double n = static_cast<double>(s.gaps.size());
  for (int g = 1; g <= 8; ++g) {
    double p = g < 8 ? std::pow(0.5, g) : std::pow(0.5, 7);
    chi2 += (obs[g] - n * p) * (obs[g] - n * p) / (n * p);
  }
  CHECK(chi2 < 24.3);  // 0.999 quantile, 7 degrees of freedom
}

TEST_CASE("recurrence inequality") {
  auto u = fx::uniform2();
  auto x = u.sample(400'000, 31);
  auto s = pattern_occurrences(x, Pattern{{Block{1}}}, 100'000);
  auto r = recurrence_stat(s, u, variation_profile(u));
  CHECK(r.ok);
  CHECK(r.rhs == doctest::Approx(std::log(2.0)));
  // oracle series sum_g 2^-g log g
  CHECK(std::abs(r.lhs - 0.5078339228684386) < r.slack);

  auto m = fx::markov_example();
  Pattern zz{{Block{0, 0}}};
  // first-passage solve by hand: after a 00 match the chain sits in 0, e(A) = 2.5, e(S_1) = 5
  CHECK(expected_gap(m, zz) == doctest::Approx(4.25).epsilon(1e-12));
  CHECK(std::abs(expected_gap_mc(m, zz, 200'000, 8) - 4.25) < 0.05);
  auto xm = m.sample(600'000, 32);
  auto sm = pattern_occurrences(xm, zz, 100'000);
  CHECK(recurrence_stat(sm, m, variation_profile(m)).ok);
}
