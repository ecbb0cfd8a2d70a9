#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"

using namespace wordldp;

namespace {

std::vector<std::vector<Letter>> all_blocks(int a, int len) {
  std::vector<std::vector<Letter>> out{{}};
  for (int i = 0; i < len; ++i) {
    std::vector<std::vector<Letter>> next;
    for (const auto& b : out)
      for (int x = 0; x < a; ++x) {
        auto c = b;
        c.push_back(static_cast<Letter>(x));
        next.push_back(c);
      }
    out = next;
  }
  return out;
}

}  // namespace

TEST_CASE("sampling is reproducible per seed") {
  auto s = fx::uniform2();
  auto a = s.sample(4, 17);
  auto b = s.sample(4, 17);
  CHECK(a.letters == b.letters);
  CHECK(a.size() == 4);
  for (auto x : a.letters) CHECK(x < 2);
}

TEST_CASE("markov letter frequency matches stationary vector") {
  auto s = fx::markov_example();
  const std::size_t n = 1'000'000;
  auto x = s.sample(n, 3);
  double zeros = 0;
  for (auto l : x.letters) zeros += l == 0;
  // Effective variance of the frequency is inflated by the chain's autocorrelation (eigenvalue 0.3).
  double sd = std::sqrt(4.0 / 7 * 3.0 / 7 * (1.3 / 0.7) / n);
  CHECK(std::abs(zeros / n - 4.0 / 7) < 3 * sd);
}

TEST_CASE("rwrs letters live on the product alphabet") {
  auto s = LetterSource::rwrs(0.5);
  CHECK(s.alphabet_size() == 4);
  auto x = s.sample(10, 1);
  CHECK(x.size() == 10);
  for (auto l : x.letters) CHECK(l < 4);
}

TEST_CASE("cond_prob") {
  auto m = fx::markov_example();
  CHECK(m.cond_prob(PastContext{{0, 1}}, 0) == doctest::Approx(0.4).epsilon(1e-15));
  auto iid = LetterSource::iid({0.2, 0.3, 0.5});
  double a = iid.cond_prob(PastContext{{0, 2}}, 2);
  double b = iid.cond_prob(PastContext{{1, 1, 1}}, 2);
  CHECK(a == b);
  CHECK(a == 0.5);
  CHECK_THROWS(m.cond_prob(PastContext{}, 0));
  CHECK_THROWS_AS(LetterSource::renewal_age({0.5, 0.5}).cond_prob(PastContext{{0, 1}}, 0), Unsupported);
}

TEST_CASE("gmeasure truncation error is certified") {
  Eigen::MatrixXd base(2, 2), signs(2, 2);
  base << 0.6, 0.4, 0.3, 0.7;
  signs << 1, -1, -1, 1;
  // amplitude/ratio chosen so the declared phi(n) is 4 * sum_{j>=n} a_j = 2^-n
  auto g = LetterSource::gmeasure(base, 0.0625, 0.5, signs);
  CHECK(g.declared_phi(3) == doctest::Approx(std::pow(2.0, -3)));
  auto x = g.sample(40, 9);
  PastContext deep{x.letters};
  PastContext shallow{std::vector<Letter>(x.letters.end() - 20, x.letters.end())};
  for (Letter a = 0; a < 2; ++a) {
    double rel = std::abs(g.cond_prob(shallow, a) / g.cond_prob(deep, a) - 1.0);
    CHECK(rel <= std::exp(std::pow(2.0, -19)) - 1.0);
  }
}

TEST_CASE("cylinder_prob") {
  CHECK(fx::uniform2().cylinder_prob({0, 1, 1}) == doctest::Approx(0.125));
  CHECK(fx::markov_example().cylinder_prob({0, 0}) == doctest::Approx(0.4).epsilon(1e-14));
  // oracle: enumeration in tests/oracle/oracles.py
  CHECK(fx::markov_example().cylinder_prob({0, 1, 1}) == doctest::Approx(0.10285714285714284).epsilon(1e-13));
  CHECK_THROWS_AS(LetterSource::rwrs().cylinder_prob({0}), Unsupported);
}

TEST_CASE("cylinder laws are normalized and shift consistent") {
  Eigen::MatrixXd t2(4, 2);
  t2 << 0.9, 0.1, 0.2, 0.8, 0.5, 0.5, 0.35, 0.65;
  std::vector<LetterSource> srcs{fx::uniform2(), LetterSource::iid({0.3, 0.7}), fx::markov_example(),
                                 LetterSource::markov(2, 2, t2)};
  for (const auto& s : srcs) {
    for (int len = 1; len <= 6; ++len) {
      double total = 0;
      for (const auto& b : all_blocks(2, len)) total += s.cylinder_prob(b);
      CHECK(std::abs(total - 1.0) < 1e-12);
    }
    for (int len = 1; len <= 5; ++len)
      for (const auto& b : all_blocks(2, len)) {
        double sum = 0;
        for (Letter a = 0; a < 2; ++a) {
          auto c = b;
          c.push_back(a);
          sum += s.cylinder_prob(c);
        }
        CHECK(std::abs(sum - s.cylinder_prob(b)) < 1e-15);
      }
  }
}

TEST_CASE("stationary vector solves the balance equation") {
  auto m = fx::markov_example();
  Eigen::VectorXd pi = m.context_stationary();
  CHECK((m.transition().transpose() * pi - pi).norm() < 1e-10);
  CHECK(pi(0) == doctest::Approx(4.0 / 7));
}

TEST_CASE("invalid parameters are rejected") {
  Eigen::MatrixXd bad(2, 2);
  bad << 0.7, 0.2, 0.4, 0.6;
  CHECK_THROWS(LetterSource::markov(2, 1, bad));
  CHECK_THROWS(LetterSource::iid({0.5, 0.6}));
}

TEST_CASE("iia divergence witness") {
  std::vector<double> cube(10'000);
  for (std::size_t l = 0; l < cube.size(); ++l) cube[l] = std::pow(static_cast<double>(l + 1), -3.0);
  double prev = iia_phi_lower_bound(cube, 1);
  CHECK(iia_phi_lower_bound(cube, 10) > prev);
  for (int n = 2; n < 200; ++n) {
    double b = iia_phi_lower_bound(cube, n);
    CHECK(b > prev);
    prev = b;
  }

  std::vector<double> geo(60);
  for (std::size_t l = 0; l < geo.size(); ++l) geo[l] = std::pow(0.5, static_cast<double>(l + 1));
  // p(n+1) / sum_{l>n} p(l) = 1/2 exactly, so the bound is log(1/2) - log(1/2) = 0
  CHECK(std::abs(iia_phi_lower_bound(geo, 20) - iia_phi_lower_bound(geo, 30)) < 1e-8);
  CHECK(std::abs(iia_phi_lower_bound(geo, 30)) < 1e-8);

  std::vector<double> short_p{0.5, 0.5};
  CHECK_THROWS(iia_phi_lower_bound(short_p, 2));
}
