#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "wordldp/mc_harness.hpp"

using namespace wordldp;

namespace {

LdpExperiment small_experiment(const WordLaw& target, double eps) {
  ReferenceWordProcess ref{fx::uniform2(), RenewalLaw::from_weights({0.5, 0.5}, 1.0)};
  return LdpExperiment{.ref = ref,
                       .target = target,
                       .k = 1,
                       .eps = eps,
                       .n_grid = {8, 16},
                       .samples = 20'000,
                       .seed = 3,
                       .mode = ExperimentMode::Annealed,
                       .x_seed = 4,
                       .replicas = 2,
                       .workers = 1};
}

}  // namespace

TEST_CASE("typical targets cost nothing") {
  ReferenceWordProcess ref{fx::uniform2(), RenewalLaw::from_weights({0.5, 0.5}, 1.0)};
  auto exp = small_experiment(WordLaw::reference(ref), 0.1);
  exp.n_grid = {50, 200};
  auto est = run_annealed(exp);
  REQUIRE(est.points.size() == 2);
  CHECK(est.points[1].reported);
  CHECK(est.points[1].rate < est.points[0].rate + 1e-12);
  CHECK(est.points[1].rate < 0.01);

  auto whole = small_experiment(WordLaw::iid({Word{0, 1}}, {1.0}), 1.0);
  for (const auto& p : run_annealed(whole).points) {
    CHECK(p.hits == p.samples);
    CHECK(p.rate == 0.0);
  }
}

TEST_CASE("decay points carry consistent intervals") {
  auto exp = small_experiment(WordLaw::iid({Word{0}, Word{1}, Word{0, 0}}, {0.4, 0.4, 0.2}), 0.1);
  for (const auto& p : run_annealed(exp).points) {
    if (!p.reported) continue;
    CHECK(p.ci_lo <= p.rate);
    CHECK(p.rate <= p.ci_hi);
    CHECK(p.rate_lower_bound == p.ci_lo);
  }
}

TEST_CASE("results do not depend on the worker count") {
  auto exp = small_experiment(WordLaw::iid({Word{0}, Word{1}, Word{1, 1}}, {0.45, 0.45, 0.1}), 0.1);
  auto a = run_annealed(exp);
  exp.workers = 3;
  auto b = run_annealed(exp);
  for (std::size_t i = 0; i < a.points.size(); ++i) CHECK(a.points[i].hits == b.points[i].hits);

  exp.mode = ExperimentMode::Quenched;
  exp.workers = 1;
  auto qa = run_quenched(exp);
  exp.workers = 2;
  auto qb = run_quenched(exp);
  REQUIRE(qa.replicas.size() == 2);
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t i = 0; i < qa.replicas[r].points.size(); ++i)
      CHECK(qa.replicas[r].points[i].hits == qb.replicas[r].points[i].hits);
}

TEST_CASE("quenched typical target") {
  ReferenceWordProcess ref{fx::uniform2(), RenewalLaw::from_weights({0.5, 0.5}, 1.0)};
  auto exp = small_experiment(WordLaw::reference(ref), 0.1);
  exp.mode = ExperimentMode::Quenched;
  exp.n_grid = {200};
  for (const auto& rep : run_quenched(exp).replicas) {
    CHECK(rep.points[0].reported);
    CHECK(rep.points[0].rate < 0.02);
  }
}

TEST_CASE("scgf") {
  ReferenceWordProcess ref{fx::markov_example(), RenewalLaw::from_weights({0.5, 0.3, 0.2}, 1.0)};
  CHECK(scgf_annealed(ref, [](const Word&) { return 0.0; }, 50) == 0.0);
  CHECK(scgf_annealed(ref, [](const Word&) { return 0.7; }, 50) == doctest::Approx(0.7).epsilon(1e-12));

  ReferenceWordProcess half{fx::uniform2(), RenewalLaw::from_weights({0.5, 0.5}, 1.0)};
  auto ind = [](const Word& w) { return w.size() == 1 ? 1.0 : 0.0; };
  // oracle: log((e + 1) / 2)
  CHECK(scgf_annealed(half, ind, 200) == doctest::Approx(0.6201145069582775).epsilon(1e-12));
  auto dual = legendre_dual(half, ind, variation_profile(half.source), 200);
  CHECK(std::abs(dual.gap) < 1e-3);
}

TEST_CASE("legendre gap") {
  ReferenceWordProcess ref{fx::markov_example(), RenewalLaw::from_weights({0.5, 0.3, 0.2}, 1.0)};
  auto prof = variation_profile(ref.source);
  CHECK(legendre_gap(ref, [](const Word&) { return 0.0; }, prof, 1000) == 0.0);
  auto battery = cylinder_battery(4, 2, 3, 7);
  REQUIRE(battery.size() == 5);
  CHECK(battery[0].name == "zero");
  for (std::size_t i = 1; i < battery.size(); ++i) {
    auto d = legendre_dual(ref, battery[i].f, prof, 1000);
    CHECK(d.gap >= -1e-3);
    CHECK(d.gap <= 0.05);
    CHECK(d.gap <= d.gap_iid + 1e-12);
  }
}

TEST_CASE("ball infimum grid") {
  ReferenceWordProcess ref{fx::uniform2(), RenewalLaw::from_weights({0.5, 0.5}, 1.0)};
  auto prof = variation_profile(ref.source);
  auto family = [](double s) {
    return WordLaw::iid({Word{0}, Word{1}, Word{0, 0}, Word{0, 1}, Word{1, 0}, Word{1, 1}},
                        {s / 2, s / 2, (1 - s) / 4, (1 - s) / 4, (1 - s) / 4, (1 - s) / 4});
  };
  std::vector<double> grid;
  for (int i = 0; i <= 100; ++i) grid.push_back(i / 100.0);
  auto b = ball_infimum_grid(ref, prof, family, grid, family(0.8), 1, 0.15, 2);
  CHECK(b.members_in_ball > 0);
  CHECK(b.value <= ann_rate(family(0.8), ref, prof, 2) + 1e-12);
  CHECK(b.value >= 0.0);
  // s = 1/2 is P itself, outside the ball, so the infimum stays positive
  CHECK(b.value > 0.0);
}
