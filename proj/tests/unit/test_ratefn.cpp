#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "wordldp/ratefn.hpp"

using namespace wordldp;

TEST_CASE("annealed rate") {
  ReferenceWordProcess ref{fx::markov_example(), RenewalLaw::from_weights({0.5, 0.3, 0.2}, 2.0)};
  auto prof = variation_profile(ref.source);
  CHECK(std::abs(ann_rate(WordLaw::reference(ref), ref, prof, 3)) < 1e-9);

  ReferenceWordProcess unif{fx::uniform2(), RenewalLaw::dirac(1)};
  auto q = WordLaw::iid({Word{0}, Word{1}}, {0.75, 0.25});
  CHECK(ann_rate(q, unif, variation_profile(unif.source), 3) == doctest::Approx(0.130812).epsilon(1e-6));
  CHECK(std::isinf(ann_rate(WordLaw::iid({Word{0, 1}}, {1.0}), unif, variation_profile(unif.source), 2)));
}

TEST_CASE("quenched rate") {
  ReferenceWordProcess ref{fx::markov_example(), RenewalLaw::from_weights({0.5, 0.3, 0.2}, 2.0)};
  auto prof = variation_profile(ref.source);
  auto q = WordLaw::iid({Word{0}, Word{1, 1}, Word{0, 1}}, {0.5, 0.3, 0.2});
  auto r1 = que_rate(q, ref, prof, 1.0, 3, 4);
  CHECK(r1.i_que == r1.i_ann);
  auto r3 = que_rate(q, ref, prof, 3.0, 3, 4);
  CHECK(r3.i_que >= r3.i_ann);
  CHECK(r3.i_que == doctest::Approx(r3.i_ann + 2.0 * r3.m_q * r3.psi_term).epsilon(1e-14));

  auto p = que_rate(WordLaw::reference(ref), ref, prof, 2.5, 3, 4);
  CHECK(std::abs(p.i_ann) < 1e-9);
  CHECK(std::abs(p.i_que) < 1e-9);

  ReferenceWordProcess unif{fx::uniform2(), RenewalLaw::power(20, 2.0)};
  auto d = WordLaw::iid({Word{0, 1}}, {1.0});
  auto rd = que_rate(d, unif, variation_profile(unif.source), 2.0, 3, 6);
  CHECK(rd.m_q == 2.0);
  CHECK(rd.i_ann == doctest::Approx(-std::log(unif.renewal.prob(2)) + 2 * std::log(2.0)).epsilon(1e-12));
  CHECK(rd.psi_term == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(rd.i_que == doctest::Approx(rd.i_ann + 2 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("truncation table") {
  ReferenceWordProcess ref{fx::markov_example(), RenewalLaw::from_weights({0.4, 0.3, 0.2, 0.1}, 2.0)};
  auto prof = variation_profile(ref.source);
  auto q = WordLaw::iid({Word{0}, Word{1, 1, 0}, Word{0, 1, 1, 1}}, {0.5, 0.3, 0.2});
  auto rows = truncation_convergence(q, ref, prof, 2.0, {1, 2, 3, 4, 6}, 3, 4);
  REQUIRE(rows.size() == 5);
  auto full = que_rate(q, ref, prof, 2.0, 3, 4);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].m_tr >= rows[i - 1].m_tr);
  for (std::size_t i = 3; i < rows.size(); ++i) {
    CHECK(rows[i].h_ann == full.i_ann);
    CHECK(rows[i].psi_weighted == full.m_q * full.psi_term);
    CHECK(rows[i].m_tr == full.m_q);
  }
}

TEST_CASE("partitions") {
  auto p2 = Partition::dyadic(2), p4 = Partition::dyadic(4);
  CHECK(p2.cell(0.3) == 0);
  CHECK(p4.cell(0.3) == 1);
  CHECK(p4.refines(p2));
  CHECK_FALSE(p2.refines(p4));
  CHECK_THROWS(p2.cell(1.0));
  auto x = CosineKernel{0.5}.sample(1000, 3);
  auto c2 = coarsen(x, p2), c4 = coarsen(x, p4);
  auto map = cell_map(p4, p2);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(c2.letters[i] == map[c4.letters[i]]);
}

TEST_CASE("cosine kernel coarse graining") {
  CosineKernel k{0.5};
  auto src = k.coarse_source(Partition::dyadic(4));
  double total = 0;
  for (Letter a = 0; a < 4; ++a) {
    CHECK(src.cylinder_prob({a}) == doctest::Approx(0.25).epsilon(1e-12));
    for (Letter b = 0; b < 4; ++b) total += src.cylinder_prob({a, b});
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  // P(cell 0 then cell 0) by midpoint quadrature of the density
  const int grid = 400;
  double quad = 0;
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j) {
      double x = 0.25 * (i + 0.5) / grid, y = 0.25 * (j + 0.5) / grid;
      quad += k.density(y, x);
    }
  quad *= (0.25 / grid) * (0.25 / grid);
  CHECK(src.cylinder_prob({0, 0}) == doctest::Approx(quad).epsilon(1e-5));
  CHECK(k.profile().phis[0] == doctest::Approx(std::log(3.0)));
}

TEST_CASE("coarse rates") {
  auto rho = RenewalLaw::from_weights({0.5, 0.5}, 2.0);
  std::vector<Partition> parts{Partition::dyadic(2)};
  auto q = WordLaw::iid({Word{0}, Word{1, 1}}, {0.6, 0.4});
  auto flat = coarse_rate_sequence(CosineKernel{0.0}, rho, q, parts, 2.0, 3, 4);
  ReferenceWordProcess ref{LetterSource::iid({0.5, 0.5}), rho};
  auto direct = que_rate(q, ref, variation_profile(ref.source), 2.0, 3, 4);
  CHECK(flat[0].i_que == doctest::Approx(direct.i_que).epsilon(1e-12));

  std::vector<Partition> nested{Partition::dyadic(2), Partition::dyadic(4), Partition::dyadic(8)};
  auto q8 = WordLaw::iid({Word{0}, Word{3}, Word{6}}, {0.5, 0.3, 0.2});
  auto seq = coarse_rate_sequence(CosineKernel{0.5}, RenewalLaw::from_weights({0.1, 0.9}, 2.0), q8, nested, 2.0, 3, 3);
  for (std::size_t i = 1; i < seq.size(); ++i) CHECK(seq[i].i_que >= seq[i - 1].i_que - 1e-6);
  auto zero = coarse_reference_rates(CosineKernel{0.5}, RenewalLaw::from_weights({0.1, 0.9}, 2.0),
                                     {Partition::dyadic(2), Partition::dyadic(4)}, 2.0, 3, 3);
  for (const auto& r : zero) CHECK(std::abs(r.i_que) < 1e-9);
}
