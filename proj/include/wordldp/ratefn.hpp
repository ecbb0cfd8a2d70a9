#pragma once

#include <Eigen/Dense>
#include <vector>

#include "wordldp/entropy.hpp"

namespace wordldp {

struct RateReport {
  double i_ann = 0.0;
  double i_que = 0.0;
  double m_q = 0.0;
  double psi_term = 0.0;  // H(Psi_Q | nu)
  double alpha = 1.0;
  EntropyBracket ann;
  EntropyBracket psi;
};

// `budget` caps every block enumeration (tuples or letter blocks visited).
double ann_rate(const WordLaw& q, const ReferenceWordProcess& ref, const VariationProfile& profile, int n_max,
                std::size_t budget = 10'000'000);

RateReport que_rate(const WordLaw& q, const ReferenceWordProcess& ref, const VariationProfile& profile, double alpha,
                    int n_max, int k_max, std::size_t budget = 10'000'000);

struct TruncationRow {
  int tr = 0;
  double m_tr = 0.0;
  double h_ann = 0.0;         // H([Q]_tr | P)
  double psi_weighted = 0.0;  // m_[Q]_tr H(Psi_[Q]_tr | nu)
};
std::vector<TruncationRow> truncation_convergence(const WordLaw& q, const ReferenceWordProcess& ref,
                                                  const VariationProfile& profile, double alpha,
                                                  const std::vector<int>& tr_list, int n_max, int k_max,
                                                  std::size_t budget = 10'000'000);

// Cells [b_i, b_{i+1}) of [0,1).
struct Partition {
  std::vector<double> boundaries;  // 0 = b_0 < ... < b_c = 1

  int c() const { return static_cast<int>(boundaries.size()) - 1; }
  int cell(double x) const;
  bool refines(const Partition& coarser) const;
  static Partition dyadic(int c);
};

LetterSeq coarsen(const std::vector<double>& x, const Partition& p);

// Order-1 kernel on [0,1) with density f(y|x) = 1 + eps cos(2 pi (y - x)).
// It has rank three in the basis {1, sqrt2 cos, sqrt2 sin}, so every coarse
// graining is a finite linear representation with closed-form cell integrals.
struct CosineKernel {
  double eps = 0.0;

  double density(double y, double x) const;
  // G[a][b] = integral over [s,t) of phi_a phi_b.
  Eigen::Matrix3d cell_gram(double s, double t) const;
  LetterSource coarse_source(const Partition& p) const;
  VariationProfile profile() const;  // phi(0) = log((1+eps)/(1-eps)), phi(n) = 0 after
  std::vector<double> sample(std::size_t n, std::uint64_t seed) const;
};

// Relabel the letters of every word through `map`.
WordLaw map_letters(const WordLaw& q, const std::vector<Letter>& map);

// Letter map from the cells of `fine` to the cells of `coarse`.
std::vector<Letter> cell_map(const Partition& fine, const Partition& coarse);

// Quenched rates of the coarse-grained pairs (Q^(c), P^(c)); q_fine lives on
// the cells of the last (finest) partition.
std::vector<RateReport> coarse_rate_sequence(const CosineKernel& kernel, const RenewalLaw& rho, const WordLaw& q_fine,
                                             const std::vector<Partition>& partitions, double alpha, int n_max,
                                             int k_max, std::size_t budget = 10'000'000);
// Same with Q^(c) = P^(c) at every resolution.
std::vector<RateReport> coarse_reference_rates(const CosineKernel& kernel, const RenewalLaw& rho,
                                               const std::vector<Partition>& partitions, double alpha, int n_max,
                                               int k_max, std::size_t budget = 10'000'000);

}  // namespace wordldp
