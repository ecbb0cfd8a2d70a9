#pragma once

#include <vector>

#include "wordldp/mixing.hpp"
#include "wordldp/renewal.hpp"
#include "wordldp/wordlaw.hpp"

namespace wordldp {

// Bracket for a specific relative entropy built from block divergences h_n.
//   lower_seq[n-1] = (h_n - log C) / n      superadditive lower bounds
//   increments[n-1] = h_n - h_{n-1}         certified lower bounds from
//                                           `increments_valid_from` on, when the
//                                           reference has finite memory
//   value = max(0, last lower_seq, last certified increment)
// `upper` is a certified upper bound when one is available, +inf otherwise.
struct EntropyBracket {
  std::vector<double> h;
  std::vector<double> lower_seq;
  std::vector<double> increments;
  double point_estimate = 0.0;
  double cauchy_gap = kInf;
  double upper = kInf;
  int increments_valid_from = 0;  // 0: increments carry no guarantee
  double value = 0.0;

  bool infinite() const { return std::isinf(value); }
};

EntropyBracket make_bracket(std::vector<double> h, double log_c, int increments_valid_from);

// h(Q_n | P_n) for one n. Throws BudgetExceeded past `budget` tuples.
double block_rel_entropy(const WordLaw& q, const ReferenceWordProcess& ref, int n, std::size_t budget = 10'000'000);
// h_1..h_{n_max} in one enumeration.
std::vector<double> block_rel_entropies(const WordLaw& q, const ReferenceWordProcess& ref, int n_max,
                                        std::size_t budget = 10'000'000);

EntropyBracket specific_rel_entropy(const WordLaw& q, const ReferenceWordProcess& ref, const VariationProfile& profile,
                                    int n_max, std::size_t budget = 10'000'000);

// Bracket for H(Psi_Q | nu) from k-letter blocks, k = 1..k_max.
EntropyBracket psi_rel_entropy(const WordLaw& q, const LetterSource& nu, const VariationProfile& profile, int k_max,
                               std::size_t budget = 10'000'000);

// H(X_k | X_<k, S_1) <= H(Psi) <= H(X_k | X_<k) for the letter chain of Psi_Q.
struct HmmEntropyBounds {
  double lower = 0.0;
  double upper = 0.0;
};
HmmEntropyBounds hmm_entropy_bounds(const LetterHmm& h, int k, std::size_t budget = 10'000'000);

struct Decomposition {
  double h_q = 0.0;           // specific entropy of Q
  double term_rho = 0.0;      // E_Q log rho(|Y_1|)
  double term_letters = 0.0;  // m_Q E_Psi log nu(X_1 | past)
  double h_q_given_p = 0.0;   // -h_q - term_rho - term_letters
  double psi_lower = 0.0;     // bracket for H(Psi_Q | nu)
  double psi_upper = 0.0;
  bool infinite = false;
  std::string flag;
};
Decomposition entropy_decomposition(const WordLaw& q, const LetterSource& nu, const RenewalLaw& rho, int k_hmm = 8);

struct AsymptoticCheck {
  double mc_mean = 0.0;
  double mc_sd = 0.0;
  double target = 0.0;
  std::size_t samples = 0;
  bool agrees = false;
};
AsymptoticCheck asympt_entropy_check(const WordLaw& q, const LetterSource& nu, const RenewalLaw& rho, std::size_t n,
                                     std::size_t samples, std::uint64_t seed);

}  // namespace wordldp
