#pragma once

#include <vector>

#include "wordldp/sources.hpp"

namespace wordldp {

// phi(0..N) plus a declared bound on sum_{n>N} phi(n).
struct VariationProfile {
  std::vector<double> phis;
  double tail_bound = 0.0;

  double phi(std::size_t n) const;  // beyond N: 0 if the tail is 0, else the tail bound
  double sum() const;
  bool finite() const;
};

VariationProfile variation_profile(const LetterSource& src, int n_terms = 8);

double c_phi(const VariationProfile& p);
double psi_upper_bound(const VariationProfile& p);

struct PhiValue {
  double value = 0.0;
  bool exact = true;
};

// sup |log nu_x(A) - log nu_xhat(A)| over pasts agreeing on the last k letters
// and events A on the next ell letters. Exact for IID/Markov; for GMeasure the
// telescoped declared bound is returned with exact = false.
PhiValue phi_exact(const LetterSource& src, int k, int ell, std::size_t budget = 10'000'000);

// Same supremum by enumerating every nonempty event over E^ell. Needs |E|^ell <= 16.
double phi_event_bruteforce(const LetterSource& src, int k, int ell);

// GMeasure: empirical lower estimate of phi(k, ell) from `pairs` random past
// pairs of depth `depth` agreeing on the last k letters.
double phi_sampled_lower(const LetterSource& src, int k, int ell, int pairs, int depth, std::uint64_t seed);

struct TelescopingResult {
  bool ok = true;
  double phi_k_ell = 0.0;
  double bound = 0.0;  // sum_{m<ell} phi(k+m)
  double slack = 0.0;
};
TelescopingResult telescoping_check(const LetterSource& src, const VariationProfile& profile, int k, int ell);

using Block = std::vector<Letter>;

struct SandwichResult {
  bool ok = true;
  double log_c = 0.0;
  double log_ratio_pasts = 0.0;   // |log nu_x(A) / nu_xhat(A)|
  double log_ratio_window = 0.0;  // |log nu(A | x_(-n,0]) / nu_xhat(A)|
};
SandwichResult sandwich_check(const LetterSource& src, const std::vector<Block>& event, const PastContext& x,
                              const PastContext& xhat, int n, const VariationProfile& profile);

// Cylinder event on the interval (start, start + length].
struct CylinderEvent {
  int start = 0;
  std::vector<Block> blocks;

  int length() const { return blocks.empty() ? 0 : static_cast<int>(blocks.front().size()); }
};

struct DecouplingResult {
  bool ok = true;
  double joint = 0.0;
  double product = 0.0;
  double ratio = 0.0;
  double bound = 1.0;  // C(phi)^{m-1}
};
DecouplingResult decoupling_check(const LetterSource& src, const std::vector<CylinderEvent>& events,
                                  const VariationProfile& profile, std::size_t budget = 10'000'000);

struct Pattern {
  std::vector<Block> blocks;  // all of equal length m

  int length() const { return blocks.empty() ? 0 : static_cast<int>(blocks.front().size()); }
  bool matches(const Letter* window) const;
};

struct PatternStats {
  Pattern pattern;
  std::vector<std::int64_t> sigma;
  std::vector<std::int64_t> gaps;
};

class InsufficientOccurrences : public std::runtime_error {
 public:
  InsufficientOccurrences(std::size_t found, std::size_t wanted);
  std::size_t found;
};

// sigma_0 = inf{k >= 0 : X_(k,k+m] in A} + m, sigma_l = inf{k >= sigma_{l-1} : ...} + m.
PatternStats pattern_occurrences(const LetterSeq& x, const Pattern& a, std::size_t n);

// E[sigma_1 - sigma_0] under the stationary source, by first-passage solves.
double expected_gap(const LetterSource& src, const Pattern& a, std::size_t budget = 200'000);
double expected_gap_mc(const LetterSource& src, const Pattern& a, std::size_t n, std::uint64_t seed);

struct RecurrenceResult {
  double lhs = 0.0;    // mean log gap
  double rhs = 0.0;    // log E[gap] + log C(phi)
  double slack = 0.0;  // 3 standard errors
  bool ok = true;
};
RecurrenceResult recurrence_stat(const PatternStats& stats, double expected_gap_value, const VariationProfile& profile);
RecurrenceResult recurrence_stat(const PatternStats& stats, const LetterSource& src, const VariationProfile& profile);

}  // namespace wordldp
