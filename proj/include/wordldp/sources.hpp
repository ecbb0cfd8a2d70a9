#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "wordldp/common.hpp"

namespace wordldp {

struct Alphabet {
  int size = 2;
};

struct LetterSeq {
  std::vector<Letter> letters;
  std::int64_t origin_offset = 0;

  std::size_t size() const { return letters.size(); }
};

// Finite suffix of the past, most recent letter last.
struct PastContext {
  std::vector<Letter> letters;

  int declared_depth() const { return static_cast<int>(letters.size()); }
};

enum class SourceVariant { Iid, Markov, GMeasure, RenewalAge, Rwrs, LinearRep };

// Predictive state of an exact source: the conditional law of whatever the
// variant needs to score the next letter (contexts for Markov, a row vector
// for linear representations).
struct ForwardState {
  Eigen::VectorXd w;
};

class LetterSource {
 public:
  // IID letters with law p.
  static LetterSource iid(std::vector<double> p);
  // Order-m Markov chain. Row c of `transition` is the next-letter law after
  // context c = x_1 A^{m-1} + ... + x_m (oldest letter most significant).
  static LetterSource markov(int alphabet, int order, Eigen::MatrixXd transition);
  // Order-1 base kernel with geometric log-perturbations
  //   g_j(x_{-j}, l) = amplitude * ratio^{j-1} * signs(x_{-j}, l),  j >= 1.
  // `sampling_depth` is the truncation used when drawing letters.
  static LetterSource gmeasure(Eigen::MatrixXd base, double amplitude, double ratio,
                               Eigen::MatrixXd signs, int sampling_depth = 64);
  // Indicator of a renewal at each time, for i.i.d. gaps with law p(1..M).
  static LetterSource renewal_age(std::vector<double> p);
  // One-dimensional simple random walk in an i.i.d. Bernoulli(scenery_p)
  // scenery. Letter = 2 * [step == +1] + scenery value at the new site.
  static LetterSource rwrs(double scenery_p = 0.5);
  // Stationary finite-rank source: P(x_1..x_n) = u M_{x_1} ... M_{x_n} e.
  static LetterSource linear_rep(Eigen::RowVectorXd u, std::vector<Eigen::MatrixXd> mats,
                                 Eigen::VectorXd e);

  SourceVariant variant() const { return variant_; }
  std::string variant_name() const;
  int alphabet_size() const { return alphabet_; }
  bool is_exact() const;
  // Sufficient memory for exact conditionals, -1 when there is none.
  int memory() const;

  LetterSeq sample(std::size_t n, std::uint64_t seed) const;
  void sample_into(std::vector<Letter>& out, std::size_t n, Rng& g) const;

  double cond_prob(const PastContext& past, Letter a) const;
  // Bound on |log error| of cond_prob at the given past depth.
  double cond_prob_log_error(int depth) const;

  double cylinder_prob(const std::vector<Letter>& block) const;
  double log_cylinder_prob(const std::vector<Letter>& block) const;
  double cond_cylinder_prob(const PastContext& past, const std::vector<Letter>& block) const;

  ForwardState initial_state() const;
  ForwardState state_after(const std::vector<Letter>& past) const;
  // Probability of `a` given the state; the state is then conditioned on it.
  double advance(ForwardState& s, Letter a) const;
  std::vector<double> next_probs(const ForwardState& s) const;

  // Markov/IID internals (IID is stored as order 0).
  int order() const { return order_; }
  int context_count() const { return static_cast<int>(transition_.rows()); }
  const Eigen::MatrixXd& transition() const { return transition_; }
  const Eigen::VectorXd& context_stationary() const { return stationary_; }
  int context_of(const Letter* last, int m) const;

  // GMeasure declared variation: phi(0) = b + 4 sum a_j, phi(n) = 4 sum_{j>=n} a_j.
  double declared_phi(int n) const;
  double declared_phi_tail(int n) const;  // sum_{j>=n} declared_phi(j)
  const Eigen::MatrixXd& base_kernel() const { return base_; }

  const std::vector<double>& age_law() const { return age_p_; }

  const Eigen::RowVectorXd& rep_initial() const { return rep_u_; }
  const std::vector<Eigen::MatrixXd>& rep_mats() const { return rep_m_; }
  const Eigen::VectorXd& rep_final() const { return rep_e_; }

 private:
  LetterSource() = default;
  void gmeasure_probs(const Letter* past_end, int depth, double* out) const;

  SourceVariant variant_ = SourceVariant::Iid;
  int alphabet_ = 2;
  int order_ = 0;
  Eigen::MatrixXd transition_;
  Eigen::VectorXd stationary_;

  Eigen::MatrixXd base_, signs_;
  double amp_ = 0.0, ratio_ = 0.0, base_var_ = 0.0;
  int sampling_depth_ = 64;

  std::vector<double> age_p_;
  double scenery_p_ = 0.5;

  Eigen::RowVectorXd rep_u_;
  std::vector<Eigen::MatrixXd> rep_m_;
  Eigen::VectorXd rep_e_;
};

// Stationary vector of a row-stochastic matrix: dense solve up to 64 states,
// power iteration to 1e-12 beyond.
Eigen::VectorXd stationary_vector(const Eigen::MatrixXd& t);

// log p(1) - log(p(n+1) / sum_{l>n} p(l)); lower bound on phi(1) of the
// renewal-age source. p is indexed from length 1.
double iia_phi_lower_bound(const std::vector<double>& p, int n);

}  // namespace wordldp
