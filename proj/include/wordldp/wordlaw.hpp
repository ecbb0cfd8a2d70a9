#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "wordldp/empirical.hpp"
#include "wordldp/renewal.hpp"

namespace wordldp {

struct TruncationMap {
  int tr = 1;
};

// Shift-invariant law on word sequences. Finite laws are stored as a hidden
// Markov chain whose states carry word labels: i.i.d. and first-order Markov
// laws have one state per word, truncations of Markov laws may share labels.
// The reference kind wraps P itself.
class WordLaw {
 public:
  enum class Kind { Iid, Markov, Hidden, Reference };

  static WordLaw iid(std::vector<Word> support, std::vector<double> probs);
  static WordLaw markov(std::vector<Word> states, Eigen::MatrixXd transition);
  static WordLaw hidden(std::vector<Word> labels, Eigen::MatrixXd transition);
  // P as a word law. Its support is enumerated up to `support_budget` words.
  static WordLaw reference(const ReferenceWordProcess& ref, std::size_t support_budget = 1'000'000);

  Kind kind() const { return kind_; }
  std::string kind_name() const;

  const std::vector<Word>& support() const { return support_; }
  int word_index(const Word& w) const;
  std::vector<double> one_word_marginal() const;
  int max_length() const { return max_len_; }
  double mean_length() const { return mean_len_; }

  // Conditional word probabilities given the words seen so far.
  struct State {
    Eigen::VectorXd pred;
    ForwardState letters;
  };
  State initial_state() const;
  std::vector<double> next_probs(const State& s) const;
  // Returns the conditional probability of support word `idx` and conditions on it.
  double advance(State& s, std::size_t idx) const;
  double tuple_prob(const WordSeq& y) const;

  WordSeq sample(std::size_t n, std::uint64_t seed) const;

  // Hidden-chain representation; unavailable for the reference kind.
  int hidden_count() const { return static_cast<int>(labels_.size()); }
  const std::vector<int>& hidden_labels() const { return labels_; }
  const Eigen::MatrixXd& hidden_transition() const { return transition_; }
  const Eigen::VectorXd& hidden_stationary() const { return stationary_; }

  const ReferenceWordProcess* reference_process() const { return ref_.get(); }
  // Memory of the letter source for the reference kind, -1 otherwise.
  int letter_memory() const;

 private:
  WordLaw() = default;
  static WordLaw build(Kind kind, std::vector<Word> labels, Eigen::MatrixXd transition);

  Kind kind_ = Kind::Iid;
  std::vector<Word> support_;
  std::vector<std::vector<int>> states_of_;  // support index -> hidden states
  std::vector<int> labels_;                  // hidden state -> support index
  Eigen::MatrixXd transition_;
  Eigen::VectorXd stationary_;
  std::vector<double> iid_probs_;
  int max_len_ = 0;
  double mean_len_ = 0.0;
  std::shared_ptr<const ReferenceWordProcess> ref_;
};

double mean_word_length(const WordLaw& q);

// Pushforward under prefix truncation to length <= tr.
WordLaw truncate(const WordLaw& q, TruncationMap map);

// Exact k-block marginal of Psi_Q by expanding word coordinates from every
// in-word offset of the first word.
LetterBlockDistribution psi_q_block(const WordLaw& q, int k, std::size_t budget = 1'000'000);

// Letter-level hidden chain of Psi_Q: states (hidden word state, offset).
struct LetterHmm {
  std::vector<Letter> emit;
  Eigen::MatrixXd transition;
  Eigen::VectorXd stationary;
};
LetterHmm psi_hmm(const WordLaw& q);

// k-block law of a letter HMM started from its stationary vector.
LetterBlockDistribution hmm_block(const LetterHmm& h, int k, std::size_t budget = 10'000'000);

bool shift_invariance_check(const WordLaw& q, int k, double tol = 1e-10);

// Specific entropy in nats: Shannon entropy (i.i.d.) or entropy rate (Markov).
double specific_entropy(const WordLaw& q);

}  // namespace wordldp
