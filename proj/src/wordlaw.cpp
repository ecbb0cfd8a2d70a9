#include "wordldp/wordlaw.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>

namespace wordldp {

namespace {

void check_words(const std::vector<Word>& words) {
  for (const auto& w : words)
    if (w.size() == 0) throw std::invalid_argument("word law: empty word in support");
}

}  // namespace

WordLaw WordLaw::build(Kind kind, std::vector<Word> labels, Eigen::MatrixXd transition) {
  check_words(labels);
  const auto n = static_cast<Eigen::Index>(labels.size());
  if (n == 0) throw std::invalid_argument("word law: empty support");
  if (transition.rows() != n || transition.cols() != n) throw std::invalid_argument("word law: transition must be square over the states");
  for (Eigen::Index r = 0; r < n; ++r) {
    if ((transition.row(r).array() < 0.0).any()) throw std::invalid_argument("word law: negative transition entry");
    if (std::abs(transition.row(r).sum() - 1.0) > 1e-12) throw std::invalid_argument("word law: transition row does not sum to 1");
  }
  WordLaw q;
  q.kind_ = kind;
  q.support_ = labels;
  std::sort(q.support_.begin(), q.support_.end());
  q.support_.erase(std::unique(q.support_.begin(), q.support_.end()), q.support_.end());
  if (kind == Kind::Markov && q.support_.size() != labels.size()) throw std::invalid_argument("word law: Markov states must be distinct words");
  q.states_of_.assign(q.support_.size(), {});
  q.labels_.resize(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int idx = q.word_index(labels[i]);
    q.labels_[i] = idx;
    q.states_of_[static_cast<std::size_t>(idx)].push_back(static_cast<int>(i));
  }
  q.transition_ = std::move(transition);
  q.stationary_ = stationary_vector(q.transition_);
  q.mean_len_ = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    q.mean_len_ += q.stationary_(static_cast<Eigen::Index>(i)) * static_cast<double>(labels[i].size());
    q.max_len_ = std::max(q.max_len_, static_cast<int>(labels[i].size()));
  }
  return q;
}

WordLaw WordLaw::iid(std::vector<Word> support, std::vector<double> probs) {
  check_words(support);
  if (support.empty() || support.size() != probs.size()) throw std::invalid_argument("word law: support and probabilities differ in size");
  std::map<Word, double> merged;
  double s = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (!(probs[i] >= 0.0)) throw std::invalid_argument("word law: negative probability");
    s += probs[i];
    if (merged.count(support[i])) throw std::invalid_argument("word law: duplicate word in support");
    merged[support[i]] = probs[i];
  }
  if (std::abs(s - 1.0) > 1e-12) throw std::invalid_argument("word law: probabilities do not sum to 1");
  WordLaw q;
  q.kind_ = Kind::Iid;
  for (const auto& [w, p] : merged) {
    if (p <= 0.0) continue;
    q.support_.push_back(w);
    q.iid_probs_.push_back(p);
    q.mean_len_ += p * static_cast<double>(w.size());
    q.max_len_ = std::max(q.max_len_, static_cast<int>(w.size()));
  }
  const auto n = q.support_.size();
  q.states_of_.resize(n);
  q.labels_.resize(n);
  q.stationary_.resize(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    q.states_of_[i] = {static_cast<int>(i)};
    q.labels_[i] = static_cast<int>(i);
    q.stationary_(static_cast<Eigen::Index>(i)) = q.iid_probs_[i];
  }
  return q;
}

WordLaw WordLaw::markov(std::vector<Word> states, Eigen::MatrixXd transition) {
  return build(Kind::Markov, std::move(states), std::move(transition));
}

WordLaw WordLaw::hidden(std::vector<Word> labels, Eigen::MatrixXd transition) {
  return build(Kind::Hidden, std::move(labels), std::move(transition));
}

WordLaw WordLaw::reference(const ReferenceWordProcess& ref, std::size_t support_budget) {
  if (!ref.source.is_exact()) throw Unsupported("reference word law needs an exact letter source");
  WordLaw q;
  q.kind_ = Kind::Reference;
  q.ref_ = std::make_shared<const ReferenceWordProcess>(ref);
  const int a = ref.source.alphabet_size();
  const int cap = ref.renewal.cap();
  // Preorder DFS with ascending letters lists words in lexicographic order.
  std::vector<Letter> cur;
  std::function<void()> rec = [&]() {
    if (!cur.empty() && ref.renewal.prob(cur.size()) > 0.0) {
      q.support_.emplace_back(cur);
      if (q.support_.size() > support_budget) throw BudgetExceeded("reference word law: support exceeds budget");
    }
    if (static_cast<int>(cur.size()) == cap) return;
    for (int l = 0; l < a; ++l) {
      cur.push_back(static_cast<Letter>(l));
      rec();
      cur.pop_back();
    }
  };
  rec();
  q.mean_len_ = ref.renewal.mean();
  for (int l : ref.renewal.support()) q.max_len_ = std::max(q.max_len_, l);
  return q;
}

std::string WordLaw::kind_name() const {
  switch (kind_) {
    case Kind::Iid: return "iid";
    case Kind::Markov: return "markov";
    case Kind::Hidden: return "hidden";
    case Kind::Reference: return "reference";
  }
  return "unknown";
}

int WordLaw::word_index(const Word& w) const {
  auto it = std::lower_bound(support_.begin(), support_.end(), w);
  if (it == support_.end() || !(*it == w)) return -1;
  return static_cast<int>(it - support_.begin());
}

int WordLaw::letter_memory() const { return ref_ ? ref_->source.memory() : -1; }

WordLaw::State WordLaw::initial_state() const {
  State s;
  if (kind_ == Kind::Reference) {
    s.letters = ref_->source.initial_state();
  } else if (kind_ != Kind::Iid) {
    s.pred = stationary_;
  }
  return s;
}

std::vector<double> WordLaw::next_probs(const State& s) const {
  if (kind_ == Kind::Iid) return iid_probs_;
  std::vector<double> out(support_.size(), 0.0);
  if (kind_ == Kind::Reference) {
    const auto& src = ref_->source;
    const int a = src.alphabet_size();
    const int cap = ref_->renewal.cap();
    std::size_t idx = 0;
    std::vector<Letter> cur;
    std::function<void(const ForwardState&, double)> rec = [&](const ForwardState& st, double p) {
      if (!cur.empty() && ref_->renewal.prob(cur.size()) > 0.0) out[idx++] = p * ref_->renewal.prob(cur.size());
      if (static_cast<int>(cur.size()) == cap) return;
      for (int l = 0; l < a; ++l) {
        ForwardState next = st;
        const double q = src.advance(next, static_cast<Letter>(l));
        cur.push_back(static_cast<Letter>(l));
        rec(next, p * q);
        cur.pop_back();
      }
    };
    rec(s.letters, 1.0);
    return out;
  }
  for (Eigen::Index j = 0; j < s.pred.size(); ++j) out[static_cast<std::size_t>(labels_[static_cast<std::size_t>(j)])] += s.pred(j);
  return out;
}

double WordLaw::advance(State& s, std::size_t idx) const {
  if (idx >= support_.size()) throw std::out_of_range("word law: word index out of range");
  if (kind_ == Kind::Iid) return iid_probs_[idx];
  if (kind_ == Kind::Reference) {
    const Word& w = support_[idx];
    double p = ref_->renewal.prob(w.size());
    for (Letter l : w.letters) p *= ref_->source.advance(s.letters, l);
    return p;
  }
  double p = 0.0;
  Eigen::VectorXd post = Eigen::VectorXd::Zero(s.pred.size());
  for (int j : states_of_[idx]) {
    post(j) = s.pred(j);
    p += s.pred(j);
  }
  if (p > 0.0) post /= p;
  s.pred = transition_.transpose() * post;
  return p;
}

double WordLaw::tuple_prob(const WordSeq& y) const {
  State s = initial_state();
  double p = 1.0;
  for (const auto& w : y) {
    const int idx = word_index(w);
    if (idx < 0) return 0.0;
    p *= advance(s, static_cast<std::size_t>(idx));
    if (p == 0.0) return 0.0;
  }
  return p;
}

std::vector<double> WordLaw::one_word_marginal() const { return next_probs(initial_state()); }

WordSeq WordLaw::sample(std::size_t n, std::uint64_t seed) const {
  Rng g(seed);
  WordSeq y;
  y.reserve(n);
  if (kind_ == Kind::Reference) {
    std::vector<int> gaps(n);
    std::size_t total = 0;
    for (auto& gap : gaps) {
      gap = ref_->renewal.sample(g);
      total += static_cast<std::size_t>(gap);
    }
    std::vector<Letter> x;
    ref_->source.sample_into(x, total, g);
    std::size_t pos = 0;
    for (int gap : gaps) {
      y.emplace_back(std::vector<Letter>(x.begin() + static_cast<std::ptrdiff_t>(pos), x.begin() + static_cast<std::ptrdiff_t>(pos + static_cast<std::size_t>(gap))));
      pos += static_cast<std::size_t>(gap);
    }
    return y;
  }
  if (kind_ == Kind::Iid) {
    AliasTable t(iid_probs_);
    for (std::size_t i = 0; i < n; ++i) y.push_back(support_[t.sample(g)]);
    return y;
  }
  const auto m = static_cast<std::size_t>(transition_.rows());
  std::vector<AliasTable> rows;
  rows.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<double> r(m);
    for (std::size_t j = 0; j < m; ++j) r[j] = transition_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    rows.emplace_back(r);
  }
  std::vector<double> init(stationary_.data(), stationary_.data() + stationary_.size());
  std::size_t state = AliasTable(init).sample(g);
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) state = rows[state].sample(g);
    y.push_back(support_[static_cast<std::size_t>(labels_[state])]);
  }
  return y;
}

double mean_word_length(const WordLaw& q) { return q.mean_length(); }

WordLaw truncate(const WordLaw& q, TruncationMap map) {
  if (map.tr < 1) throw std::invalid_argument("truncate: tr must be >= 1");
  if (q.max_length() <= map.tr) return q;
  auto cut = [&](const Word& w) {
    return Word(std::vector<Letter>(w.letters.begin(), w.letters.begin() + std::min<std::ptrdiff_t>(map.tr, static_cast<std::ptrdiff_t>(w.size()))));
  };
  switch (q.kind()) {
    case WordLaw::Kind::Iid: {
      std::map<Word, double> merged;
      auto probs = q.one_word_marginal();
      for (std::size_t i = 0; i < q.support().size(); ++i) merged[cut(q.support()[i])] += probs[i];
      std::vector<Word> words;
      std::vector<double> p;
      double s = 0.0;
      for (const auto& [w, m] : merged) {
        words.push_back(w);
        p.push_back(m);
        s += m;
      }
      for (double& v : p) v /= s;
      return WordLaw::iid(std::move(words), std::move(p));
    }
    case WordLaw::Kind::Markov:
    case WordLaw::Kind::Hidden: {
      std::vector<Word> labels;
      for (int idx : q.hidden_labels()) labels.push_back(cut(q.support()[static_cast<std::size_t>(idx)]));
      auto sorted = labels;
      std::sort(sorted.begin(), sorted.end());
      const bool distinct = std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
      if (distinct && q.kind() == WordLaw::Kind::Markov) return WordLaw::markov(std::move(labels), q.hidden_transition());
      return WordLaw::hidden(std::move(labels), q.hidden_transition());
    }
    case WordLaw::Kind::Reference:
      break;
  }
  throw Unsupported("truncate: reference laws are not truncated");
}

LetterBlockDistribution psi_q_block(const WordLaw& q, int k, std::size_t budget) {
  if (k < 1) throw std::invalid_argument("psi_q_block: k must be >= 1");
  LetterBlockDistribution out;
  out.k = k;
  const auto& support = q.support();
  std::size_t visited = 0;
  std::vector<Letter> buf;

  std::function<void(const WordLaw::State&, const std::vector<double>&, double)> expand =
      [&](const WordLaw::State& s, const std::vector<double>& probs, double mass) {
        if (++visited > budget) throw BudgetExceeded("psi_q_block: window-coverage horizon exceeds budget");
        const std::size_t base = buf.size();
        for (std::size_t i = 0; i < support.size(); ++i) {
          if (probs[i] <= 0.0) continue;
          const auto& w = support[i].letters;
          const double m = mass * probs[i];
          if (base + w.size() >= static_cast<std::size_t>(k)) {
            std::vector<Letter> key(buf.begin(), buf.end());
            key.insert(key.end(), w.begin(), w.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(k) - base));
            out.masses[key] += m;
          } else {
            WordLaw::State next = s;
            q.advance(next, i);
            buf.insert(buf.end(), w.begin(), w.end());
            expand(next, q.next_probs(next), m);
            buf.resize(base);
          }
        }
      };

  const WordLaw::State s0 = q.initial_state();
  const auto p0 = q.next_probs(s0);
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (p0[i] <= 0.0) continue;
    WordLaw::State s1 = s0;
    q.advance(s1, i);
    std::vector<double> p1;
    const auto& w = support[i].letters;
    for (std::size_t j = 0; j < w.size(); ++j) {
      const std::size_t rest = w.size() - j;
      if (rest >= static_cast<std::size_t>(k)) {
        out.masses[std::vector<Letter>(w.begin() + static_cast<std::ptrdiff_t>(j), w.begin() + static_cast<std::ptrdiff_t>(j) + k)] += p0[i];
      } else {
        if (p1.empty()) p1 = q.next_probs(s1);
        buf.assign(w.begin() + static_cast<std::ptrdiff_t>(j), w.end());
        expand(s1, p1, p0[i]);
      }
    }
  }
  const double m = q.mean_length();
  for (auto& [key, v] : out.masses) v /= m;
  return out;
}

LetterHmm psi_hmm(const WordLaw& q) {
  if (q.kind() == WordLaw::Kind::Reference) throw Unsupported("psi_hmm: reference laws have no finite hidden chain");
  const int states = q.hidden_count();
  std::vector<int> first(static_cast<std::size_t>(states));
  int total = 0;
  for (int i = 0; i < states; ++i) {
    first[static_cast<std::size_t>(i)] = total;
    total += static_cast<int>(q.support()[static_cast<std::size_t>(q.hidden_labels()[static_cast<std::size_t>(i)])].size());
  }
  LetterHmm h;
  h.emit.resize(static_cast<std::size_t>(total));
  h.transition = Eigen::MatrixXd::Zero(total, total);
  h.stationary.resize(total);
  const auto marginal = q.one_word_marginal();
  for (int i = 0; i < states; ++i) {
    const auto& w = q.support()[static_cast<std::size_t>(q.hidden_labels()[static_cast<std::size_t>(i)])].letters;
    const int f = first[static_cast<std::size_t>(i)];
    for (std::size_t j = 0; j < w.size(); ++j) {
      const int s = f + static_cast<int>(j);
      h.emit[static_cast<std::size_t>(s)] = w[j];
      h.stationary(s) = q.hidden_stationary()(i) / q.mean_length();
      if (j + 1 < w.size()) {
        h.transition(s, s + 1) = 1.0;
      } else {
        for (int t = 0; t < states; ++t) {
          const double p = q.kind() == WordLaw::Kind::Iid ? marginal[static_cast<std::size_t>(t)] : q.hidden_transition()(i, t);
          h.transition(s, first[static_cast<std::size_t>(t)]) += p;
        }
      }
    }
  }
  return h;
}

LetterBlockDistribution hmm_block(const LetterHmm& h, int k, std::size_t budget) {
  if (k < 1) throw std::invalid_argument("hmm_block: k must be >= 1");
  LetterBlockDistribution out;
  out.k = k;
  int a = 0;
  for (Letter e : h.emit) a = std::max(a, static_cast<int>(e) + 1);
  std::vector<Letter> cur;
  std::size_t visited = 0;
  const Eigen::MatrixXd tt = h.transition.transpose();
  std::function<void(const Eigen::VectorXd&)> rec = [&](const Eigen::VectorXd& v) {
    if (++visited > budget) throw BudgetExceeded("hmm_block: enumeration exceeds budget");
    for (int l = 0; l < a; ++l) {
      Eigen::VectorXd masked = Eigen::VectorXd::Zero(v.size());
      for (Eigen::Index s = 0; s < v.size(); ++s)
        if (h.emit[static_cast<std::size_t>(s)] == l) masked(s) = v(s);
      const double p = masked.sum();
      if (p <= 0.0) continue;
      cur.push_back(static_cast<Letter>(l));
      if (static_cast<int>(cur.size()) == k) {
        out.masses[cur] += p;
      } else {
        rec(tt * masked);
      }
      cur.pop_back();
    }
  };
  rec(h.stationary);
  return out;
}

bool shift_invariance_check(const WordLaw& q, int k, double tol) {
  const auto b = psi_q_block(q, k);
  if (k < 2) return std::abs(b.total() - 1.0) <= tol;
  const auto f = b.drop_first();
  const auto l = b.drop_last();
  for (const auto& [key, m] : f.masses)
    if (std::abs(m - l.mass(key)) > tol) return false;
  for (const auto& [key, m] : l.masses)
    if (std::abs(m - f.mass(key)) > tol) return false;
  return true;
}

double specific_entropy(const WordLaw& q) {
  switch (q.kind()) {
    case WordLaw::Kind::Iid: {
      double h = 0.0;
      for (double p : q.one_word_marginal()) h -= xlogx(p);
      return h;
    }
    case WordLaw::Kind::Markov: {
      double h = 0.0;
      const auto& t = q.hidden_transition();
      for (Eigen::Index i = 0; i < t.rows(); ++i) {
        double row = 0.0;
        for (Eigen::Index j = 0; j < t.cols(); ++j) row -= xlogx(t(i, j));
        h += q.hidden_stationary()(i) * row;
      }
      return h;
    }
    case WordLaw::Kind::Reference: {
      // Renewals are independent of X, so the letter context before a word is
      // nu-stationary and the next word depends on the past only through it.
      const auto& ref = *q.reference_process();
      const auto& src = ref.source;
      if (src.variant() != SourceVariant::Iid && src.variant() != SourceVariant::Markov) break;
      double h = 0.0;
      for (int c = 0; c < src.context_count(); ++c) {
        const double pc = src.context_stationary()(c);
        if (pc <= 0.0) continue;
        ForwardState s0;
        s0.w = Eigen::VectorXd::Zero(src.context_count());
        s0.w(c) = 1.0;
        double hc = 0.0;
        std::function<void(const ForwardState&, int, double)> rec = [&](const ForwardState& s, int len, double p) {
          if (len > 0) hc -= xlogx(p * ref.renewal.prob(static_cast<std::size_t>(len)));
          if (len == ref.renewal.cap()) return;
          for (int l = 0; l < src.alphabet_size(); ++l) {
            ForwardState s2 = s;
            const double a = src.advance(s2, static_cast<Letter>(l));
            if (a > 0.0) rec(s2, len + 1, p * a);
          }
        };
        rec(s0, 0, 1.0);
        h += pc * hc;
      }
      return h;
    }
    default:
      break;
  }
  throw std::domain_error("specific_entropy: no closed form for " + q.kind_name() + " word laws");
}

}  // namespace wordldp
