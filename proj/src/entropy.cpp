#include "wordldp/entropy.hpp"

#include <algorithm>
#include <functional>

namespace wordldp {

EntropyBracket make_bracket(std::vector<double> h, double log_c, int increments_valid_from) {
  if (h.empty()) throw std::invalid_argument("make_bracket: no block entropies");
  EntropyBracket b;
  const std::size_t n_max = h.size();
  b.h = std::move(h);
  b.increments_valid_from = increments_valid_from;
  bool inf = false;
  for (std::size_t i = 0; i < n_max; ++i) {
    const double hn = b.h[i];
    inf = inf || std::isinf(hn);
    b.lower_seq.push_back(std::isinf(hn) ? kInf : (hn - log_c) / static_cast<double>(i + 1));
    const double prev = i == 0 ? 0.0 : b.h[i - 1];
    b.increments.push_back(std::isinf(hn) ? kInf : hn - prev);
  }
  b.point_estimate = b.h.back() / static_cast<double>(n_max);
  if (inf) {
    b.value = kInf;
    b.upper = kInf;
    b.cauchy_gap = 0.0;
    return b;
  }
  b.cauchy_gap = n_max >= 2 ? std::abs(b.increments[n_max - 1] - b.increments[n_max - 2]) : kInf;
  double v = std::max(0.0, b.lower_seq.back());
  if (increments_valid_from > 0)
    for (std::size_t n = static_cast<std::size_t>(increments_valid_from); n <= n_max; ++n) v = std::max(v, b.increments[n - 1]);
  b.value = v;
  return b;
}

std::vector<double> block_rel_entropies(const WordLaw& q, const ReferenceWordProcess& ref, int n_max, std::size_t budget) {
  if (n_max < 1) throw std::invalid_argument("block_rel_entropies: n_max must be >= 1");
  if (!ref.source.is_exact()) throw Unsupported("block_rel_entropies: exact reference required");
  std::vector<double> h(static_cast<std::size_t>(n_max), 0.0);
  int inf_from = n_max + 1;
  std::size_t visited = 0;
  const auto& support = q.support();
  std::function<void(const WordLaw::State&, const ForwardState&, int, double, double, double)> rec =
      [&](const WordLaw::State& qs, const ForwardState& ps, int depth, double mass, double lq, double lp) {
        const auto probs = q.next_probs(qs);
        for (std::size_t i = 0; i < support.size(); ++i) {
          if (probs[i] <= 0.0) continue;
          if (++visited > budget) throw BudgetExceeded("block_rel_entropy: enumeration exceeds budget");
          const Word& w = support[i];
          ForwardState ps2 = ps;
          double pc = ref.renewal.prob(w.size());
          for (Letter l : w.letters) {
            if (pc == 0.0) break;
            pc *= ref.source.advance(ps2, l);
          }
          if (pc <= 0.0) {
            inf_from = std::min(inf_from, depth + 1);
            continue;
          }
          const double m = mass * probs[i];
          const double lq2 = lq + std::log(probs[i]);
          const double lp2 = lp + std::log(pc);
          h[static_cast<std::size_t>(depth)] += m * (lq2 - lp2);
          if (depth + 1 < n_max && depth + 1 < inf_from) {
            WordLaw::State qs2 = qs;
            q.advance(qs2, i);
            rec(qs2, ps2, depth + 1, m, lq2, lp2);
          }
        }
      };
  rec(q.initial_state(), ref.source.initial_state(), 0, 1.0, 0.0, 0.0);
  for (int n = inf_from; n <= n_max; ++n) h[static_cast<std::size_t>(n - 1)] = kInf;
  for (auto& v : h)
    if (v < 0.0 && v > -1e-12) v = 0.0;
  return h;
}

double block_rel_entropy(const WordLaw& q, const ReferenceWordProcess& ref, int n, std::size_t budget) {
  return block_rel_entropies(q, ref, n, budget).back();
}

EntropyBracket specific_rel_entropy(const WordLaw& q, const ReferenceWordProcess& ref, const VariationProfile& profile,
                                    int n_max, std::size_t budget) {
  const int mem = ref.source.memory();
  return make_bracket(block_rel_entropies(q, ref, n_max, budget), profile.sum(), mem >= 0 ? mem + 1 : 0);
}

namespace {

// -sum_x p(x) log p(x) over k-blocks of an HMM started from an unnormalized vector.
double hmm_block_entropy(const LetterHmm& h, const Eigen::VectorXd& start, int k, std::size_t& visited, std::size_t budget) {
  if (k == 0) return -xlogx(start.sum());
  int a = 0;
  for (Letter e : h.emit) a = std::max(a, static_cast<int>(e) + 1);
  const Eigen::MatrixXd tt = h.transition.transpose();
  double ent = 0.0;
  std::function<void(const Eigen::VectorXd&, int)> rec = [&](const Eigen::VectorXd& v, int depth) {
    if (++visited > budget) throw BudgetExceeded("hmm entropy: enumeration exceeds budget");
    for (int l = 0; l < a; ++l) {
      Eigen::VectorXd masked = Eigen::VectorXd::Zero(v.size());
      for (Eigen::Index s = 0; s < v.size(); ++s)
        if (h.emit[static_cast<std::size_t>(s)] == l) masked(s) = v(s);
      const double p = masked.sum();
      if (p <= 0.0) continue;
      if (depth + 1 == k) {
        ent -= xlogx(p);
      } else {
        rec(tt * masked, depth + 1);
      }
    }
  };
  rec(start, 0);
  return ent;
}

double joint_entropy_with_state(const LetterHmm& h, int k, std::size_t& visited, std::size_t budget) {
  double ent = 0.0;
  for (Eigen::Index s = 0; s < h.stationary.size(); ++s) {
    if (h.stationary(s) <= 0.0) continue;
    Eigen::VectorXd start = Eigen::VectorXd::Zero(h.stationary.size());
    start(s) = h.stationary(s);
    ent += hmm_block_entropy(h, start, k, visited, budget);
  }
  return ent;
}

}  // namespace

HmmEntropyBounds hmm_entropy_bounds(const LetterHmm& h, int k, std::size_t budget) {
  if (k < 1) throw std::invalid_argument("hmm_entropy_bounds: k must be >= 1");
  std::size_t visited = 0;
  HmmEntropyBounds b;
  b.upper = hmm_block_entropy(h, h.stationary, k, visited, budget) - hmm_block_entropy(h, h.stationary, k - 1, visited, budget);
  b.lower = joint_entropy_with_state(h, k, visited, budget) - joint_entropy_with_state(h, k - 1, visited, budget);
  b.lower = std::max(0.0, b.lower);
  b.upper = std::max(b.lower, b.upper);
  return b;
}

namespace {

// E_Psi log nu(X_{m+1} | X_1..X_m) from the (m+1)-block of Psi_Q.
double psi_log_conditional(const LetterBlockDistribution& block, const LetterSource& nu) {
  const int m = nu.order();
  double t = 0.0;
  for (const auto& [b, mass] : block.masses) {
    if (mass <= 0.0) continue;
    const double c = nu.transition()(nu.context_of(b.data(), m), b[static_cast<std::size_t>(m)]);
    if (c <= 0.0) return -kInf;
    t += mass * std::log(c);
  }
  return t;
}

}  // namespace

EntropyBracket psi_rel_entropy(const WordLaw& q, const LetterSource& nu, const VariationProfile& profile, int k_max,
                               std::size_t budget) {
  if (k_max < 1) throw std::invalid_argument("psi_rel_entropy: k_max must be >= 1");
  if (!nu.is_exact()) throw Unsupported("psi_rel_entropy: exact letter source required");
  std::vector<double> h;
  for (int k = 1; k <= k_max; ++k) {
    const auto b = psi_q_block(q, k, budget);
    double s = 0.0;
    for (const auto& [block, mass] : b.masses) {
      s += kl_term(mass, nu.cylinder_prob(block));
      if (std::isinf(s)) break;
    }
    if (s < 0.0 && s > -1e-12) s = 0.0;
    h.push_back(s);
  }
  const int mem = nu.memory();
  auto br = make_bracket(std::move(h), profile.sum(), mem >= 0 ? mem + 1 : 0);
  if (!br.infinite() && mem >= 0 && k_max >= mem + 1 && q.kind() != WordLaw::Kind::Reference) {
    const double cross = psi_log_conditional(psi_q_block(q, mem + 1, budget), nu);
    const auto hb = hmm_entropy_bounds(psi_hmm(q), k_max, budget);
    br.upper = std::max(br.value, -hb.lower - cross);
  }
  return br;
}

namespace {

// Entropy bounds for Psi_Q. A reference law has Psi_P = nu, an order-m chain,
// so H(X_k | X_<k) is already exact at k = m + 1.
HmmEntropyBounds psi_entropy_bounds(const WordLaw& q, int k, int m) {
  if (q.kind() != WordLaw::Kind::Reference) return hmm_entropy_bounds(psi_hmm(q), k);
  auto block_entropy = [&](int kk) {
    if (kk == 0) return 0.0;
    double h = 0.0;
    for (const auto& [b, mass] : psi_q_block(q, kk).masses) h -= xlogx(mass);
    return h;
  };
  const double h = block_entropy(m + 1) - block_entropy(m);
  return {h, h};
}

}  // namespace

Decomposition entropy_decomposition(const WordLaw& q, const LetterSource& nu, const RenewalLaw& rho, int k_hmm) {
  if (nu.variant() != SourceVariant::Iid && nu.variant() != SourceVariant::Markov)
    throw Unsupported("entropy_decomposition: Markov letter source required");
  Decomposition d;
  const int m = nu.order();
  d.h_q = specific_entropy(q);
  const auto marginal = q.one_word_marginal();
  for (std::size_t i = 0; i < marginal.size(); ++i) {
    if (marginal[i] <= 0.0) continue;
    const double r = rho.prob(q.support()[i].size());
    if (r <= 0.0) {
      d.term_rho = -kInf;
      d.flag = "rho assigns zero mass to a word length charged by Q";
      break;
    }
    d.term_rho += marginal[i] * std::log(r);
  }
  const double mq = q.mean_length();
  const double cross = psi_log_conditional(psi_q_block(q, m + 1), nu);
  d.term_letters = mq * cross;
  if (std::isinf(cross) && d.flag.empty()) d.flag = "nu assigns zero conditional probability to a letter charged by Psi_Q";
  d.infinite = std::isinf(d.term_rho) || std::isinf(d.term_letters);
  if (d.infinite) {
    d.h_q_given_p = kInf;
    d.psi_lower = std::isinf(cross) ? kInf : 0.0;
    d.psi_upper = std::isinf(cross) ? kInf : 0.0;
    if (!std::isinf(cross)) {
      const auto hb = psi_entropy_bounds(q, std::max(k_hmm, m + 1), m);
      d.psi_lower = std::max(0.0, -hb.upper - cross);
      d.psi_upper = -hb.lower - cross;
    }
    return d;
  }
  d.h_q_given_p = -d.h_q - d.term_rho - d.term_letters;
  const auto hb = psi_entropy_bounds(q, std::max(k_hmm, m + 1), m);
  d.psi_lower = std::max(0.0, -hb.upper - cross);
  d.psi_upper = -hb.lower - cross;
  return d;
}

AsymptoticCheck asympt_entropy_check(const WordLaw& q, const LetterSource& nu, const RenewalLaw& rho, std::size_t n,
                                     std::size_t samples, std::uint64_t seed) {
  (void)rho;  // words come from Q; rho only enters through P, not this identity
  if (samples < 2 || n < 1) throw std::invalid_argument("asympt_entropy_check: need n >= 1 and samples >= 2");
  AsymptoticCheck r;
  r.samples = samples;
  double s = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const auto y = q.sample(n, mix_seed(seed, i));
    const double v = nu.log_cylinder_prob(concat(y).letters) / static_cast<double>(n);
    s += v;
    s2 += v * v;
  }
  r.mc_mean = s / static_cast<double>(samples);
  r.mc_sd = std::sqrt(std::max(0.0, (s2 - s * r.mc_mean) / static_cast<double>(samples - 1)));
  const int m = nu.memory();
  if (m < 0) throw Unsupported("asympt_entropy_check: finite-memory letter source required");
  r.target = q.mean_length() * psi_log_conditional(psi_q_block(q, m + 1), nu);
  const double se = r.mc_sd / std::sqrt(static_cast<double>(samples));
  r.agrees = std::abs(r.mc_mean - r.target) <= 3.0 * se + 1e-12;
  return r;
}

}  // namespace wordldp
