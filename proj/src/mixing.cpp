#include "wordldp/mixing.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <functional>
#include <map>
#include <numeric>

namespace wordldp {

namespace {

// Law of the next ell letters from a forward state, indexed base-A with the
// first letter most significant.
std::vector<double> block_law(const LetterSource& src, const ForwardState& start, int ell) {
  const int a = src.alphabet_size();
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(std::pow(a, ell)));
  std::function<void(const ForwardState&, double, int)> rec = [&](const ForwardState& s, double p, int depth) {
    if (depth == ell) {
      out.push_back(p);
      return;
    }
    for (int l = 0; l < a; ++l) {
      ForwardState next = s;
      const double q = src.advance(next, static_cast<Letter>(l));
      rec(next, p * q, depth + 1);
    }
  };
  rec(start, 1.0, 0);
  return out;
}

// |log(p/q)| with the conventions 0/0 -> 0 and x/0 -> inf.
double log_ratio(double p, double q) {
  if (p == q) return 0.0;
  if (p <= 0.0 || q <= 0.0) return kInf;
  return std::log(p > q ? p / q : q / p);
}

std::vector<Letter> decode(int c, int a, int m) {
  std::vector<Letter> out(static_cast<std::size_t>(m));
  for (int i = m - 1; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = static_cast<Letter>(c % a);
    c /= a;
  }
  return out;
}

// Contexts of a Markov source with positive stationary mass.
std::vector<int> live_contexts(const LetterSource& src) {
  std::vector<int> out;
  for (int c = 0; c < src.context_count(); ++c)
    if (src.context_stationary()(c) > 0.0) out.push_back(c);
  return out;
}

int suffix_of(int c, int a, int k) {
  int mod = 1;
  for (int i = 0; i < k; ++i) mod *= a;
  return c % mod;
}

}  // namespace

double VariationProfile::phi(std::size_t n) const {
  if (n < phis.size()) return phis[n];
  return tail_bound;
}

double VariationProfile::sum() const {
  double s = tail_bound;
  for (double v : phis) s += v;
  return s;
}

bool VariationProfile::finite() const { return std::isfinite(sum()); }

VariationProfile variation_profile(const LetterSource& src, int n_terms) {
  if (n_terms < 1) throw std::invalid_argument("variation_profile: need at least one term");
  VariationProfile p;
  p.phis.assign(static_cast<std::size_t>(n_terms), 0.0);
  switch (src.variant()) {
    case SourceVariant::Iid:
      return p;
    case SourceVariant::Markov:
      for (int n = 0; n < std::min(n_terms, src.order()); ++n) p.phis[static_cast<std::size_t>(n)] = phi_exact(src, n, 1).value;
      return p;
    case SourceVariant::GMeasure:
      for (int n = 0; n < n_terms; ++n) p.phis[static_cast<std::size_t>(n)] = src.declared_phi(n);
      p.tail_bound = src.declared_phi_tail(n_terms);
      return p;
    case SourceVariant::RenewalAge:
    case SourceVariant::Rwrs:
      std::fill(p.phis.begin(), p.phis.end(), kInf);
      p.tail_bound = kInf;
      return p;
    case SourceVariant::LinearRep:
      break;
  }
  throw Unsupported("variation_profile: linear representations need a declared profile");
}

double c_phi(const VariationProfile& p) { return std::exp(p.sum()); }

double psi_upper_bound(const VariationProfile& p) {
  const double s = p.sum();
  if (!std::isfinite(s)) throw std::domain_error("psi_upper_bound: infinite variation profile");
  return s;
}

PhiValue phi_exact(const LetterSource& src, int k, int ell, std::size_t budget) {
  if (k < 0 || ell < 1) throw std::invalid_argument("phi_exact: need k >= 0 and ell >= 1");
  switch (src.variant()) {
    case SourceVariant::Iid:
      return {0.0, true};
    case SourceVariant::Markov:
      break;
    case SourceVariant::GMeasure: {
      double s = 0.0;
      for (int m = 0; m < ell; ++m) s += src.declared_phi(k + m);
      return {s, false};
    }
    default:
      return {kInf, false};
  }
  const int m = src.order();
  if (k >= m) return {0.0, true};
  const int a = src.alphabet_size();
  const double states = std::pow(a, m) * std::pow(a, ell);
  if (states > static_cast<double>(budget)) throw BudgetExceeded("phi_exact: enumeration exceeds budget");
  const auto live = live_contexts(src);
  std::vector<std::vector<double>> laws;
  laws.reserve(live.size());
  for (int c : live) {
    ForwardState s;
    s.w = Eigen::VectorXd::Zero(src.context_count());
    s.w(c) = 1.0;
    laws.push_back(block_law(src, s, ell));
  }
  // By the mediant inequality the log-ratio of an event lies between the
  // extreme singleton log-ratios, so singletons attain the supremum.
  double best = 0.0;
  for (std::size_t i = 0; i < live.size(); ++i)
    for (std::size_t j = i + 1; j < live.size(); ++j) {
      if (suffix_of(live[i], a, k) != suffix_of(live[j], a, k)) continue;
      for (std::size_t x = 0; x < laws[i].size(); ++x) best = std::max(best, log_ratio(laws[i][x], laws[j][x]));
    }
  return {best, true};
}

double phi_event_bruteforce(const LetterSource& src, int k, int ell) {
  if (src.variant() != SourceVariant::Iid && src.variant() != SourceVariant::Markov)
    throw Unsupported("phi_event_bruteforce: exact finite-memory source required");
  const int a = src.alphabet_size();
  const int blocks = static_cast<int>(std::pow(a, ell));
  if (blocks > 16) throw BudgetExceeded("phi_event_bruteforce: more than 16 blocks");
  const int m = src.order();
  const int kk = std::min(k, m);
  const auto live = live_contexts(src);
  std::vector<std::vector<double>> laws;
  for (int c : live) {
    ForwardState s;
    s.w = Eigen::VectorXd::Zero(src.context_count());
    s.w(c) = 1.0;
    laws.push_back(block_law(src, s, ell));
  }
  double best = 0.0;
  for (std::size_t i = 0; i < live.size(); ++i)
    for (std::size_t j = 0; j < live.size(); ++j) {
      if (i == j || suffix_of(live[i], a, kk) != suffix_of(live[j], a, kk)) continue;
      for (int mask = 1; mask < (1 << blocks); ++mask) {
        double p = 0.0, q = 0.0;
        for (int b = 0; b < blocks; ++b)
          if (mask & (1 << b)) {
            p += laws[i][static_cast<std::size_t>(b)];
            q += laws[j][static_cast<std::size_t>(b)];
          }
        best = std::max(best, log_ratio(p, q));
      }
    }
  return best;
}

double phi_sampled_lower(const LetterSource& src, int k, int ell, int pairs, int depth, std::uint64_t seed) {
  if (src.variant() != SourceVariant::GMeasure) throw Unsupported("phi_sampled_lower: gmeasure source required");
  if (depth <= k || depth < 1) throw std::invalid_argument("phi_sampled_lower: depth must exceed k");
  const int a = src.alphabet_size();
  double best = 0.0;
  for (int t = 0; t < pairs; ++t) {
    const auto x = src.sample(static_cast<std::size_t>(depth), mix_seed(seed, 2 * static_cast<std::uint64_t>(t)));
    auto xh = src.sample(static_cast<std::size_t>(depth), mix_seed(seed, 2 * static_cast<std::uint64_t>(t) + 1));
    std::copy(x.letters.end() - k, x.letters.end(), xh.letters.end() - k);
    PastContext px{x.letters}, pxh{xh.letters};
    const int blocks = static_cast<int>(std::pow(a, ell));
    for (int b = 0; b < blocks; ++b) {
      const auto block = decode(b, a, ell);
      best = std::max(best, log_ratio(src.cond_cylinder_prob(px, block), src.cond_cylinder_prob(pxh, block)));
    }
  }
  return best;
}

TelescopingResult telescoping_check(const LetterSource& src, const VariationProfile& profile, int k, int ell) {
  TelescopingResult r;
  const auto exact = phi_exact(src, k, ell);
  // a declared bound would make the check circular, so estimate instead
  r.phi_k_ell = exact.exact || src.variant() != SourceVariant::GMeasure
                    ? exact.value
                    : phi_sampled_lower(src, k, ell, 64, k + 24, mix_seed(0x7e1e5c09ULL, static_cast<std::uint64_t>(k * 64 + ell)));
  r.bound = 0.0;
  for (int m = 0; m < ell; ++m) r.bound += profile.phi(static_cast<std::size_t>(k + m));
  r.slack = std::isinf(r.bound) ? kInf : r.bound - r.phi_k_ell;
  r.ok = std::isinf(r.bound) || r.slack >= -1e-12;
  return r;
}

SandwichResult sandwich_check(const LetterSource& src, const std::vector<Block>& event, const PastContext& x,
                              const PastContext& xhat, int n, const VariationProfile& profile) {
  if (!src.is_exact()) throw Unsupported("sandwich_check: exact source required");
  if (n < 1 || n > x.declared_depth()) throw std::invalid_argument("sandwich_check: conditioning depth must be in [1, depth of x]");
  auto prob_from = [&](const ForwardState& start) {
    double p = 0.0;
    for (const auto& b : event) {
      ForwardState s = start;
      double q = 1.0;
      for (Letter l : b) q *= src.advance(s, l);
      p += q;
    }
    return p;
  };
  const double px = prob_from(src.state_after(x.letters));
  const double pxh = prob_from(src.state_after(xhat.letters));
  const std::vector<Letter> window(x.letters.end() - n, x.letters.end());
  const double pw = prob_from(src.state_after(window));
  SandwichResult r;
  r.log_c = profile.sum();
  r.log_ratio_pasts = log_ratio(px, pxh);
  r.log_ratio_window = log_ratio(pw, pxh);
  const double tol = 1e-12;
  r.ok = std::isinf(r.log_c) || (r.log_ratio_pasts <= r.log_c + tol && r.log_ratio_window <= r.log_c + tol);
  return r;
}

DecouplingResult decoupling_check(const LetterSource& src, const std::vector<CylinderEvent>& events,
                                  const VariationProfile& profile, std::size_t budget) {
  if (!src.is_exact()) throw Unsupported("decoupling_check: exact source required");
  if (events.empty()) throw std::invalid_argument("decoupling_check: no events");
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (events[i].blocks.empty()) throw std::invalid_argument("decoupling_check: empty event");
    for (const auto& b : events[i].blocks)
      if (static_cast<int>(b.size()) != events[i].length()) throw std::invalid_argument("decoupling_check: blocks of unequal length");
    if (i > 0 && events[i].start < events[i - 1].start + events[i - 1].length())
      throw std::invalid_argument("decoupling_check: intervals must be ordered and non-overlapping");
  }
  const int origin = events.front().start;
  const int end = events.back().start + events.back().length();
  const int width = end - origin;
  // owner[p] = (event index, offset) for window position p, or -1.
  std::vector<std::pair<int, int>> owner(static_cast<std::size_t>(width), {-1, 0});
  for (std::size_t e = 0; e < events.size(); ++e)
    for (int o = 0; o < events[e].length(); ++o) owner[static_cast<std::size_t>(events[e].start - origin + o)] = {static_cast<int>(e), o};

  DecouplingResult r;
  r.product = 1.0;
  for (const auto& ev : events) {
    double p = 0.0;
    for (const auto& b : ev.blocks) p += src.cylinder_prob(b);
    r.product *= p;
  }
  std::vector<Letter> cur;
  std::size_t visited = 0;
  const int a = src.alphabet_size();
  auto prefix_ok = [&](int e, int o) {
    const auto& ev = events[static_cast<std::size_t>(e)];
    const std::size_t first = cur.size() - static_cast<std::size_t>(o) - 1;
    for (const auto& b : ev.blocks)
      if (std::equal(b.begin(), b.begin() + o + 1, cur.begin() + static_cast<std::ptrdiff_t>(first))) return true;
    return false;
  };
  std::function<void(const ForwardState&, double)> rec = [&](const ForwardState& s, double p) {
    if (++visited > budget) throw BudgetExceeded("decoupling_check: window enumeration exceeds budget");
    const int pos = static_cast<int>(cur.size());
    if (pos == width) {
      r.joint += p;
      return;
    }
    for (int l = 0; l < a; ++l) {
      cur.push_back(static_cast<Letter>(l));
      const auto [e, o] = owner[static_cast<std::size_t>(pos)];
      if (e < 0 || prefix_ok(e, o)) {
        ForwardState next = s;
        const double q = src.advance(next, static_cast<Letter>(l));
        if (q > 0.0) rec(next, p * q);
      }
      cur.pop_back();
    }
  };
  rec(src.initial_state(), 1.0);
  r.bound = std::pow(c_phi(profile), static_cast<double>(events.size() - 1));
  r.ratio = r.product > 0.0 ? r.joint / r.product : 0.0;
  r.ok = r.ratio <= r.bound * (1.0 + 1e-12);
  return r;
}

bool Pattern::matches(const Letter* window) const {
  const auto m = static_cast<std::ptrdiff_t>(length());
  for (const auto& b : blocks)
    if (std::equal(b.begin(), b.end(), window, window + m)) return true;
  return false;
}

InsufficientOccurrences::InsufficientOccurrences(std::size_t f, std::size_t wanted)
    : std::runtime_error("pattern_occurrences: found " + std::to_string(f) + " completed occurrences, need " +
                         std::to_string(wanted)),
      found(f) {}

PatternStats pattern_occurrences(const LetterSeq& x, const Pattern& a, std::size_t n) {
  const int m = a.length();
  if (m < 1) throw std::invalid_argument("pattern_occurrences: empty pattern");
  for (const auto& b : a.blocks)
    if (static_cast<int>(b.size()) != m) throw std::invalid_argument("pattern_occurrences: blocks of unequal length");
  PatternStats st;
  st.pattern = a;
  st.sigma.reserve(n + 1);
  std::size_t k = 0;
  const std::size_t len = x.size();
  while (st.sigma.size() < n + 1 && k + static_cast<std::size_t>(m) <= len) {
    if (a.matches(x.letters.data() + k)) {
      st.sigma.push_back(static_cast<std::int64_t>(k) + m);
      k += static_cast<std::size_t>(m);
    } else {
      ++k;
    }
  }
  if (st.sigma.size() < n + 1) throw InsufficientOccurrences(st.sigma.size(), n + 1);
  st.gaps.resize(n);
  for (std::size_t i = 0; i < n; ++i) st.gaps[i] = st.sigma[i + 1] - st.sigma[i];
  return st;
}

double expected_gap(const LetterSource& src, const Pattern& a, std::size_t budget) {
  if (src.variant() != SourceVariant::Iid && src.variant() != SourceVariant::Markov)
    throw Unsupported("expected_gap: finite-memory exact source required, use expected_gap_mc");
  const int m = a.length();
  if (m < 1) throw std::invalid_argument("expected_gap: empty pattern");
  const int alpha = src.alphabet_size();
  const int r = src.order();
  const int L = std::max(m - 1, r);
  int ctxs = 1;
  for (int i = 0; i < L; ++i) ctxs *= alpha;
  const int fresh = std::max(m - 1, 0) + 1;  // s in 0..m-1
  const std::size_t n_states = static_cast<std::size_t>(fresh) * static_cast<std::size_t>(ctxs);
  if (n_states > budget || n_states > 20000) throw BudgetExceeded("expected_gap: state space exceeds budget");
  const int N = static_cast<int>(n_states);
  auto idx = [&](int s, int c) { return s * ctxs + c; };

  // Transient chain over (fresh letters read capped at m-1, last L letters).
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(N, N);
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(N, ctxs);  // absorption into final context
  std::vector<Letter> win(static_cast<std::size_t>(L + 1));
  for (int c = 0; c < ctxs; ++c) {
    const auto ctx = decode(c, alpha, L);
    const int rc = src.context_of(ctx.data() + (L - r), r);
    for (int l = 0; l < alpha; ++l) {
      const double p = src.transition()(rc, l);
      if (p == 0.0) continue;
      std::copy(ctx.begin(), ctx.end(), win.begin());
      win[static_cast<std::size_t>(L)] = static_cast<Letter>(l);
      const int next_c = L > 0 ? (c * alpha + l) % ctxs : 0;
      const bool hit = a.matches(win.data() + (L + 1 - m));
      for (int s = 0; s < fresh; ++s) {
        if (s >= m - 1 && hit) {
          R(idx(s, c), next_c) += p;
        } else {
          Q(idx(s, c), idx(std::min(s + 1, m - 1), next_c)) += p;
        }
      }
    }
  }
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(N, N);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(I - Q);
  const Eigen::VectorXd h = lu.solve(Eigen::VectorXd::Ones(N));
  Eigen::RowVectorXd start = Eigen::RowVectorXd::Zero(N);
  for (int c = 0; c < ctxs; ++c) {
    const double p = L > 0 ? src.cylinder_prob(decode(c, alpha, L)) : 1.0;
    start(idx(0, c)) = p;
  }
  // Law of the context at sigma_0, then the mean fresh search time from there.
  const Eigen::RowVectorXd visits = (I - Q).transpose().partialPivLu().solve(start.transpose()).transpose();
  const Eigen::RowVectorXd absorbed = visits * R;
  double mass = absorbed.sum();
  if (!(mass > 0.999999)) throw std::domain_error("expected_gap: pattern is not recurrent under the source");
  double e = 0.0;
  for (int c = 0; c < ctxs; ++c) e += absorbed(c) * h(idx(0, c));
  return e / mass;
}

double expected_gap_mc(const LetterSource& src, const Pattern& a, std::size_t n, std::uint64_t seed) {
  const auto x = src.sample(n, seed);
  std::size_t found = 0;
  const int m = a.length();
  std::size_t k = 0;
  while (k + static_cast<std::size_t>(m) <= x.size()) {
    if (a.matches(x.letters.data() + k)) {
      ++found;
      k += static_cast<std::size_t>(m);
    } else {
      ++k;
    }
  }
  if (found < 2) throw InsufficientOccurrences(found, 2);
  const auto st = pattern_occurrences(x, a, found - 1);
  return static_cast<double>(st.sigma.back() - st.sigma.front()) / static_cast<double>(found - 1);
}

RecurrenceResult recurrence_stat(const PatternStats& stats, double expected_gap_value, const VariationProfile& profile) {
  RecurrenceResult r;
  const auto n = stats.gaps.size();
  if (n == 0) throw std::invalid_argument("recurrence_stat: no gaps");
  double s = 0.0, s2 = 0.0;
  for (auto g : stats.gaps) {
    const double v = std::log(static_cast<double>(g));
    s += v;
    s2 += v * v;
  }
  r.lhs = s / static_cast<double>(n);
  const double var = n > 1 ? std::max(0.0, (s2 - s * r.lhs) / static_cast<double>(n - 1)) : 0.0;
  r.slack = 3.0 * std::sqrt(var / static_cast<double>(n));
  r.rhs = std::log(expected_gap_value) + profile.sum();
  r.ok = r.lhs <= r.rhs + r.slack + 1e-12;
  return r;
}

RecurrenceResult recurrence_stat(const PatternStats& stats, const LetterSource& src, const VariationProfile& profile) {
  return recurrence_stat(stats, expected_gap(src, stats.pattern), profile);
}

}  // namespace wordldp
