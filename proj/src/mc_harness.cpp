#include "wordldp/mc_harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

namespace wordldp {

namespace {

constexpr int kShards = 64;
constexpr double kZ = 1.96;
const double kNaN = std::numeric_limits<double>::quiet_NaN();

// Words of length <= lmax get dense ids; longer words share the id `other`.
struct WordCoder {
  int a = 2;
  int lmax = 1;
  std::vector<std::uint64_t> offset;
  std::uint64_t other = 0;

  WordCoder(int alphabet, int max_len) : a(alphabet), lmax(max_len) {
    offset.assign(static_cast<std::size_t>(lmax + 1), 0);
    std::uint64_t acc = 0, pw = 1;
    for (int l = 1; l <= lmax; ++l) {
      offset[static_cast<std::size_t>(l)] = acc;
      pw *= static_cast<std::uint64_t>(a);
      acc += pw;
      if (acc > (1ULL << 40)) throw BudgetExceeded("word coder: target words too long for dense ids");
    }
    other = acc;
  }
  std::uint64_t code(const Letter* p, int len) const {
    if (len > lmax) return other;
    std::uint64_t v = 0;
    for (int i = 0; i < len; ++i) v = v * static_cast<std::uint64_t>(a) + p[i];
    return offset[static_cast<std::size_t>(len)] + v;
  }
};

// Target k-block masses keyed by tuple code.
struct TargetTable {
  std::uint64_t base = 1;
  int k = 1;
  std::vector<std::pair<std::uint64_t, double>> entries;

  double lookup(std::uint64_t code) const {
    auto it = std::lower_bound(entries.begin(), entries.end(), std::make_pair(code, -kInf));
    return it != entries.end() && it->first == code ? it->second : 0.0;
  }
};

TargetTable build_table(const WordLaw& target, const WordCoder& coder, int k) {
  TargetTable t;
  t.k = k;
  t.base = coder.other + 1;
  double cap = 1.0;
  for (int i = 0; i < k; ++i) cap *= static_cast<double>(t.base);
  if (cap > 1.8e19) throw BudgetExceeded("target table: k-tuple codes overflow 64 bits");
  const auto block = model_block(target, k);
  for (const auto& [tuple, mass] : block.masses) {
    std::uint64_t code = 0, pw = 1;
    for (const auto& w : tuple) {
      code += coder.code(w.letters.data(), static_cast<int>(w.size())) * pw;
      pw *= t.base;
    }
    t.entries.emplace_back(code, mass);
  }
  std::sort(t.entries.begin(), t.entries.end());
  return t;
}

// Closed TV ball test for the periodized empirical k-block of word ids.
bool in_ball(const std::vector<std::uint64_t>& ids, const TargetTable& table, double eps, std::vector<std::uint64_t>& scratch) {
  const std::size_t n = ids.size();
  scratch.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t code = 0, pw = 1;
    for (int j = 0; j < table.k; ++j) {
      code += ids[(i + static_cast<std::size_t>(j)) % n] * pw;
      pw *= table.base;
    }
    scratch[i] = code;
  }
  std::sort(scratch.begin(), scratch.end());
  double diff = 0.0, covered = 0.0;
  const double inv = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scratch[j] == scratch[i]) ++j;
    const double q = table.lookup(scratch[i]);
    diff += std::abs(static_cast<double>(j - i) * inv - q);
    covered += q;
    i = j;
  }
  return 0.5 * (diff + std::max(0.0, 1.0 - covered)) <= eps + 1e-12;
}

// Draws the ids of n words under the annealed law.
class AnnealedDrawer {
 public:
  AnnealedDrawer(const ReferenceWordProcess& ref, const WordCoder& coder) : ref_(ref), coder_(coder) {
    const auto& src = ref.source;
    if (src.variant() == SourceVariant::Iid || src.variant() == SourceVariant::Markov) {
      fast_ = true;
      contexts_ = src.context_count();
      std::vector<double> init(src.context_stationary().data(), src.context_stationary().data() + contexts_);
      init_ = AliasTable(init);
      std::vector<double> row(static_cast<std::size_t>(src.alphabet_size()));
      for (int c = 0; c < contexts_; ++c) {
        for (int l = 0; l < src.alphabet_size(); ++l) row[static_cast<std::size_t>(l)] = src.transition()(c, l);
        rows_.emplace_back(row);
      }
    }
  }

  void draw(std::vector<std::uint64_t>& ids, int n, Rng& g) {
    ids.resize(static_cast<std::size_t>(n));
    const auto& src = ref_.source;
    if (!fast_) {
      std::vector<int> gaps(static_cast<std::size_t>(n));
      std::size_t total = 0;
      for (auto& t : gaps) {
        t = ref_.renewal.sample(g);
        total += static_cast<std::size_t>(t);
      }
      src.sample_into(letters_, total, g);
      std::size_t pos = 0;
      for (int i = 0; i < n; ++i) {
        ids[static_cast<std::size_t>(i)] = coder_.code(letters_.data() + pos, gaps[static_cast<std::size_t>(i)]);
        pos += static_cast<std::size_t>(gaps[static_cast<std::size_t>(i)]);
      }
      return;
    }
    const int a = src.alphabet_size();
    const int m = src.order();
    if (m == 0) {
      // letters of words that cannot match the target are never looked at
      for (int i = 0; i < n; ++i) {
        const int t = ref_.renewal.sample(g);
        if (t > coder_.lmax) {
          ids[static_cast<std::size_t>(i)] = coder_.other;
          continue;
        }
        buf_.resize(static_cast<std::size_t>(t));
        for (int j = 0; j < t; ++j) buf_[static_cast<std::size_t>(j)] = static_cast<Letter>(rows_[0].sample(g));
        ids[static_cast<std::size_t>(i)] = coder_.code(buf_.data(), t);
      }
      return;
    }
    int c = static_cast<int>(init_.sample(g));
    for (int i = 0; i < n; ++i) {
      const int t = ref_.renewal.sample(g);
      buf_.resize(static_cast<std::size_t>(t));
      for (int j = 0; j < t; ++j) {
        const auto l = static_cast<int>(rows_[static_cast<std::size_t>(c)].sample(g));
        buf_[static_cast<std::size_t>(j)] = static_cast<Letter>(l);
        c = (c * a + l) % contexts_;
      }
      ids[static_cast<std::size_t>(i)] = coder_.code(buf_.data(), t);
    }
  }

 private:
  const ReferenceWordProcess& ref_;
  const WordCoder& coder_;
  bool fast_ = false;
  int contexts_ = 1;
  AliasTable init_;
  std::vector<AliasTable> rows_;
  std::vector<Letter> buf_, letters_;
};

int worker_count(int requested) {
  if (requested > 0) return requested;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

// Runs `shard_fn(shard)` for every shard on a small thread pool and sums the hits.
template <class F>
std::uint64_t run_shards(int workers, F shard_fn) {
  std::vector<std::uint64_t> hits(kShards, 0);
  std::atomic<int> next{0};
  auto body = [&]() {
    for (int s = next++; s < kShards; s = next++) hits[static_cast<std::size_t>(s)] = shard_fn(s);
  };
  const int w = std::min(worker_count(workers), kShards);
  if (w <= 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < w; ++i) pool.emplace_back(body);
    for (auto& t : pool) t.join();
  }
  std::uint64_t total = 0;
  for (auto h : hits) total += h;
  return total;
}

std::uint64_t shard_samples(std::uint64_t total, int shard) {
  const std::uint64_t lo = total * static_cast<std::uint64_t>(shard) / kShards;
  const std::uint64_t hi = total * static_cast<std::uint64_t>(shard + 1) / kShards;
  return hi - lo;
}

DecayPoint make_point(int n, std::uint64_t hits, std::uint64_t samples) {
  DecayPoint p;
  p.n = n;
  p.hits = hits;
  p.samples = samples;
  const double s = static_cast<double>(samples);
  const double ph = static_cast<double>(hits) / s;
  const double z2 = kZ * kZ;
  const double denom = 1.0 + z2 / s;
  const double center = (ph + z2 / (2.0 * s)) / denom;
  const double half = kZ * std::sqrt(ph * (1.0 - ph) / s + z2 / (4.0 * s * s)) / denom;
  const double lo = std::max(0.0, center - half);
  const double hi = std::min(1.0, center + half);
  const double inv_n = 1.0 / static_cast<double>(n);
  p.rate_lower_bound = -std::log(hi) * inv_n;
  p.reported = hits >= 5;
  p.rate = p.reported ? -std::log(ph) * inv_n : kNaN;
  p.ci_lo = p.rate_lower_bound;
  p.ci_hi = lo > 0.0 ? -std::log(lo) * inv_n : kInf;
  return p;
}

double extrapolate(const std::vector<DecayPoint>& pts) {
  std::vector<std::pair<double, double>> xy;
  for (const auto& p : pts)
    if (p.reported) xy.emplace_back(1.0 / p.n, p.rate);
  if (xy.empty()) return kNaN;
  if (xy.size() == 1) return xy[0].second;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto [x, y] : xy) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = static_cast<double>(xy.size());
  const double b = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return (sy - b * sx) / m;
}

void validate(const LdpExperiment& exp) {
  if (!(exp.eps > 0.0)) throw std::invalid_argument("ldp experiment: eps must be positive");
  if (exp.k < 1) throw std::invalid_argument("ldp experiment: k must be >= 1");
  if (exp.n_grid.empty() || !std::is_sorted(exp.n_grid.begin(), exp.n_grid.end()) || exp.n_grid.front() < exp.k)
    throw std::invalid_argument("ldp experiment: n_grid must be increasing with entries >= k");
  if (exp.samples == 0) throw std::invalid_argument("ldp experiment: samples must be positive");
  if (exp.target.kind() == WordLaw::Kind::Reference && exp.target.max_length() > 16)
    throw std::invalid_argument("ldp experiment: reference target too long for dense word ids");
}

}  // namespace

DecayEstimate run_annealed(const LdpExperiment& exp) {
  validate(exp);
  const WordCoder coder(exp.ref.source.alphabet_size(), exp.target.max_length());
  const TargetTable table = build_table(exp.target, coder, exp.k);
  DecayEstimate est;
  for (std::size_t ni = 0; ni < exp.n_grid.size(); ++ni) {
    const int n = exp.n_grid[ni];
    const auto hits = run_shards(exp.workers, [&](int shard) {
      Rng g(mix_seed(exp.seed, ni * kShards + static_cast<std::uint64_t>(shard)));
      AnnealedDrawer drawer(exp.ref, coder);
      std::vector<std::uint64_t> ids, scratch;
      std::uint64_t h = 0;
      const auto count = shard_samples(exp.samples, shard);
      for (std::uint64_t s = 0; s < count; ++s) {
        drawer.draw(ids, n, g);
        h += in_ball(ids, table, exp.eps, scratch) ? 1 : 0;
      }
      return h;
    });
    est.points.push_back(make_point(n, hits, exp.samples));
  }
  est.extrapolated = extrapolate(est.points);
  return est;
}

DecayEstimate run_quenched_replica(const LdpExperiment& exp, int replica) {
  validate(exp);
  const WordCoder coder(exp.ref.source.alphabet_size(), exp.target.max_length());
  const TargetTable table = build_table(exp.target, coder, exp.k);
  const std::size_t len = static_cast<std::size_t>(exp.n_grid.back()) * static_cast<std::size_t>(exp.ref.renewal.cap());
  const LetterSeq x = exp.ref.source.sample(len, mix_seed(exp.x_seed, static_cast<std::uint64_t>(replica)));
  const std::uint64_t tau_seed = mix_seed(exp.seed, 0x5157ULL + static_cast<std::uint64_t>(replica));
  DecayEstimate est;
  est.replica = replica;
  for (std::size_t ni = 0; ni < exp.n_grid.size(); ++ni) {
    const int n = exp.n_grid[ni];
    const auto hits = run_shards(exp.workers, [&](int shard) {
      Rng g(mix_seed(tau_seed, ni * kShards + static_cast<std::uint64_t>(shard)));
      std::vector<std::uint64_t> ids(static_cast<std::size_t>(n)), scratch;
      std::uint64_t h = 0;
      const auto count = shard_samples(exp.samples, shard);
      for (std::uint64_t s = 0; s < count; ++s) {
        std::size_t t = 0;
        for (int i = 0; i < n; ++i) {
          const int gap = exp.ref.renewal.sample(g);
          ids[static_cast<std::size_t>(i)] = coder.code(x.letters.data() + t, gap);
          t += static_cast<std::size_t>(gap);
        }
        h += in_ball(ids, table, exp.eps, scratch) ? 1 : 0;
      }
      return h;
    });
    est.points.push_back(make_point(n, hits, exp.samples));
  }
  est.extrapolated = extrapolate(est.points);
  return est;
}

QuenchedResult run_quenched(const LdpExperiment& exp) {
  if (exp.replicas < 1) throw std::invalid_argument("ldp experiment: replicas must be >= 1");
  QuenchedResult r;
  for (int i = 0; i < exp.replicas; ++i) r.replicas.push_back(run_quenched_replica(exp, i));
  for (std::size_t ni = 0; ni < exp.n_grid.size(); ++ni) {
    double s = 0.0, s2 = 0.0;
    int c = 0;
    for (const auto& rep : r.replicas) {
      const auto& p = rep.points[ni];
      if (!p.reported) continue;
      s += p.rate;
      s2 += p.rate * p.rate;
      ++c;
    }
    r.mean_rate.push_back(c > 0 ? s / c : kNaN);
    r.sd_rate.push_back(c > 1 ? std::sqrt(std::max(0.0, (s2 - s * s / c) / (c - 1))) : kNaN);
  }
  return r;
}

BallInfimum ball_infimum_grid(const ReferenceWordProcess& ref, const VariationProfile& profile,
                              const std::function<WordLaw(double)>& family, const std::vector<double>& grid,
                              const WordLaw& target, int k, double eps, int n_max) {
  BallInfimum b;
  const auto tb = model_block(target, k);
  for (double t : grid) {
    const WordLaw q = family(t);
    if (tv_distance(model_block(q, k), tb) > eps + 1e-12) continue;
    ++b.members_in_ball;
    const double v = ann_rate(q, ref, profile, n_max);
    if (v < b.value) {
      b.value = v;
      b.argmin = t;
    }
  }
  return b;
}

double scgf_annealed(const ReferenceWordProcess& ref, const WordFunction& f, int n, std::size_t budget) {
  const auto& src = ref.source;
  if (src.variant() != SourceVariant::Iid && src.variant() != SourceVariant::Markov)
    throw Unsupported("scgf_annealed: Markov letter source required");
  if (n < 1) throw std::invalid_argument("scgf_annealed: n must be >= 1");
  const int a = src.alphabet_size();
  const int m = src.order();
  const int contexts = src.context_count();
  const int cap = ref.renewal.cap();
  Eigen::MatrixXd kmat = Eigen::MatrixXd::Zero(contexts, contexts);
  std::size_t visited = 0;
  bool all_zero = true;
  std::vector<Letter> buf;
  for (int c = 0; c < contexts; ++c) {
    if (src.context_stationary()(c) <= 0.0) continue;
    buf.assign(static_cast<std::size_t>(m), 0);
    for (int i = m - 1, cc = c; i >= 0; --i, cc /= a) buf[static_cast<std::size_t>(i)] = static_cast<Letter>(cc % a);
    ForwardState s0;
    s0.w = Eigen::VectorXd::Zero(contexts);
    s0.w(c) = 1.0;
    std::function<void(const ForwardState&, double)> rec = [&](const ForwardState& s, double p) {
      const int len = static_cast<int>(buf.size()) - m;
      if (len > 0 && ref.renewal.prob(static_cast<std::size_t>(len)) > 0.0) {
        if (++visited > budget) throw BudgetExceeded("scgf_annealed: state budget exceeded");
        const Word w(std::vector<Letter>(buf.begin() + m, buf.end()));
        const double fv = f(w);
        all_zero = all_zero && fv == 0.0;
        const int next = src.context_of(buf.data() + buf.size() - static_cast<std::size_t>(m), m);
        kmat(c, next) += p * ref.renewal.prob(static_cast<std::size_t>(len)) * std::exp(fv);
      }
      if (len == cap) return;
      for (int l = 0; l < a; ++l) {
        ForwardState s2 = s;
        const double q = src.advance(s2, static_cast<Letter>(l));
        if (q <= 0.0) continue;
        buf.push_back(static_cast<Letter>(l));
        rec(s2, p * q);
        buf.pop_back();
      }
    };
    rec(s0, 1.0);
  }
  // exp(0) summed over a probability law is exactly one
  if (all_zero) return 0.0;
  Eigen::RowVectorXd v = src.context_stationary().transpose();
  double logz = 0.0;
  for (int i = 0; i < n; ++i) {
    v = v * kmat;
    const double s = v.sum();
    logz += std::log(s);
    v /= s;
  }
  return logz / n;
}

namespace {

double golden_max(const std::function<double(double)>& g, double lo, double hi, double tol = 1e-7) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - r * (b - a), d = a + r * (b - a);
  double gc = g(c), gd = g(d);
  while (b - a > tol) {
    if (gc > gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - r * (b - a);
      gc = g(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + r * (b - a);
      gd = g(d);
    }
  }
  return std::max(gc, gd);
}

}  // namespace

DualReport legendre_dual(const ReferenceWordProcess& ref, const WordFunction& f, const VariationProfile& profile, int n) {
  DualReport r;
  r.scgf = scgf_annealed(ref, f, n);
  const WordLaw p = WordLaw::reference(ref);
  const auto p1 = p.one_word_marginal();
  std::vector<Word> words;
  std::vector<double> base, fv;
  for (std::size_t i = 0; i < p.support().size(); ++i) {
    if (p1[i] <= 0.0) continue;
    words.push_back(p.support()[i]);
    base.push_back(p1[i]);
    fv.push_back(f(p.support()[i]));
  }
  const std::size_t sz = words.size();
  // Q = P: rate exactly zero
  double at_p = 0.0;
  for (std::size_t i = 0; i < sz; ++i) at_p += base[i] * fv[i];
  const int m = ref.source.memory();
  const bool markov_family = m >= 0 && m <= 1;
  Eigen::MatrixXd pcond(static_cast<Eigen::Index>(sz), static_cast<Eigen::Index>(sz));
  if (markov_family) {
    for (std::size_t i = 0; i < sz; ++i) {
      const std::vector<Letter> past{words[i].letters.back()};
      for (std::size_t j = 0; j < sz; ++j)
        pcond(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = conditional_word_prob(ref, PastContext{past}, {words[j]});
    }
  }
  auto objective = [&](double t, double s) {
    double value;
    if (s == 0.0) {
      std::vector<double> q(sz);
      double z = 0.0;
      for (std::size_t i = 0; i < sz; ++i) z += (q[i] = base[i] * std::exp(t * fv[i]));
      double ef = 0.0;
      for (std::size_t i = 0; i < sz; ++i) {
        q[i] /= z;
        ef += q[i] * fv[i];
      }
      double tot = 0.0;
      for (double v : q) tot += v;
      for (double& v : q) v /= tot;
      value = ef - ann_rate(WordLaw::iid(words, q), ref, profile, 2);
    } else {
      Eigen::MatrixXd tm(static_cast<Eigen::Index>(sz), static_cast<Eigen::Index>(sz));
      for (std::size_t i = 0; i < sz; ++i) {
        double z = 0.0;
        for (std::size_t j = 0; j < sz; ++j) {
          const double w = ((1.0 - s) * base[j] + s * pcond(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) * std::exp(t * fv[j]);
          tm(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = w;
          z += w;
        }
        tm.row(static_cast<Eigen::Index>(i)) /= z;
      }
      const WordLaw q = WordLaw::markov(words, tm);
      const auto marg = q.one_word_marginal();
      double ef = 0.0;
      for (std::size_t i = 0; i < sz; ++i) ef += marg[static_cast<std::size_t>(q.word_index(words[i]))] * fv[i];
      value = ef - ann_rate(q, ref, profile, 2);
    }
    return value;
  };
  auto best_over_t = [&](double s) {
    double best_t = 0.0, best = -kInf;
    for (double t = -3.0; t <= 5.0 + 1e-9; t += 0.25) {
      const double v = objective(t, s);
      if (v > best) {
        best = v;
        best_t = t;
      }
    }
    return std::max(best, golden_max([&](double t) { return objective(t, s); }, best_t - 0.25, best_t + 0.25));
  };
  r.dual_iid = std::max(at_p, best_over_t(0.0));
  r.dual_markov = r.dual_iid;
  if (markov_family) {
    double best_s = 0.0, best = r.dual_iid;
    for (double s = 0.25; s <= 1.0 + 1e-9; s += 0.25) {
      const double v = best_over_t(s);
      if (v > best) {
        best = v;
        best_s = s;
      }
    }
    // refine the mixing weight around the best grid value
    const double lo = std::max(0.0, best_s - 0.25), hi = std::min(1.0, best_s + 0.25);
    best = std::max(best, golden_max(best_over_t, lo, hi, 1e-4));
    r.dual_markov = best;
  }
  r.gap_iid = r.scgf - r.dual_iid;
  r.gap = r.scgf - r.dual_markov;
  return r;
}

double legendre_gap(const ReferenceWordProcess& ref, const WordFunction& f, const VariationProfile& profile, int n) {
  return legendre_dual(ref, f, profile, n).gap;
}

std::vector<NamedWordFunction> cylinder_battery(int count, int alphabet, int cap, std::uint64_t seed) {
  std::vector<NamedWordFunction> out;
  out.push_back({"zero", [](const Word&) { return 0.0; }});
  Rng g(seed);
  for (int j = 0; j < count; ++j) {
    const double theta = 2.0 * uniform01(g) - 1.0;
    std::ostringstream name;
    if (j % 2 == 0) {
      const int plen = cap >= 2 && (g() & 1) ? 2 : 1;
      std::vector<Letter> prefix;
      for (int i = 0; i < plen; ++i) prefix.push_back(static_cast<Letter>(g() % static_cast<std::uint64_t>(alphabet)));
      name << "prefix(";
      for (int i = 0; i < plen; ++i) name << (i ? "," : "") << static_cast<int>(prefix[static_cast<std::size_t>(i)]);
      name << ")*" << theta;
      out.push_back({name.str(), [prefix, theta](const Word& w) {
                       return w.size() >= prefix.size() && std::equal(prefix.begin(), prefix.end(), w.letters.begin()) ? theta : 0.0;
                     }});
    } else {
      const int len = 1 + static_cast<int>(g() % static_cast<std::uint64_t>(cap));
      name << "length(" << len << ")*" << theta;
      out.push_back({name.str(), [len, theta](const Word& w) { return static_cast<int>(w.size()) == len ? theta : 0.0; }});
    }
  }
  return out;
}

}  // namespace wordldp
