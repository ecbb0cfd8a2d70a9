#include "wordldp/sources.hpp"

#include <algorithm>
#include <numeric>

namespace wordldp {

namespace {

constexpr double kRowTol = 1e-12;
constexpr double kBalanceTol = 1e-10;

void check_stochastic_rows(const Eigen::MatrixXd& t, const char* what) {
  for (Eigen::Index r = 0; r < t.rows(); ++r) {
    double s = 0.0;
    for (Eigen::Index c = 0; c < t.cols(); ++c) {
      if (!(t(r, c) >= 0.0)) throw std::invalid_argument(std::string(what) + ": negative or NaN entry");
      s += t(r, c);
    }
    if (std::abs(s - 1.0) > kRowTol) throw std::invalid_argument(std::string(what) + ": row does not sum to 1");
  }
}

std::vector<double> normalized(std::vector<double> p, const char* what) {
  double s = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(what) + ": invalid weight");
    s += v;
  }
  if (!(s > 0.0)) throw std::invalid_argument(std::string(what) + ": weights sum to zero");
  for (double& v : p) v /= s;
  return p;
}

int ipow(int b, int e) {
  long long r = 1;
  for (int i = 0; i < e; ++i) {
    r *= b;
    if (r > (1LL << 30)) throw BudgetExceeded("alphabet^order too large");
  }
  return static_cast<int>(r);
}

}  // namespace

Eigen::VectorXd stationary_vector(const Eigen::MatrixXd& t) {
  const Eigen::Index n = t.rows();
  if (n != t.cols()) throw std::invalid_argument("stationary_vector: matrix must be square");
  Eigen::VectorXd pi;
  if (n <= 64) {
    Eigen::MatrixXd a = t.transpose() - Eigen::MatrixXd::Identity(n, n);
    a.row(n - 1).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    b(n - 1) = 1.0;
    pi = a.fullPivLu().solve(b);
  } else {
    pi = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    for (int it = 0; it < 1000000; ++it) {
      // lazy step keeps the fixed points and removes periodicity
      Eigen::VectorXd next = 0.5 * (pi + t.transpose() * pi);
      next /= next.sum();
      const double diff = (next - pi).lpNorm<1>();
      pi = next;
      if (diff < 1e-12) break;
    }
  }
  for (Eigen::Index i = 0; i < n; ++i)
    if (pi(i) < 0.0 && pi(i) > -1e-14) pi(i) = 0.0;
  if ((pi.array() < 0.0).any()) throw std::invalid_argument("stationary vector is not unique");
  pi /= pi.sum();
  if ((t.transpose() * pi - pi).lpNorm<Eigen::Infinity>() > kBalanceTol)
    throw std::invalid_argument("stationary vector fails the balance equation");
  return pi;
}

LetterSource LetterSource::iid(std::vector<double> p) {
  if (p.size() < 2 || p.size() > 256) throw std::invalid_argument("iid: alphabet size must be in [2,256]");
  double s = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) throw std::invalid_argument("iid: negative probability");
    s += v;
  }
  if (std::abs(s - 1.0) > kRowTol) throw std::invalid_argument("iid: probabilities do not sum to 1");
  LetterSource src;
  src.variant_ = SourceVariant::Iid;
  src.alphabet_ = static_cast<int>(p.size());
  src.order_ = 0;
  src.transition_ = Eigen::Map<Eigen::RowVectorXd>(p.data(), static_cast<Eigen::Index>(p.size()));
  src.stationary_ = Eigen::VectorXd::Ones(1);
  return src;
}

LetterSource LetterSource::markov(int alphabet, int order, Eigen::MatrixXd transition) {
  if (alphabet < 2 || alphabet > 256) throw std::invalid_argument("markov: alphabet size must be in [2,256]");
  if (order < 0) throw std::invalid_argument("markov: negative order");
  const int contexts = ipow(alphabet, order);
  if (transition.rows() != contexts || transition.cols() != alphabet)
    throw std::invalid_argument("markov: transition must have alphabet^order rows and alphabet columns");
  check_stochastic_rows(transition, "markov");
  LetterSource src;
  src.variant_ = SourceVariant::Markov;
  src.alphabet_ = alphabet;
  src.order_ = order;
  src.transition_ = std::move(transition);
  if (order == 0) {
    src.stationary_ = Eigen::VectorXd::Ones(1);
  } else {
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(contexts, contexts);
    for (int c = 0; c < contexts; ++c)
      for (int a = 0; a < alphabet; ++a) k(c, (c * alphabet + a) % contexts) += src.transition_(c, a);
    src.stationary_ = stationary_vector(k);
  }
  return src;
}

LetterSource LetterSource::gmeasure(Eigen::MatrixXd base, double amplitude, double ratio,
                                    Eigen::MatrixXd signs, int sampling_depth) {
  const auto a = base.rows();
  if (a < 2 || base.cols() != a) throw std::invalid_argument("gmeasure: base kernel must be square, size >= 2");
  if (signs.rows() != a || signs.cols() != a) throw std::invalid_argument("gmeasure: signs must match base");
  if ((signs.array().abs() > 1.0).any()) throw std::invalid_argument("gmeasure: signs must lie in [-1,1]");
  if (!(amplitude >= 0.0) || !(ratio >= 0.0 && ratio < 1.0))
    throw std::invalid_argument("gmeasure: need amplitude >= 0 and ratio in [0,1) for a finite schedule");
  if (sampling_depth < 1) throw std::invalid_argument("gmeasure: sampling depth must be positive");
  check_stochastic_rows(base, "gmeasure base");
  LetterSource src;
  src.variant_ = SourceVariant::GMeasure;
  src.alphabet_ = static_cast<int>(a);
  src.order_ = 1;
  src.base_ = std::move(base);
  src.signs_ = std::move(signs);
  src.amp_ = amplitude;
  src.ratio_ = ratio;
  src.sampling_depth_ = sampling_depth;
  double var = 0.0;
  for (Eigen::Index l = 0; l < a; ++l)
    for (Eigen::Index x = 0; x < a; ++x)
      for (Eigen::Index y = 0; y < a; ++y) {
        const double p = src.base_(x, l), q = src.base_(y, l);
        if (p == q) continue;
        if (p == 0.0 || q == 0.0) {
          var = kInf;
        } else {
          var = std::max(var, std::abs(std::log(p) - std::log(q)));
        }
      }
  src.base_var_ = var;
  src.transition_ = src.base_;
  src.stationary_ = stationary_vector(src.base_);
  return src;
}

LetterSource LetterSource::renewal_age(std::vector<double> p) {
  if (p.empty()) throw std::invalid_argument("renewal_age: empty length law");
  LetterSource src;
  src.variant_ = SourceVariant::RenewalAge;
  src.alphabet_ = 2;
  src.age_p_ = normalized(std::move(p), "renewal_age");
  return src;
}

LetterSource LetterSource::rwrs(double scenery_p) {
  if (!(scenery_p > 0.0 && scenery_p < 1.0)) throw std::invalid_argument("rwrs: scenery probability must be in (0,1)");
  LetterSource src;
  src.variant_ = SourceVariant::Rwrs;
  src.alphabet_ = 4;
  src.scenery_p_ = scenery_p;
  return src;
}

LetterSource LetterSource::linear_rep(Eigen::RowVectorXd u, std::vector<Eigen::MatrixXd> mats, Eigen::VectorXd e) {
  if (mats.size() < 2 || mats.size() > 256) throw std::invalid_argument("linear_rep: alphabet size must be in [2,256]");
  const auto d = u.size();
  if (e.size() != d) throw std::invalid_argument("linear_rep: dimension mismatch");
  Eigen::MatrixXd total = Eigen::MatrixXd::Zero(d, d);
  for (const auto& m : mats) {
    if (m.rows() != d || m.cols() != d) throw std::invalid_argument("linear_rep: dimension mismatch");
    total += m;
  }
  if (std::abs(u.dot(e) - 1.0) > 1e-12) throw std::invalid_argument("linear_rep: u e must equal 1");
  if ((u * total - u).lpNorm<Eigen::Infinity>() > kBalanceTol || (total * e - e).lpNorm<Eigen::Infinity>() > kBalanceTol)
    throw std::invalid_argument("linear_rep: representation is not stationary");
  LetterSource src;
  src.variant_ = SourceVariant::LinearRep;
  src.alphabet_ = static_cast<int>(mats.size());
  src.rep_u_ = std::move(u);
  src.rep_m_ = std::move(mats);
  src.rep_e_ = std::move(e);
  return src;
}

std::string LetterSource::variant_name() const {
  switch (variant_) {
    case SourceVariant::Iid: return "iid";
    case SourceVariant::Markov: return "markov";
    case SourceVariant::GMeasure: return "gmeasure";
    case SourceVariant::RenewalAge: return "renewal_age";
    case SourceVariant::Rwrs: return "rwrs";
    case SourceVariant::LinearRep: return "linear_rep";
  }
  return "unknown";
}

bool LetterSource::is_exact() const {
  return variant_ == SourceVariant::Iid || variant_ == SourceVariant::Markov || variant_ == SourceVariant::LinearRep;
}

int LetterSource::memory() const {
  if (variant_ == SourceVariant::Iid) return 0;
  if (variant_ == SourceVariant::Markov) return order_;
  return -1;
}

int LetterSource::context_of(const Letter* last, int m) const {
  int c = 0;
  for (int i = 0; i < m; ++i) c = c * alphabet_ + last[i];
  return c;
}

void LetterSource::gmeasure_probs(const Letter* past_end, int depth, double* out) const {
  const Letter x0 = past_end[-1];
  double total = 0.0;
  for (int l = 0; l < alphabet_; ++l) {
    double g = 0.0, aj = amp_;
    for (int j = 1; j < depth; ++j) {
      g += aj * signs_(past_end[-1 - j], l);
      aj *= ratio_;
    }
    out[l] = base_(x0, l) * std::exp(g);
    total += out[l];
  }
  for (int l = 0; l < alphabet_; ++l) out[l] /= total;
}

double LetterSource::declared_phi(int n) const {
  if (variant_ == SourceVariant::Iid) return 0.0;
  if (variant_ == SourceVariant::GMeasure) {
    if (n == 0) return base_var_ + 4.0 * amp_ / (1.0 - ratio_);
    return 4.0 * amp_ * std::pow(ratio_, n - 1) / (1.0 - ratio_);
  }
  throw Unsupported("declared_phi: only GMeasure carries a declared schedule");
}

double LetterSource::declared_phi_tail(int n) const {
  if (variant_ == SourceVariant::Iid) return 0.0;
  if (variant_ != SourceVariant::GMeasure) throw Unsupported("declared_phi_tail: only GMeasure carries a declared schedule");
  const double geo = 4.0 * amp_ / ((1.0 - ratio_) * (1.0 - ratio_));
  if (n == 0) return declared_phi(0) + geo;
  return geo * std::pow(ratio_, n - 1);
}

void LetterSource::sample_into(std::vector<Letter>& out, std::size_t n, Rng& g) const {
  out.resize(n);
  if (n == 0) return;
  switch (variant_) {
    case SourceVariant::Iid:
    case SourceVariant::Markov: {
      const int m = order_;
      const int contexts = context_count();
      std::vector<double> w(static_cast<std::size_t>(contexts));
      for (int c = 0; c < contexts; ++c) w[static_cast<std::size_t>(c)] = stationary_(c);
      AliasTable init(w);
      std::vector<AliasTable> rows;
      rows.reserve(static_cast<std::size_t>(contexts));
      std::vector<double> row(static_cast<std::size_t>(alphabet_));
      for (int c = 0; c < contexts; ++c) {
        // unreachable contexts may have all-zero stationary mass but valid rows
        for (int a = 0; a < alphabet_; ++a) row[static_cast<std::size_t>(a)] = transition_(c, a);
        rows.emplace_back(row);
      }
      int c = static_cast<int>(init.sample(g));
      std::size_t pos = 0;
      if (m > 0) {
        std::vector<Letter> first(static_cast<std::size_t>(m));
        int cc = c;
        for (int i = m - 1; i >= 0; --i) {
          first[static_cast<std::size_t>(i)] = static_cast<Letter>(cc % alphabet_);
          cc /= alphabet_;
        }
        for (; pos < n && pos < static_cast<std::size_t>(m); ++pos) out[pos] = first[pos];
      }
      for (; pos < n; ++pos) {
        const auto a = static_cast<int>(rows[static_cast<std::size_t>(c)].sample(g));
        out[pos] = static_cast<Letter>(a);
        if (contexts > 1) c = (c * alphabet_ + a) % contexts;
      }
      return;
    }
    case SourceVariant::GMeasure: {
      const std::size_t burn = static_cast<std::size_t>(std::max(256, 4 * sampling_depth_));
      std::vector<Letter> buf(burn + n);
      std::vector<double> w(static_cast<std::size_t>(alphabet_));
      for (int a = 0; a < alphabet_; ++a) w[static_cast<std::size_t>(a)] = stationary_(a);
      buf[0] = static_cast<Letter>(AliasTable(w).sample(g));
      for (std::size_t t = 1; t < buf.size(); ++t) {
        const int depth = static_cast<int>(std::min<std::size_t>(t, static_cast<std::size_t>(sampling_depth_)));
        gmeasure_probs(buf.data() + t, depth, w.data());
        double u = uniform01(g), acc = 0.0;
        int pick = alphabet_ - 1;
        for (int a = 0; a < alphabet_; ++a) {
          acc += w[static_cast<std::size_t>(a)];
          if (u < acc) {
            pick = a;
            break;
          }
        }
        buf[t] = static_cast<Letter>(pick);
      }
      std::copy(buf.begin() + static_cast<std::ptrdiff_t>(burn), buf.end(), out.begin());
      return;
    }
    case SourceVariant::RenewalAge: {
      const std::size_t cap = age_p_.size();
      std::vector<double> tail(cap);
      double s = 0.0;
      for (std::size_t i = cap; i-- > 0;) {
        s += age_p_[i];
        tail[i] = s;
      }
      std::size_t age = AliasTable(tail).sample(g);
      for (std::size_t t = 0; t < n; ++t) {
        out[t] = age == 0 ? 1 : 0;
        const double renew = age_p_[age] / tail[age];
        if (age + 1 >= cap || uniform01(g) < renew) {
          age = 0;
        } else {
          ++age;
        }
      }
      return;
    }
    case SourceVariant::Rwrs: {
      std::vector<std::int8_t> scenery(2 * n + 3, -1);
      std::int64_t pos = static_cast<std::int64_t>(n) + 1;
      for (std::size_t t = 0; t < n; ++t) {
        const bool up = (g() >> 63) != 0;
        pos += up ? 1 : -1;
        auto& site = scenery[static_cast<std::size_t>(pos)];
        if (site < 0) site = uniform01(g) < scenery_p_ ? 1 : 0;
        out[t] = static_cast<Letter>(2 * (up ? 1 : 0) + site);
      }
      return;
    }
    case SourceVariant::LinearRep: {
      ForwardState s = initial_state();
      for (std::size_t t = 0; t < n; ++t) {
        auto probs = next_probs(s);
        double u = uniform01(g), acc = 0.0;
        int pick = alphabet_ - 1;
        for (int a = 0; a < alphabet_; ++a) {
          acc += probs[static_cast<std::size_t>(a)];
          if (u < acc) {
            pick = a;
            break;
          }
        }
        out[t] = static_cast<Letter>(pick);
        advance(s, out[t]);
      }
      return;
    }
  }
}

LetterSeq LetterSource::sample(std::size_t n, std::uint64_t seed) const {
  if (n < 1) throw std::invalid_argument("sample: n must be >= 1");
  Rng g(seed);
  LetterSeq x;
  sample_into(x.letters, n, g);
  return x;
}

double LetterSource::cond_prob(const PastContext& past, Letter a) const {
  if (a >= alphabet_) throw std::out_of_range("cond_prob: letter outside alphabet");
  const int depth = past.declared_depth();
  switch (variant_) {
    case SourceVariant::Iid:
      return transition_(0, a);
    case SourceVariant::Markov:
      if (depth < order_) throw std::invalid_argument("cond_prob: past shorter than the chain order");
      return transition_(context_of(past.letters.data() + depth - order_, order_), a);
    case SourceVariant::GMeasure: {
      if (depth < 1) throw std::invalid_argument("cond_prob: gmeasure needs a past of depth >= 1");
      std::vector<double> w(static_cast<std::size_t>(alphabet_));
      gmeasure_probs(past.letters.data() + depth, depth, w.data());
      return w[a];
    }
    case SourceVariant::LinearRep: {
      ForwardState s = state_after(past.letters);
      return advance(s, a);
    }
    case SourceVariant::RenewalAge:
      throw Unsupported("cond_prob: kernel unbounded for the renewal-age source (phi(1) is infinite)");
    case SourceVariant::Rwrs:
      throw Unsupported("cond_prob: kernel unavailable for random walk in random scenery");
  }
  return 0.0;
}

double LetterSource::cond_prob_log_error(int depth) const {
  switch (variant_) {
    case SourceVariant::Iid: return 0.0;
    case SourceVariant::Markov: return depth >= order_ ? 0.0 : kInf;
    case SourceVariant::GMeasure: return depth >= 1 ? declared_phi_tail(depth) : kInf;
    default: return kInf;
  }
}

ForwardState LetterSource::initial_state() const {
  ForwardState s;
  switch (variant_) {
    case SourceVariant::Iid:
    case SourceVariant::Markov:
      s.w = stationary_;
      return s;
    case SourceVariant::LinearRep:
      s.w = rep_u_.transpose();
      return s;
    default:
      throw Unsupported("exact probabilities unsupported for " + variant_name() + ", use a Monte Carlo estimate");
  }
}

ForwardState LetterSource::state_after(const std::vector<Letter>& past) const {
  const int depth = static_cast<int>(past.size());
  if ((variant_ == SourceVariant::Iid || variant_ == SourceVariant::Markov) && depth >= order_) {
    ForwardState s;
    s.w = Eigen::VectorXd::Zero(context_count());
    s.w(context_of(past.data() + depth - order_, order_)) = 1.0;
    return s;
  }
  ForwardState s = initial_state();
  for (Letter a : past) {
    if (advance(s, a) <= 0.0) throw std::invalid_argument("state_after: past has probability zero");
  }
  return s;
}

double LetterSource::advance(ForwardState& s, Letter a) const {
  if (a >= alphabet_) throw std::out_of_range("advance: letter outside alphabet");
  if (variant_ == SourceVariant::LinearRep) {
    Eigen::VectorXd next = rep_m_[a].transpose() * s.w;
    const double p = next.dot(rep_e_);
    if (p > 0.0) next /= p;
    s.w = std::move(next);
    return std::max(p, 0.0);
  }
  const int contexts = context_count();
  if (contexts == 1) return transition_(0, a);
  double p = 0.0;
  Eigen::VectorXd next = Eigen::VectorXd::Zero(contexts);
  for (int c = 0; c < contexts; ++c) {
    const double wc = s.w(c);
    if (wc == 0.0) continue;
    const double q = wc * transition_(c, a);
    p += q;
    next((c * alphabet_ + a) % contexts) += q;
  }
  if (p > 0.0) next /= p;
  s.w = std::move(next);
  return p;
}

std::vector<double> LetterSource::next_probs(const ForwardState& s) const {
  std::vector<double> out(static_cast<std::size_t>(alphabet_), 0.0);
  if (variant_ == SourceVariant::LinearRep) {
    for (int a = 0; a < alphabet_; ++a)
      out[static_cast<std::size_t>(a)] = std::max(0.0, (rep_m_[static_cast<std::size_t>(a)].transpose() * s.w).dot(rep_e_));
    return out;
  }
  for (int c = 0; c < context_count(); ++c) {
    if (s.w(c) == 0.0) continue;
    for (int a = 0; a < alphabet_; ++a) out[static_cast<std::size_t>(a)] += s.w(c) * transition_(c, a);
  }
  return out;
}

double LetterSource::cylinder_prob(const std::vector<Letter>& block) const {
  if (block.empty()) throw std::invalid_argument("cylinder_prob: empty block");
  if (variant_ == SourceVariant::GMeasure || variant_ == SourceVariant::RenewalAge || variant_ == SourceVariant::Rwrs)
    throw Unsupported("cylinder_prob unsupported for " + variant_name() + ", use a Monte Carlo estimate");
  ForwardState s = initial_state();
  double p = 1.0;
  for (Letter a : block) {
    p *= advance(s, a);
    if (p == 0.0) return 0.0;
  }
  return p;
}

double LetterSource::log_cylinder_prob(const std::vector<Letter>& block) const {
  if (!is_exact()) throw Unsupported("log_cylinder_prob unsupported for " + variant_name());
  ForwardState s = initial_state();
  double lp = 0.0;
  for (Letter a : block) {
    const double q = advance(s, a);
    if (q <= 0.0) return -kInf;
    lp += std::log(q);
  }
  return lp;
}

double LetterSource::cond_cylinder_prob(const PastContext& past, const std::vector<Letter>& block) const {
  if (variant_ == SourceVariant::GMeasure) {
    PastContext ext = past;
    double p = 1.0;
    for (Letter a : block) {
      p *= cond_prob(ext, a);
      ext.letters.push_back(a);
    }
    return p;
  }
  if (variant_ == SourceVariant::Markov && past.declared_depth() < order_)
    throw std::invalid_argument("cond_cylinder_prob: past shorter than the chain order");
  ForwardState s = state_after(past.letters);
  double p = 1.0;
  for (Letter a : block) {
    p *= advance(s, a);
    if (p == 0.0) return 0.0;
  }
  return p;
}

double iia_phi_lower_bound(const std::vector<double>& p, int n) {
  if (n < 0) throw std::invalid_argument("iia_phi_lower_bound: n must be >= 0");
  if (p.empty() || !(p[0] > 0.0)) throw std::invalid_argument("iia_phi_lower_bound: need p(1) > 0");
  const auto idx = static_cast<std::size_t>(n);
  if (idx >= p.size() || !(p[idx] > 0.0))
    throw std::domain_error("iia_phi_lower_bound: p(n+1) = 0, bound undefined at this n");
  double tail = 0.0;
  for (std::size_t i = p.size(); i-- > idx;) tail += p[i];
  return std::log(p[0]) - std::log(p[idx] / tail);
}

}  // namespace wordldp
