#include "wordldp/ratefn.hpp"

#include <algorithm>
#include <map>
#include <numbers>

namespace wordldp {

double ann_rate(const WordLaw& q, const ReferenceWordProcess& ref, const VariationProfile& profile, int n_max,
                std::size_t budget) {
  return specific_rel_entropy(q, ref, profile, n_max, budget).value;
}

RateReport que_rate(const WordLaw& q, const ReferenceWordProcess& ref, const VariationProfile& profile, double alpha,
                    int n_max, int k_max, std::size_t budget) {
  if (!(alpha >= 1.0)) throw std::invalid_argument("que_rate: alpha must be >= 1");
  RateReport r;
  r.alpha = alpha;
  r.m_q = q.mean_length();
  r.ann = specific_rel_entropy(q, ref, profile, n_max, budget);
  r.psi = psi_rel_entropy(q, ref.source, profile, k_max, budget);
  r.i_ann = r.ann.value;
  r.psi_term = r.psi.value;
  if (alpha == 1.0) {
    r.i_que = r.i_ann;
  } else if (std::isinf(r.i_ann) || std::isinf(r.psi_term)) {
    r.i_que = kInf;
  } else {
    r.i_que = r.i_ann + (alpha - 1.0) * r.m_q * r.psi_term;
  }
  return r;
}

std::vector<TruncationRow> truncation_convergence(const WordLaw& q, const ReferenceWordProcess& ref,
                                                  const VariationProfile& profile, double alpha,
                                                  const std::vector<int>& tr_list, int n_max, int k_max,
                                                  std::size_t budget) {
  if (!std::is_sorted(tr_list.begin(), tr_list.end())) throw std::invalid_argument("truncation_convergence: tr_list must increase");
  std::vector<TruncationRow> rows;
  for (int tr : tr_list) {
    const WordLaw qt = truncate(q, TruncationMap{tr});
    const auto rep = que_rate(qt, ref, profile, alpha, n_max, k_max, budget);
    TruncationRow row;
    row.tr = tr;
    row.m_tr = rep.m_q;
    row.h_ann = rep.i_ann;
    row.psi_weighted = std::isinf(rep.psi_term) ? kInf : rep.m_q * rep.psi_term;
    rows.push_back(row);
  }
  return rows;
}

int Partition::cell(double x) const {
  if (!(x >= 0.0 && x < 1.0)) throw std::domain_error("coarsen: value outside [0,1)");
  auto it = std::upper_bound(boundaries.begin(), boundaries.end(), x);
  return static_cast<int>(it - boundaries.begin()) - 1;
}

bool Partition::refines(const Partition& coarser) const {
  for (double b : coarser.boundaries)
    if (!std::binary_search(boundaries.begin(), boundaries.end(), b)) return false;
  return true;
}

Partition Partition::dyadic(int c) {
  if (c < 1) throw std::invalid_argument("dyadic partition needs c >= 1");
  Partition p;
  for (int i = 0; i <= c; ++i) p.boundaries.push_back(static_cast<double>(i) / static_cast<double>(c));
  return p;
}

LetterSeq coarsen(const std::vector<double>& x, const Partition& p) {
  if (p.c() < 1 || p.c() > 256) throw std::invalid_argument("coarsen: partition must have 1..256 cells");
  LetterSeq out;
  out.letters.reserve(x.size());
  for (double v : x) out.letters.push_back(static_cast<Letter>(p.cell(v)));
  return out;
}

double CosineKernel::density(double y, double x) const {
  return 1.0 + eps * std::cos(2.0 * std::numbers::pi * (y - x));
}

Eigen::Matrix3d CosineKernel::cell_gram(double s, double t) const {
  const double w = 2.0 * std::numbers::pi;
  const double r2 = std::numbers::sqrt2;
  Eigen::Matrix3d g;
  const double d = t - s;
  const double c1 = r2 * (std::sin(w * t) - std::sin(w * s)) / w;
  const double s1 = r2 * (std::cos(w * s) - std::cos(w * t)) / w;
  const double sin2 = (std::sin(2 * w * t) - std::sin(2 * w * s)) / (2 * w);
  const double cos2 = (std::cos(2 * w * s) - std::cos(2 * w * t)) / (2 * w);
  g << d, c1, s1,
       c1, d + sin2, cos2,
       s1, cos2, d - sin2;
  return g;
}

LetterSource CosineKernel::coarse_source(const Partition& p) const {
  if (!(std::abs(eps) < 1.0)) throw std::invalid_argument("cosine kernel needs |eps| < 1");
  const int c = p.c();
  if (eps == 0.0) {
    std::vector<double> widths;
    for (int i = 0; i < c; ++i) widths.push_back(p.boundaries[static_cast<std::size_t>(i + 1)] - p.boundaries[static_cast<std::size_t>(i)]);
    return LetterSource::iid(widths);
  }
  const Eigen::Vector3d lambda(1.0, eps / 2.0, eps / 2.0);
  std::vector<Eigen::MatrixXd> mats;
  for (int i = 0; i < c; ++i) {
    const Eigen::Matrix3d g = cell_gram(p.boundaries[static_cast<std::size_t>(i)], p.boundaries[static_cast<std::size_t>(i + 1)]);
    mats.emplace_back(g * lambda.asDiagonal());
  }
  Eigen::RowVectorXd u = Eigen::RowVectorXd::Zero(3);
  u(0) = 1.0;
  Eigen::VectorXd e = Eigen::VectorXd::Zero(3);
  e(0) = 1.0;
  return LetterSource::linear_rep(u, std::move(mats), e);
}

VariationProfile CosineKernel::profile() const {
  VariationProfile p;
  p.phis = {std::log((1.0 + std::abs(eps)) / (1.0 - std::abs(eps))), 0.0};
  p.tail_bound = 0.0;
  return p;
}

std::vector<double> CosineKernel::sample(std::size_t n, std::uint64_t seed) const {
  Rng g(seed);
  std::vector<double> x(n);
  if (n == 0) return x;
  x[0] = uniform01(g);
  for (std::size_t i = 1; i < n; ++i) {
    for (;;) {
      const double y = uniform01(g);
      if (uniform01(g) * (1.0 + std::abs(eps)) < density(y, x[i - 1])) {
        x[i] = y;
        break;
      }
    }
  }
  return x;
}

WordLaw map_letters(const WordLaw& q, const std::vector<Letter>& map) {
  auto relabel = [&](const Word& w) {
    Word out = w;
    for (auto& l : out.letters) {
      if (l >= map.size()) throw std::out_of_range("map_letters: letter outside map");
      l = map[l];
    }
    return out;
  };
  switch (q.kind()) {
    case WordLaw::Kind::Iid: {
      std::map<Word, double> merged;
      const auto probs = q.one_word_marginal();
      for (std::size_t i = 0; i < q.support().size(); ++i) merged[relabel(q.support()[i])] += probs[i];
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
      for (int idx : q.hidden_labels()) labels.push_back(relabel(q.support()[static_cast<std::size_t>(idx)]));
      auto sorted = labels;
      std::sort(sorted.begin(), sorted.end());
      const bool distinct = std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
      if (distinct && q.kind() == WordLaw::Kind::Markov) return WordLaw::markov(std::move(labels), q.hidden_transition());
      return WordLaw::hidden(std::move(labels), q.hidden_transition());
    }
    case WordLaw::Kind::Reference:
      break;
  }
  throw Unsupported("map_letters: reference laws are relabelled through their letter source");
}

std::vector<Letter> cell_map(const Partition& fine, const Partition& coarse) {
  if (!fine.refines(coarse)) throw std::invalid_argument("coarse graining: partitions are not nested");
  std::vector<Letter> map;
  for (int i = 0; i < fine.c(); ++i) {
    const double mid = 0.5 * (fine.boundaries[static_cast<std::size_t>(i)] + fine.boundaries[static_cast<std::size_t>(i + 1)]);
    map.push_back(static_cast<Letter>(coarse.cell(mid)));
  }
  return map;
}

namespace {

void check_nested(const std::vector<Partition>& partitions) {
  if (partitions.empty()) throw std::invalid_argument("coarse graining: no partitions");
  for (std::size_t i = 1; i < partitions.size(); ++i)
    if (!partitions[i].refines(partitions[i - 1])) throw std::invalid_argument("coarse graining: partitions are not nested");
}

}  // namespace

std::vector<RateReport> coarse_rate_sequence(const CosineKernel& kernel, const RenewalLaw& rho, const WordLaw& q_fine,
                                             const std::vector<Partition>& partitions, double alpha, int n_max,
                                             int k_max, std::size_t budget) {
  check_nested(partitions);
  const Partition& finest = partitions.back();
  const auto profile = kernel.profile();
  std::vector<RateReport> out;
  for (const auto& p : partitions) {
    const WordLaw qc = map_letters(q_fine, cell_map(finest, p));
    const ReferenceWordProcess ref{kernel.coarse_source(p), rho};
    out.push_back(que_rate(qc, ref, profile, alpha, n_max, k_max, budget));
  }
  return out;
}

std::vector<RateReport> coarse_reference_rates(const CosineKernel& kernel, const RenewalLaw& rho,
                                               const std::vector<Partition>& partitions, double alpha, int n_max,
                                               int k_max, std::size_t budget) {
  check_nested(partitions);
  const auto profile = kernel.profile();
  std::vector<RateReport> out;
  for (const auto& p : partitions) {
    const ReferenceWordProcess ref{kernel.coarse_source(p), rho};
    out.push_back(que_rate(WordLaw::reference(ref), ref, profile, alpha, n_max, k_max, budget));
  }
  return out;
}

}  // namespace wordldp
