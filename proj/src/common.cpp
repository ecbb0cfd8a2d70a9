#include "wordldp/common.hpp"

namespace wordldp {

AliasTable::AliasTable(const std::vector<double>& weights) {
  const std::size_t n = weights.size();
  if (n == 0) throw std::invalid_argument("alias table needs at least one weight");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("alias weights must be finite and nonnegative");
    total += w;
  }
  if (!(total > 0.0)) throw std::invalid_argument("alias weights sum to zero");
  prob_.assign(n, 0.0);
  alias_.assign(n, 0);
  std::vector<double> scaled(n);
  std::vector<std::uint32_t> small, large;
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = weights[i] * static_cast<double>(n) / total;
    (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
  }
  while (!small.empty() && !large.empty()) {
    auto s = small.back();
    small.pop_back();
    auto l = large.back();
    prob_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  for (auto i : large) prob_[i] = 1.0;
  for (auto i : small) prob_[i] = 1.0;
  // alias of a full bucket is itself, so a zero-weight entry can never be drawn
  for (std::size_t i = 0; i < n; ++i)
    if (prob_[i] >= 1.0) alias_[i] = static_cast<std::uint32_t>(i);
}

std::size_t AliasTable::sample(Rng& g) const {
  const std::uint64_t r = g();
  const std::size_t i = static_cast<std::size_t>((r >> 32) * prob_.size() >> 32);
  const double u = static_cast<double>(r & 0xffffffffULL) * 0x1.0p-32;
  return u < prob_[i] ? i : alias_[i];
}

}  // namespace wordldp
