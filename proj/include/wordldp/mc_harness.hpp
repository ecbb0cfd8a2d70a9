#pragma once

#include <functional>
#include <string>
#include <vector>

#include "wordldp/ratefn.hpp"

namespace wordldp {

enum class ExperimentMode { Annealed, Quenched };

struct LdpExperiment {
  ReferenceWordProcess ref;
  WordLaw target;
  int k = 2;
  double eps = 0.1;
  std::vector<int> n_grid;
  std::uint64_t samples = 100'000;
  std::uint64_t seed = 1;
  ExperimentMode mode = ExperimentMode::Annealed;
  std::uint64_t x_seed = 2;
  int replicas = 5;
  int workers = 0;  // 0: hardware concurrency
};

struct DecayPoint {
  int n = 0;
  std::uint64_t hits = 0;
  std::uint64_t samples = 0;
  bool reported = false;  // hits >= 5
  double rate = 0.0;      // -(1/n) log(hits/samples), NaN unless reported
  double ci_lo = 0.0;     // from the Wilson upper probability
  double ci_hi = 0.0;     // from the Wilson lower probability (inf when it is 0)
  double rate_lower_bound = 0.0;  // always valid: -(1/n) log(Wilson upper)
};

struct DecayEstimate {
  std::vector<DecayPoint> points;
  double extrapolated = 0.0;  // intercept of rate against 1/n over reported points, NaN if none
  int replica = -1;
};

DecayEstimate run_annealed(const LdpExperiment& exp);

struct QuenchedResult {
  std::vector<DecayEstimate> replicas;
  std::vector<double> mean_rate;  // per n over replicas with reported rates
  std::vector<double> sd_rate;
};
QuenchedResult run_quenched(const LdpExperiment& exp);

// One frozen letter sequence, tau resampled. Exposed for replica-level jobs.
DecayEstimate run_quenched_replica(const LdpExperiment& exp, int replica);

// Inf of I^ann over the members of a parametric family whose k-block law lies
// in the TV ball around the target.
struct BallInfimum {
  double value = kInf;
  double argmin = 0.0;
  int members_in_ball = 0;
};
BallInfimum ball_infimum_grid(const ReferenceWordProcess& ref, const VariationProfile& profile,
                              const std::function<WordLaw(double)>& family, const std::vector<double>& grid,
                              const WordLaw& target, int k, double eps, int n_max);

using WordFunction = std::function<double(const Word&)>;

// (1/n) log E exp(sum_{i<=n} f(Y_i)) by transfer-operator powers over letter contexts.
double scgf_annealed(const ReferenceWordProcess& ref, const WordFunction& f, int n, std::size_t budget = 2'000'000);

struct DualReport {
  double scgf = 0.0;
  double dual_iid = 0.0;     // sup over the i.i.d. tilt family (and Q = P)
  double dual_markov = 0.0;  // sup over the Markov family, which contains the i.i.d. one
  double gap_iid = 0.0;
  double gap = 0.0;
};
DualReport legendre_dual(const ReferenceWordProcess& ref, const WordFunction& f, const VariationProfile& profile, int n);
double legendre_gap(const ReferenceWordProcess& ref, const WordFunction& f, const VariationProfile& profile, int n);

struct NamedWordFunction {
  std::string name;
  WordFunction f;
};
// f = 0, then `count` random cylinder indicators theta * 1{w starts with a prefix}
// and length indicators theta * 1{|w| = l}, theta uniform on [-1, 1].
std::vector<NamedWordFunction> cylinder_battery(int count, int alphabet, int cap, std::uint64_t seed);

}  // namespace wordldp
