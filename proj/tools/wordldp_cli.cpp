// wordldp: file-driven front end over the library. Every run writes
// <out>/<subcommand>-<run id>/ with manifest.json plus CSV/JSON results.

#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "wordldp/config.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace wordldp;

namespace {

constexpr const char* kVersion = "0.1.0";

// JSON has no infinities: +inf becomes "inf", NaN becomes null.
json num(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

json num_list(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

std::string csv_num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string word_text(const Word& w) {
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) s += (i ? "." : "") + std::to_string(static_cast<int>(w.letters[i]));
  return s;
}

json bracket_json(const EntropyBracket& b) {
  return {{"value", num(b.value)},
          {"infinite", b.infinite()},
          {"upper", num(b.upper)},
          {"point_estimate", num(b.point_estimate)},
          {"cauchy_gap", num(b.cauchy_gap)},
          {"increments_valid_from", b.increments_valid_from},
          {"h", num_list(b.h)},
          {"lower_seq", num_list(b.lower_seq)},
          {"increments", num_list(b.increments)}};
}

json rate_json(const RateReport& r) {
  return {{"alpha", r.alpha},     {"i_ann", num(r.i_ann)}, {"i_que", num(r.i_que)},           {"m_q", num(r.m_q)},
          {"psi_term", num(r.psi_term)}, {"infinite", std::isinf(r.i_que)}, {"ann_bracket", bracket_json(r.ann)},
          {"psi_bracket", bracket_json(r.psi)}};
}

json profile_json(const VariationProfile& p) {
  return {{"phi", num_list(p.phis)}, {"tail_bound", num(p.tail_bound)}, {"sum", num(p.sum())}, {"c_phi", num(c_phi(p))}};
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

struct Run {
  std::string subcommand;
  ExperimentConfig cfg;
  fs::path dir;
  std::size_t budget = 10'000'000;
  int workers = 0;
  std::vector<std::string> artifacts;
  json extra_seeds = json::object();

  void write(const std::string& name, const std::string& content) {
    std::ofstream out(dir / name, std::ios::binary);
    out << content;
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    artifacts.push_back(name);
  }
  void write_json(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }
};

class Csv {
 public:
  explicit Csv(const std::string& header) { s_ << header << "\n"; }
  template <class... T>
  void row(const T&... cells) {
    std::size_t i = 0;
    ((s_ << (i++ ? "," : "") << cell(cells)), ...);
    s_ << "\n";
  }
  std::string str() const { return s_.str(); }

 private:
  static std::string cell(double v) { return csv_num(v); }
  static std::string cell(const std::string& v) { return v; }
  template <class I>
    requires std::is_integral_v<I>
  static std::string cell(I v) { return std::to_string(v); }
  std::ostringstream s_;
};

VariationProfile profile_for(const LetterSource& src, int n_terms = 8) { return variation_profile(src, n_terms); }

// ------------------------------------------------------------ simulate
void cmd_simulate(Run& run) {
  const auto ref = run.cfg.reference();
  const auto& p = run.cfg.simulate;
  const std::uint64_t tau_seed = mix_seed(run.cfg.seed, 1), x_seed = mix_seed(run.cfg.seed, 2);
  run.extra_seeds = {{"renewal", tau_seed}, {"letters", x_seed}};
  const auto renewals = sample_renewals(ref.renewal, p.words, tau_seed);
  const auto x = ref.source.sample(static_cast<std::size_t>(renewals.times.back()), x_seed);
  const auto y = cut_words(x, renewals.times);
  Csv words("index,start,length,word");
  for (std::size_t i = 0; i < y.size(); ++i)
    words.row(static_cast<std::int64_t>(i), renewals.times[i], static_cast<std::int64_t>(y[i].size()), word_text(y[i]));
  run.write("words.csv", words.str());
  const auto emp = empirical_measure(y, p.k);
  run.write_json("empirical.json", {{"n", emp.n}, {"k", emp.k}, {"block", to_json(emp.to_block())}});
}

// ------------------------------------------------------------ entropy
void cmd_entropy(Run& run) {
  const auto ref = run.cfg.reference();
  const auto& q = *run.cfg.word_law;
  const auto& p = run.cfg.entropy;
  const auto profile = profile_for(ref.source);
  const auto ann = specific_rel_entropy(q, ref, profile, p.n_max, run.budget);
  const auto psi = psi_rel_entropy(q, ref.source, profile, p.k_max, run.budget);
  Csv blocks("n,h_n,lower_n,increment");
  for (std::size_t i = 0; i < ann.h.size(); ++i)
    blocks.row(static_cast<std::int64_t>(i + 1), ann.h[i], ann.lower_seq[i], ann.increments[i]);
  run.write("entropy_blocks.csv", blocks.str());
  Csv letters("k,h_k,lower_k,increment");
  for (std::size_t i = 0; i < psi.h.size(); ++i)
    letters.row(static_cast<std::int64_t>(i + 1), psi.h[i], psi.lower_seq[i], psi.increments[i]);
  run.write("psi_blocks.csv", letters.str());
  json report = {{"specific_rel_entropy", bracket_json(ann)}, {"psi_rel_entropy", bracket_json(psi)},
                 {"profile", profile_json(profile)}, {"decomposition", nullptr}};
  const bool decomposable = (ref.source.variant() == SourceVariant::Iid || ref.source.variant() == SourceVariant::Markov) &&
                            (q.kind() == WordLaw::Kind::Iid || q.kind() == WordLaw::Kind::Markov);
  if (decomposable) {
    const auto d = entropy_decomposition(q, ref.source, ref.renewal);
    report["decomposition"] = {{"h_q", num(d.h_q)},         {"term_rho", num(d.term_rho)},   {"term_letters", num(d.term_letters)},
                               {"h_q_given_p", num(d.h_q_given_p)}, {"psi_lower", num(d.psi_lower)}, {"psi_upper", num(d.psi_upper)},
                               {"infinite", d.infinite},     {"flag", d.flag}};
  }
  run.write_json("entropy.json", report);
}

// ------------------------------------------------------------ rate
void cmd_rate(Run& run) {
  const auto ref = run.cfg.reference();
  const auto& q = *run.cfg.word_law;
  const auto& p = run.cfg.rate;
  const auto profile = profile_for(ref.source);
  const auto rep = que_rate(q, ref, profile, p.alpha, p.n_max, p.k_max, run.budget);
  json report = rate_json(rep);
  report["profile"] = profile_json(profile);
  run.write_json("rate.json", report);
  if (!p.truncation.empty()) {
    const auto rows = truncation_convergence(q, ref, profile, p.alpha, p.truncation, p.n_max, p.k_max, run.budget);
    Csv csv("tr,m_tr,h_ann,psi_weighted");
    for (const auto& r : rows) csv.row(static_cast<std::int64_t>(r.tr), r.m_tr, r.h_ann, r.psi_weighted);
    run.write("truncation.csv", csv.str());
  }
}

// ------------------------------------------------------------ verify-ldp
std::string decay_csv(const DecayEstimate& est, double predicted) {
  Csv csv("n,hits,samples,rate,ci_lo,ci_hi,predicted_rate");
  for (const auto& p : est.points)
    csv.row(static_cast<std::int64_t>(p.n), p.hits, p.samples, p.rate, p.ci_lo, p.ci_hi, predicted);
  return csv.str();
}

void cmd_verify(Run& run) {
  const auto ref = run.cfg.reference();
  const auto& v = run.cfg.verify;
  const auto profile = profile_for(ref.source);
  const LdpExperiment e{.ref = ref,
                        .target = *run.cfg.word_law,
                        .k = v.k,
                        .eps = v.eps,
                        .n_grid = v.n_grid,
                        .samples = v.samples,
                        .seed = mix_seed(run.cfg.seed, 1),
                        .mode = ExperimentMode::Annealed,
                        .x_seed = v.x_seed != 0 ? v.x_seed : mix_seed(run.cfg.seed, 2),
                        .replicas = v.replicas,
                        .workers = run.workers};
  run.extra_seeds = {{"tau", e.seed}, {"x", e.x_seed}};
  const auto rep = que_rate(e.target, ref, profile, run.cfg.rate.alpha, run.cfg.rate.n_max, run.cfg.rate.k_max, run.budget);
  json summary = {{"predicted", rate_json(rep)}};
  if (v.annealed) {
    const auto est = run_annealed(e);
    run.write("annealed.csv", decay_csv(est, rep.i_ann));
    summary["annealed_extrapolated"] = num(est.extrapolated);
  }
  if (v.quenched) {
    const auto q = run_quenched(e);
    for (const auto& r : q.replicas) run.write("quenched_replica_" + std::to_string(r.replica) + ".csv", decay_csv(r, rep.i_que));
    Csv csv("n,mean_rate,sd_rate,predicted_rate");
    for (std::size_t i = 0; i < e.n_grid.size(); ++i)
      csv.row(static_cast<std::int64_t>(e.n_grid[i]), q.mean_rate[i], q.sd_rate[i], rep.i_que);
    run.write("quenched_summary.csv", csv.str());
    json ex = json::array();
    for (const auto& r : q.replicas) ex.push_back(num(r.extrapolated));
    summary["quenched_extrapolated"] = ex;
  }
  run.write_json("verify.json", summary);
}

// ------------------------------------------------------------ mixing-audit
std::vector<Letter> digits(std::int64_t v, int len, int a) {
  std::vector<Letter> out(static_cast<std::size_t>(len));
  for (int i = len - 1; i >= 0; --i, v /= a) out[static_cast<std::size_t>(i)] = static_cast<Letter>(v % a);
  return out;
}

std::int64_t ipow(int a, int e) {
  std::int64_t r = 1;
  while (e-- > 0) r *= a;
  return r;
}

template <class F>
json verdict(F body) {
  try {
    return body();
  } catch (const Unsupported& e) {
    return {{"verdict", "skipped"}, {"reason", e.what()}};
  } catch (const BudgetExceeded& e) {
    return {{"verdict", "skipped"}, {"reason", e.what()}};
  }
}

void cmd_mixing(Run& run) {
  const auto& src = *run.cfg.source;
  const auto& p = run.cfg.mixing;
  const int a = src.alphabet_size();
  const int w = p.window;
  json report;
  report["source"] = src.variant_name();
  VariationProfile profile;
  try {
    profile = profile_for(src, p.n_terms);
  } catch (const Unsupported& e) {
    report["profile"] = nullptr;
    report["error"] = e.what();
    run.write_json("mixing_audit.json", report);
    return;
  }
  report["profile"] = profile_json(profile);
  const double log_c = profile.sum();

  report["phi_table"] = verdict([&] {
    json rows = json::array();
    for (int k = 0; k < w; ++k)
      for (int ell = 1; k + ell <= w; ++ell) {
        const auto v = phi_exact(src, k, ell, run.budget);
        rows.push_back({{"k", k}, {"ell", ell}, {"phi", num(v.value)}, {"exact", v.exact}});
      }
    return json{{"verdict", "computed"}, {"rows", rows}};
  });

  report["telescoping"] = verdict([&] {
    int checks = 0, violations = 0;
    double min_slack = kInf;
    for (int k = 0; k < w; ++k)
      for (int ell = 1; k + ell <= w; ++ell) {
        const auto r = telescoping_check(src, profile, k, ell);
        ++checks;
        violations += r.ok ? 0 : 1;
        min_slack = std::min(min_slack, r.slack);
      }
    return json{{"verdict", violations == 0 ? "pass" : "fail"}, {"checks", checks}, {"violations", violations}, {"min_slack", num(min_slack)}};
  });

  report["sandwich"] = verdict([&] {
    const int d = p.past_depth;
    const int ell_max = std::max(1, w - d);
    if (ipow(a, d) * ipow(a, d) * ipow(a, ell_max) > static_cast<std::int64_t>(run.budget))
      throw BudgetExceeded("sandwich enumeration exceeds budget");
    int checks = 0, violations = 0;
    double worst = 0.0;
    for (std::int64_t x = 0; x < ipow(a, d); ++x)
      for (std::int64_t xh = 0; xh < ipow(a, d); ++xh) {
        const PastContext px{digits(x, d, a)}, pxh{digits(xh, d, a)};
        if (src.cylinder_prob(px.letters) <= 0.0 || src.cylinder_prob(pxh.letters) <= 0.0) continue;
        for (int ell = 1; ell <= ell_max; ++ell)
          for (std::int64_t b = 0; b < ipow(a, ell); ++b)
            for (int n = 1; n <= d; ++n) {
              const auto r = sandwich_check(src, {digits(b, ell, a)}, px, pxh, n, profile);
              ++checks;
              violations += r.ok ? 0 : 1;
              if (std::isfinite(r.log_ratio_pasts)) worst = std::max(worst, r.log_ratio_pasts);
              if (std::isfinite(r.log_ratio_window)) worst = std::max(worst, r.log_ratio_window);
            }
      }
    return json{{"verdict", violations == 0 ? "pass" : "fail"}, {"checks", checks}, {"violations", violations},
                {"worst_log_ratio", worst}, {"log_c", num(log_c)}};
  });

  report["decoupling"] = verdict([&] {
    int checks = 0, violations = 0;
    double worst = 0.0;
    for (int l1 = 1; l1 < w; ++l1)
      for (int s2 = l1; s2 < w; ++s2)
        for (int l2 = 1; s2 + l2 <= w; ++l2) {
          if (ipow(a, l1 + l2) > static_cast<std::int64_t>(run.budget)) throw BudgetExceeded("decoupling enumeration exceeds budget");
          for (std::int64_t b1 = 0; b1 < ipow(a, l1); ++b1)
            for (std::int64_t b2 = 0; b2 < ipow(a, l2); ++b2) {
              const auto r = decoupling_check(src, {{0, {digits(b1, l1, a)}}, {s2, {digits(b2, l2, a)}}}, profile, run.budget);
              ++checks;
              violations += r.ok ? 0 : 1;
              worst = std::max(worst, r.ratio);
            }
        }
    return json{{"verdict", violations == 0 ? "pass" : "fail"}, {"checks", checks}, {"violations", violations},
                {"worst_ratio", worst}, {"bound", num(c_phi(profile))}};
  });
  run.write_json("mixing_audit.json", report);
}

// ------------------------------------------------------------ coarse-grain
void cmd_coarse(Run& run) {
  const auto& g = run.cfg.coarse;
  const CosineKernel kernel{g.eps};
  const auto& rho = *run.cfg.renewal;
  const auto ref_rates = coarse_reference_rates(kernel, rho, g.partitions, g.alpha, g.reference_n_max, g.k_max, run.budget);
  std::vector<RateReport> rates;
  if (g.word_law) rates = coarse_rate_sequence(kernel, rho, *g.word_law, g.partitions, g.alpha, g.n_max, g.k_max, run.budget);
  Csv csv("c,i_ann,i_que,m_q,psi_term,reference_i_ann,reference_i_que");
  json rows = json::array();
  for (std::size_t i = 0; i < g.partitions.size(); ++i) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const RateReport* r = rates.empty() ? nullptr : &rates[i];
    csv.row(static_cast<std::int64_t>(g.partitions[i].c()), r ? r->i_ann : nan, r ? r->i_que : nan, r ? r->m_q : nan,
            r ? r->psi_term : nan, ref_rates[i].i_ann, ref_rates[i].i_que);
    rows.push_back({{"c", g.partitions[i].c()},
                    {"boundaries", g.partitions[i].boundaries},
                    {"rate", r ? rate_json(*r) : json(nullptr)},
                    {"reference_rate", rate_json(ref_rates[i])}});
  }
  bool mono = true;
  for (std::size_t i = 1; i < rates.size(); ++i) mono = mono && rates[i].i_que >= rates[i - 1].i_que - 1e-6;
  run.write("coarse.csv", csv.str());
  run.write_json("coarse.json", {{"eps", g.eps}, {"rows", rows}, {"nondecreasing", rates.empty() ? json(nullptr) : json(mono)}});
}

int fail(const std::string& kind, const std::string& message, const std::string& path, int code) {
  json e = {{"error", {{"kind", kind}, {"message", message}}}};
  if (!path.empty()) e["error"]["path"] = path;
  std::cerr << e.dump() << std::endl;
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Large deviations of words cut from correlated letter sequences"};
  app.set_version_flag("--version", kVersion);
  std::string config_path, out_dir = "runs";
  std::optional<std::uint64_t> seed;
  int workers = 0;
  std::size_t budget = 10'000'000;
  app.add_option("--config", config_path, "config file (JSON)")->required();
  app.add_option("--seed", seed, "override the config seed");
  app.add_option("--out", out_dir, "output base directory")->capture_default_str();
  app.add_option("--workers", workers, "worker threads, 0 = available parallelism")->check(CLI::NonNegativeNumber);
  app.add_option("--budget", budget, "state budget for exact enumerations")->check(CLI::PositiveNumber)->capture_default_str();
  app.require_subcommand(1, 1);
  const std::vector<std::pair<std::string, std::string>> subs = {
      {"simulate", "sample letters and renewals, cut words, write the empirical block law"},
      {"entropy", "block relative entropies and brackets for H(Q|P) and H(Psi_Q|nu)"},
      {"rate", "annealed and quenched rate functions"},
      {"verify-ldp", "Monte Carlo decay rates of TV balls"},
      {"mixing-audit", "variation profile and exhaustive decoupling checks"},
      {"coarse-grain", "coarse-grained quenched rates for the cosine kernel"}};
  for (const auto& [name, help] : subs) app.add_subcommand(name, help)->fallthrough();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return fail("usage", e.what(), "", 2);
  }
  const std::string sub = app.get_subcommands().front()->get_name();

  const auto t0 = std::chrono::steady_clock::now();
  try {
    json raw = load_config_file(config_path);
    if (seed) raw["seed"] = *seed;
    Run run{.subcommand = sub, .cfg = parse_config(raw, sub), .dir = {}, .budget = budget, .workers = workers, .artifacts = {}};
    const auto canonical = raw.dump();
    char id[17];
    std::snprintf(id, sizeof id, "%016" PRIx64, fnv1a(sub + "\n" + canonical));
    run.dir = fs::path(out_dir) / (sub + "-" + id);
    fs::create_directories(run.dir);
    if (sub == "simulate") cmd_simulate(run);
    else if (sub == "entropy") cmd_entropy(run);
    else if (sub == "rate") cmd_rate(run);
    else if (sub == "verify-ldp") cmd_verify(run);
    else if (sub == "mixing-audit") cmd_mixing(run);
    else cmd_coarse(run);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json manifest = {{"subcommand", sub},
                     {"run_id", id},
                     {"config", raw},
                     {"seed", run.cfg.seed},
                     {"derived_seeds", run.extra_seeds},
                     {"workers", workers},
                     {"budget", budget},
                     {"versions", {{"wordldp", kVersion}, {"compiler", __VERSION__},
                                   {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                                 std::to_string(EIGEN_MINOR_VERSION)}}},
                     {"wall_time_s", wall},
                     {"artifacts", run.artifacts}};
    std::ofstream(run.dir / "manifest.json") << manifest.dump(2) << "\n";
    std::cout << run.dir.string() << std::endl;
    return 0;
  } catch (const ConfigError& e) {
    return fail("schema", e.what(), e.path, 2);
  } catch (const BudgetExceeded& e) {
    return fail("budget", e.what(), "", 3);
  } catch (const Unsupported& e) {
    return fail("unsupported", e.what(), "", 4);
  } catch (const std::exception& e) {
    return fail("runtime", e.what(), "", 5);
  }
}
