// Batch experiment runner: every experiment in the library is exposed as a
// subcommand with reproducible seeds and machine-readable output.

#include <CLI11.hpp>

#include <charconv>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "circledyn/expansion.hpp"
#include "circledyn/measures.hpp"
#include "circledyn/random_walk.hpp"
#include "circledyn/tolerances.hpp"
#include "circledyn/version.hpp"

using namespace circledyn;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitContract = 2;

std::string fmt_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Collects rows and resolved config; renders csv (default) or json.
class Output {
 public:
  Output(std::string path, std::string format) : path_(std::move(path)), format_(std::move(format)) {}

  void config(const std::string& key, const std::string& value) { config_.emplace_back(key, value); }
  void config(const std::string& key, double value) { config(key, fmt_double(value)); }
  void config(const std::string& key, long value) { config(key, std::to_string(value)); }

  void columns(std::vector<std::string> names) { columns_ = std::move(names); }
  void row(std::vector<std::string> values) { rows_.push_back(std::move(values)); }
  void report(json j) { report_ = std::move(j); }

  void write() const {
    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!path_.empty()) {
      file.open(path_);
      if (!file) throw Error("cannot open output file " + path_);
      out = &file;
    }
    if (format_ == "json") {
      json j;
      j["version"] = kVersion;
      for (const auto& [k, v] : config_) j["config"][k] = v;
      if (!report_.is_null()) j["report"] = report_;
      if (!rows_.empty()) {
        json arr = json::array();
        for (const auto& r : rows_) {
          json o;
          for (size_t i = 0; i < columns_.size() && i < r.size(); ++i) o[columns_[i]] = r[i];
          arr.push_back(std::move(o));
        }
        j["rows"] = std::move(arr);
      }
      *out << j.dump(2) << "\n";
    } else {
      *out << "# version=" << kVersion << "\n";
      for (const auto& [k, v] : config_) *out << "# " << k << "=" << v << "\n";
      if (!report_.is_null()) *out << "# report=" << report_.dump() << "\n";
      for (size_t i = 0; i < columns_.size(); ++i)
        *out << columns_[i] << (i + 1 < columns_.size() ? "," : "\n");
      for (const auto& r : rows_) {
        for (size_t i = 0; i < r.size(); ++i) *out << r[i] << (i + 1 < r.size() ? "," : "\n");
      }
    }
  }

 private:
  std::string path_;
  std::string format_;
  std::vector<std::pair<std::string, std::string>> config_;
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
  json report_;
};

SmoothDoubling variant_by_name(const std::string& name) {
  if (name == "default") return SmoothDoubling::minimal_default();
  if (name == "remark") return SmoothDoubling::etienne_variant();
  if (name == "doubling") return SmoothDoubling::exact_doubling();
  if (name == "nonminimal") return SmoothDoubling::nonminimal_default();
  throw Error("unknown variant " + name + " (default|remark|doubling|nonminimal)");
}

int run_greedy_vs_brute(Output& out, int n, long samples, uint64_t seed, int bits) {
  out.columns({"sample", "direction", "n", "match", "max_log_derivative"});
  std::mt19937_64 rng(seed);
  bool all_match = true;
  long produced = 0, resampled = 0;
  while (produced < samples) {
    const ProjectiveDirection d = random_direction(bits, rng);
    Word greedy;
    try {
      greedy = greedy_word(d, n);
    } catch (const NonGenericError&) {
      ++resampled;
      continue;
    }
    bool match = true;
    double logd = 0.0;
    for (int k = 1; k <= n; ++k) {
      const BruteForceResult b = brute_force_max(d, k);
      Word prefix;
      prefix.symbols.assign(greedy.symbols.begin(), greedy.symbols.begin() + k);
      if (!(b.word == prefix)) match = false;
      if (k == n) logd = b.max_log_derivative;
    }
    all_match = all_match && match;
    out.row({std::to_string(produced), d.repr().substr(0, 40), std::to_string(n),
             match ? "true" : "false", fmt_double(logd)});
    ++produced;
  }
  out.config("resampled_non_generic", resampled);
  return all_match ? kExitOk : kExitContract;
}

int run_lyapunov_decay(Output& out, long n_low, long n_high, long samples, int bits,
                       uint64_t seed) {
  out.columns({"sample", "estimate_low", "estimate_high"});
  std::mt19937_64 rng(seed);
  long produced = 0, resampled = 0;
  std::vector<double> lows, highs;
  while (produced < samples) {
    const ProjectiveDirection d = random_direction(bits, rng);
    try {
      const auto prof = lyapunov_expansion_profile(d, {n_low, n_high});
      out.row({std::to_string(produced), fmt_double(prof[0].second), fmt_double(prof[1].second)});
      lows.push_back(prof[0].second);
      highs.push_back(prof[1].second);
      ++produced;
    } catch (const NonGenericError&) {
      ++resampled;
    }
  }
  auto med = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
  };
  out.config("resampled_non_generic", resampled);
  out.config("median_low", med(lows));
  out.config("median_high", med(highs));
  return kExitOk;
}

int run_psl_occupation(Output& out, long n, long n_ref, long samples, double eps,
                       uint64_t seed) {
  out.columns({"sample", "x0", "fraction_ref", "fraction"});
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (long s = 0; s < samples; ++s) {
    const double x0 = U(rng);
    out.row({std::to_string(s), fmt_double(x0), fmt_double(occupation_fraction(x0, n_ref, eps)),
             fmt_double(occupation_fraction(x0, n, eps))});
  }
  return kExitOk;
}

int run_psl_conformal(Output& out, double delta, long radius) {
  const AtomicMeasure mu = build_psl_conformal(delta, radius);
  json rep;
  rep["atoms"] = mu.atoms.size();
  rep["total"] = mu.total;
  rep["tail_bound"] = mu.tail_bound;
  double worst = 0.0;
  for (const MobiusElement& g : {MobiusElement::f1(), MobiusElement::f2()}) {
    const ConformalityReport r = conformality_defect(mu, MobiusMap(g), delta);
    json jr;
    jr["generator"] = g.key();
    jr["max_relative_defect"] = r.max_relative_defect;
    jr["atoms_checked"] = r.atoms_checked;
    jr["atoms_skipped_boundary"] = r.atoms_skipped_boundary;
    rep["checks"].push_back(jr);
    worst = std::max(worst, r.max_relative_defect);
  }
  rep["max_defect"] = worst;
  out.report(rep);
  return worst < tol::kConformalExact ? kExitOk : kExitContract;
}

int run_thompson_ne_probe(Output& out, std::vector<double> xs, int depth,
                          const std::string& variant) {
  const SmoothDoubling phi = variant_by_name(variant);
  out.columns({"x", "depth", "max_derivative"});
  for (double x : xs)
    out.row({fmt_double(x), std::to_string(depth), fmt_double(ne_probe(phi, x, depth))});
  return kExitOk;
}

int run_thompson_occupation(Output& out, long n, long n_ref, long samples, double eps,
                            uint64_t seed, const std::string& variant) {
  const SmoothDoubling phi = variant_by_name(variant);
  out.columns({"sample", "x0", "fraction_ref", "fraction"});
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (long s = 0; s < samples; ++s) {
    const double x0 = U(rng);
    out.row({std::to_string(s), fmt_double(x0),
             fmt_double(time_average_concentration(phi, x0, n_ref, eps)),
             fmt_double(time_average_concentration(phi, x0, n, eps))});
  }
  return kExitOk;
}

int run_gs_conformal(Output& out, double delta, int depth) {
  const SmoothDoubling phi = SmoothDoubling::nonminimal_default();
  const AtomicMeasure mu = build_gs_conformal(phi, delta, depth);
  json rep;
  rep["atoms"] = mu.atoms.size();
  rep["total"] = mu.total;
  double worst = 0.0;
  for (const ThompsonElement& g : {thompson_A(), thompson_B(), thompson_C()}) {
    const GSMap gm{GSRealization(g, phi)};
    const ConformalityReport r = conformality_defect(mu, gm, delta);
    json jr;
    jr["generator"] = gm.describe();
    jr["max_relative_defect"] = r.max_relative_defect;
    jr["atoms_checked"] = r.atoms_checked;
    jr["atoms_skipped_boundary"] = r.atoms_skipped_boundary;
    rep["checks"].push_back(jr);
    worst = std::max(worst, r.max_relative_defect);
  }
  rep["max_defect"] = worst;
  out.report(rep);
  return worst < tol::kConformalFloat ? kExitOk : kExitContract;
}

int run_walk_stationary(Output& out, long n, long trials, int bins, uint64_t seed) {
  const MapFamily fam = g2_family();
  const StepDistribution m = StepDistribution::uniform(fam);
  const EmpiricalMeasure h = stationary_estimate(m, n, trials, seed, bins);
  const EmpiricalMeasure h2 = stationary_estimate(m, n, trials, seed + 1, bins);
  out.config("tv_between_seeds", h.tv_distance(h2));
  out.columns({"bin", "count", "frequency"});
  for (int i = 0; i < h.bins; ++i)
    out.row({std::to_string(i), std::to_string(h.counts[i]), fmt_double(h.mass(i))});
  return kExitOk;
}

int run_walk_lyapunov(Output& out, long n, long trials, long stat_n, long stat_trials,
                      uint64_t seed) {
  const MapFamily fam = g2_family();
  const StepDistribution m = StepDistribution::uniform(fam);
  const EmpiricalMeasure nu = stationary_estimate(m, stat_n, stat_trials, seed);
  const WalkEstimate e = random_lyapunov(m, nu, n, trials, seed + 1);
  out.columns({"value", "standard_error", "n", "trials"});
  out.row({fmt_double(e.value), fmt_double(e.standard_error), std::to_string(e.n_steps),
           std::to_string(e.trials)});
  return kExitOk;
}

int run_walk_escape(Output& out, long n, long trials, uint64_t seed) {
  const MapFamily fam = g2_family();
  const StepDistribution m = StepDistribution::uniform(fam);
  const WalkEstimate e = rate_of_escape(m, n, trials, seed);
  out.columns({"value", "standard_error", "n", "trials", "upper_bound"});
  out.row({fmt_double(e.value), fmt_double(e.standard_error), std::to_string(e.n_steps),
           std::to_string(e.trials), e.upper_bound ? "true" : "false"});
  return kExitOk;
}

int run_walk_bound_check(Output& out, const BoundCheckParams& p) {
  const MapFamily fam = g2_family();
  const StepDistribution m = StepDistribution::uniform(fam);
  const BoundCheckReport rep = expansion_bound_check(m, p);
  json j;
  j["lambda_rd"] = rep.lambda_rd.value;
  j["lambda_rd_se"] = rep.lambda_rd.standard_error;
  j["escape"] = rep.escape.value;
  j["escape_se"] = rep.escape.standard_error;
  j["lambda_exp"] = rep.lambda_exp;
  j["lambda_exp_se"] = rep.lambda_exp_se;
  j["lambda_exp_n"] = rep.lambda_exp_n;
  j["expansion_failures"] = rep.expansion_failures;
  j["rhs"] = rep.rhs;
  j["pass"] = rep.pass;
  out.report(j);
  return rep.pass ? kExitOk : kExitContract;
}

int run_expand_scan(Output& out, long samples, std::vector<double> m_grid,
                    const std::string& family, uint64_t seed) {
  std::unique_ptr<ExpansionPolicy> policy;
  Chart chart;
  if (family == "psl2z") {
    policy = std::make_unique<G2Policy>();
    chart = Chart::Projective;
  } else if (family == "gs") {
    policy = std::make_unique<GSPolicy>(SmoothDoubling::minimal_default());
    chart = Chart::Unit;
  } else {
    throw Error("unknown family " + family + " (psl2z|gs)");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, chart_period(chart));
  std::vector<CirclePoint> pts;
  for (long s = 0; s < samples; ++s) pts.push_back(CirclePoint{U(rng), chart});
  const auto rows = distortion_expandable_scan(*policy, pts, m_grid);
  out.columns({"point", "M", "ratio", "ne_marked"});
  for (const ScanRow& r : rows)
    out.row({fmt_double(r.point.coord), fmt_double(r.M), fmt_double(r.ratio),
             r.ne_marked ? "true" : "false"});
  return kExitOk;
}

int run_distortion_suite(Output& out, long cases, uint64_t seed) {
  const MapFamily fam = g2_family();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, M_PI);
  out.columns({"case", "kind", "slack"});
  bool ok = true;
  long produced = 0;
  while (produced < cases) {
    Word w;
    const int len = 2 + static_cast<int>(rng() % 7);
    for (int i = 0; i < len; ++i)
      w.symbols.push_back({static_cast<int>(rng() % 2), (rng() & 1) != 0});
    const double lo = U(rng);
    try {
      const CircleInterval I(CirclePoint::projective(lo), CirclePoint::projective(lo + 1e-3));
      const DistortionReport rep = check_sum_bound(w, fam, I);
      out.row({std::to_string(produced), "sum-bound", fmt_double(rep.slack)});
      ok = ok && rep.slack >= -tol::kDistortionSlack;
      const LocalRadius r = local_distortion_radius(I.at(0.5), w, fam);
      const double radius_slack = M_LN2 + tol::kKappaBound - r.kappa_measured;
      out.row({std::to_string(produced), "local-radius", fmt_double(radius_slack)});
      ok = ok && radius_slack >= 0.0;
      ++produced;
    } catch (const WrapError&) {
    }
  }
  return ok ? kExitOk : kExitContract;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"circle-action dynamics experiments"};
  app.set_config("--config", "", "key = value configuration file");
  app.allow_config_extras(false);
  app.fallthrough();  // --seed/--out/--format may follow the subcommand
  app.require_subcommand(1);

  std::string out_path;
  std::string format = "csv";
  uint64_t seed = 1;
  app.add_option("--out", out_path, "output file (stdout when omitted)");
  app.add_option("--format", format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--seed", seed, "random seed");

  // psl2z
  auto* psl = app.add_subcommand("psl2z", "integer Moebius action experiments");
  psl->require_subcommand(1);

  auto* gvb = psl->add_subcommand("greedy-vs-brute", "greedy maximizer against exhaustive search");
  int gvb_n = 10;
  long gvb_samples = 100;
  int gvb_bits = 128;
  gvb->add_option("--n", gvb_n, "word length")->check(CLI::Range(1, 14));
  gvb->add_option("--samples", gvb_samples, "number of directions");
  gvb->add_option("--bits", gvb_bits, "direction entropy in bits");

  auto* dec = psl->add_subcommand("lyapunov-decay", "greedy expansion-rate decay");
  long dec_low = 100, dec_high = 10000, dec_samples = 50;
  int dec_bits = 4096;
  dec->add_option("--n-low", dec_low);
  dec->add_option("--n-high", dec_high);
  dec->add_option("--samples", dec_samples);
  dec->add_option("--bits", dec_bits);

  auto* pocc = psl->add_subcommand("occupation", "time near the parabolic quotient ends");
  long pocc_n = 1000000, pocc_ref = 1000, pocc_samples = 100;
  double pocc_eps = 0.05;
  pocc->add_option("--n", pocc_n);
  pocc->add_option("--n-ref", pocc_ref);
  pocc->add_option("--samples", pocc_samples);
  pocc->add_option("--eps", pocc_eps);

  auto* pconf = psl->add_subcommand("conformal-defect", "conformality of the direction family");
  double pconf_delta = 1.5;
  long pconf_radius = 50;
  pconf->add_option("--delta", pconf_delta);
  pconf->add_option("--radius", pconf_radius);

  // thompson
  auto* tho = app.add_subcommand("thompson", "smoothed Thompson-action experiments");
  tho->require_subcommand(1);

  auto* nep = tho->add_subcommand("ne-probe", "max derivative over short realized words");
  std::vector<double> nep_x = {0.0, 0.3};
  int nep_depth = 4;
  std::string nep_variant = "default";
  nep->add_option("--x", nep_x);
  nep->add_option("--depth", nep_depth)->check(CLI::Range(0, 8));
  nep->add_option("--variant", nep_variant);

  auto* tocc = tho->add_subcommand("occupation", "time near the parabolic set");
  long tocc_n = 1000000, tocc_ref = 1000, tocc_samples = 100;
  double tocc_eps = 0.05;
  std::string tocc_variant = "default";
  tocc->add_option("--n", tocc_n);
  tocc->add_option("--n-ref", tocc_ref);
  tocc->add_option("--samples", tocc_samples);
  tocc->add_option("--eps", tocc_eps);
  tocc->add_option("--variant", tocc_variant);

  // gs
  auto* gs = app.add_subcommand("gs", "nonminimal gap-family experiments");
  gs->require_subcommand(1);
  auto* gconf = gs->add_subcommand("conformal-defect", "conformality of the gap-endpoint family");
  double gconf_delta = 1.5;
  int gconf_depth = 12;
  gconf->add_option("--delta", gconf_delta);
  gconf->add_option("--depth", gconf_depth)->check(CLI::Range(1, 22));

  // walk
  auto* walk = app.add_subcommand("walk", "random-walk estimators");
  walk->require_subcommand(1);

  auto* wstat = walk->add_subcommand("stationary", "endpoint histogram of backward compositions");
  long wstat_n = 200, wstat_trials = 100000;
  int wstat_bins = 1024;
  wstat->add_option("--n", wstat_n);
  wstat->add_option("--trials", wstat_trials);
  wstat->add_option("--bins", wstat_bins);

  auto* wlyap = walk->add_subcommand("lyapunov", "random derivative exponent");
  long wlyap_n = 1000, wlyap_trials = 1000, wlyap_statn = 200, wlyap_stattrials = 20000;
  wlyap->add_option("--n", wlyap_n);
  wlyap->add_option("--trials", wlyap_trials);
  wlyap->add_option("--stat-n", wlyap_statn);
  wlyap->add_option("--stat-trials", wlyap_stattrials);

  auto* wesc = walk->add_subcommand("escape", "word-norm growth rate");
  long wesc_n = 10000, wesc_trials = 200;
  wesc->add_option("--n", wesc_n);
  wesc->add_option("--trials", wesc_trials);

  auto* wbound = walk->add_subcommand("bound-check", "expansion against the walk estimates");
  BoundCheckParams bp;
  wbound->add_option("--stationary-n", bp.stationary_n);
  wbound->add_option("--stationary-trials", bp.stationary_trials);
  wbound->add_option("--lyapunov-n", bp.lyapunov_n);
  wbound->add_option("--lyapunov-trials", bp.lyapunov_trials);
  wbound->add_option("--escape-n", bp.escape_n);
  wbound->add_option("--escape-trials", bp.escape_trials);
  wbound->add_option("--expansion-samples", bp.expansion_samples);
  wbound->add_option("--bits", bp.direction_bits);

  // expand
  auto* exp = app.add_subcommand("expand", "expansion-procedure scans");
  exp->require_subcommand(1);
  auto* escan = exp->add_subcommand("scan", "derivative-sum ratios over sample points");
  long escan_samples = 100;
  std::vector<double> escan_m = {1e3, 1e4};
  std::string escan_family = "psl2z";
  escan->add_option("--samples", escan_samples);
  escan->add_option("--m", escan_m);
  escan->add_option("--family", escan_family);

  // distortion
  auto* dis = app.add_subcommand("distortion", "composition distortion checks");
  dis->require_subcommand(1);
  auto* dsuite = dis->add_subcommand("suite", "randomized inequality suite");
  long dsuite_cases = 1000;
  dsuite->add_option("--cases", dsuite_cases);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  }

  try {
    Output out(out_path, format);
    out.config("seed", static_cast<long>(seed));
    int rc = kExitOk;
    if (gvb->parsed()) {
      out.config("subcommand", std::string("psl2z greedy-vs-brute"));
      out.config("n", static_cast<long>(gvb_n));
      out.config("samples", gvb_samples);
      out.config("bits", static_cast<long>(gvb_bits));
      rc = run_greedy_vs_brute(out, gvb_n, gvb_samples, seed, gvb_bits);
    } else if (dec->parsed()) {
      out.config("subcommand", std::string("psl2z lyapunov-decay"));
      out.config("n_low", dec_low);
      out.config("n_high", dec_high);
      out.config("samples", dec_samples);
      out.config("bits", static_cast<long>(dec_bits));
      rc = run_lyapunov_decay(out, dec_low, dec_high, dec_samples, dec_bits, seed);
    } else if (pocc->parsed()) {
      out.config("subcommand", std::string("psl2z occupation"));
      out.config("n", pocc_n);
      out.config("n_ref", pocc_ref);
      out.config("samples", pocc_samples);
      out.config("eps", pocc_eps);
      rc = run_psl_occupation(out, pocc_n, pocc_ref, pocc_samples, pocc_eps, seed);
    } else if (pconf->parsed()) {
      out.config("subcommand", std::string("psl2z conformal-defect"));
      out.config("delta", pconf_delta);
      out.config("radius", pconf_radius);
      rc = run_psl_conformal(out, pconf_delta, pconf_radius);
    } else if (nep->parsed()) {
      out.config("subcommand", std::string("thompson ne-probe"));
      out.config("depth", static_cast<long>(nep_depth));
      out.config("variant", nep_variant);
      rc = run_thompson_ne_probe(out, nep_x, nep_depth, nep_variant);
    } else if (tocc->parsed()) {
      out.config("subcommand", std::string("thompson occupation"));
      out.config("n", tocc_n);
      out.config("n_ref", tocc_ref);
      out.config("samples", tocc_samples);
      out.config("eps", tocc_eps);
      out.config("variant", tocc_variant);
      rc = run_thompson_occupation(out, tocc_n, tocc_ref, tocc_samples, tocc_eps, seed,
                                   tocc_variant);
    } else if (gconf->parsed()) {
      out.config("subcommand", std::string("gs conformal-defect"));
      out.config("delta", gconf_delta);
      out.config("depth", static_cast<long>(gconf_depth));
      rc = run_gs_conformal(out, gconf_delta, gconf_depth);
    } else if (wstat->parsed()) {
      out.config("subcommand", std::string("walk stationary"));
      out.config("n", wstat_n);
      out.config("trials", wstat_trials);
      out.config("bins", static_cast<long>(wstat_bins));
      rc = run_walk_stationary(out, wstat_n, wstat_trials, wstat_bins, seed);
    } else if (wlyap->parsed()) {
      out.config("subcommand", std::string("walk lyapunov"));
      out.config("n", wlyap_n);
      out.config("trials", wlyap_trials);
      out.config("stat_n", wlyap_statn);
      out.config("stat_trials", wlyap_stattrials);
      rc = run_walk_lyapunov(out, wlyap_n, wlyap_trials, wlyap_statn, wlyap_stattrials, seed);
    } else if (wesc->parsed()) {
      out.config("subcommand", std::string("walk escape"));
      out.config("n", wesc_n);
      out.config("trials", wesc_trials);
      rc = run_walk_escape(out, wesc_n, wesc_trials, seed);
    } else if (wbound->parsed()) {
      out.config("subcommand", std::string("walk bound-check"));
      bp.seed = seed;
      out.config("stationary_n", bp.stationary_n);
      out.config("stationary_trials", bp.stationary_trials);
      out.config("lyapunov_n", bp.lyapunov_n);
      out.config("lyapunov_trials", bp.lyapunov_trials);
      out.config("escape_n", bp.escape_n);
      out.config("escape_trials", bp.escape_trials);
      out.config("expansion_samples", bp.expansion_samples);
      out.config("bits", static_cast<long>(bp.direction_bits));
      rc = run_walk_bound_check(out, bp);
    } else if (escan->parsed()) {
      out.config("subcommand", std::string("expand scan"));
      out.config("samples", escan_samples);
      out.config("family", escan_family);
      rc = run_expand_scan(out, escan_samples, escan_m, escan_family, seed);
    } else if (dsuite->parsed()) {
      out.config("subcommand", std::string("distortion suite"));
      out.config("cases", dsuite_cases);
      rc = run_distortion_suite(out, dsuite_cases, seed);
    }
    out.write();
    return rc;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
