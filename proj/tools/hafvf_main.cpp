// Command-line front end: stream filtering, offline smoothing, adaptive AR
// fitting, scenario generation, and the optimizer demo. One observation per
// input row, one JSON-lines record per observation on the way out.
//
// Exit codes: 0 success, 1 input error, 2 configuration error, 3 numerical
// failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hafvf/hafvf.hpp"

namespace {

using namespace hafvf;

int log_level() {
  static const int level = [] {
    const char* env = std::getenv("HAFVF_LOG");
    if (!env) return 1;
    const std::string v(env);
    if (v == "error") return 0;
    if (v == "warn") return 1;
    if (v == "info") return 2;
    if (v == "debug") return 3;
    return 1;
  }();
  return level;
}

void log_warn(const std::string& msg) {
  if (log_level() >= 1) std::cerr << "[warn] " << msg << "\n";
}

void log_info(const std::string& msg) {
  if (log_level() >= 2) std::cerr << "[info] " << msg << "\n";
}

struct CommonOptions {
  std::string input = "-";
  std::string output = "-";
  std::string config_path;
  std::vector<std::string> overrides;
  std::string format = "csv";
  std::string changes_path;
};

void add_common(CLI::App* cmd, CommonOptions& opt, bool with_format = true) {
  cmd->add_option("-i,--input", opt.input, "input path or - for stdin");
  cmd->add_option("-o,--output", opt.output, "output path or - for stdout");
  cmd->add_option("-c,--config", opt.config_path, "key=value config file");
  cmd->add_option("--set", opt.overrides, "config override key=value (repeatable)");
  if (with_format) cmd->add_option("--format", opt.format, "input encoding: csv or jsonl");
  cmd->add_option("--changes", opt.changes_path, "sidecar change-trial file for annotation");
}

ConfigMap load_config(const CommonOptions& opt) {
  ConfigMap cfg = opt.config_path.empty() ? ConfigMap() : ConfigMap::from_file(opt.config_path);
  for (const auto& o : opt.overrides) cfg.apply_override(o);
  return cfg;
}

StreamRows read_input(const CommonOptions& opt) {
  const Encoding enc = encoding_from_name(opt.format);
  if (opt.input == "-") {
    return read_rows(std::cin, enc);
  }
  std::ifstream in(opt.input);
  if (!in) throw input_error("cannot open input file '" + opt.input + "'");
  return read_rows(in, enc);
}

class OutputSink {
 public:
  explicit OutputSink(const std::string& path) {
    if (path != "-") {
      file_.open(path);
      if (!file_) throw input_error("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::set<long> load_change_trials(const std::string& path) {
  std::set<long> out;
  if (path.empty()) return out;
  std::ifstream in(path);
  if (!in) throw input_error("cannot open change-trial file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
    for (const auto& v : j.at("change_trials")) out.insert(v.get<long>());
  } catch (const nlohmann::json::exception& e) {
    throw input_error("change-trial file '" + path + "': " + e.what());
  }
  return out;
}

template <ConjugateFamily F>
void apply_hierarchy_config(HierarchyConfig<F>& h, const ConfigMap& cfg) {
  h.phi0 = BetaParams(cfg.get_double("w.prior.alpha", h.phi0.alpha),
                      cfg.get_double("w.prior.beta", h.phi0.beta));
  h.beta0 = BetaParams(cfg.get_double("b.prior.alpha", h.beta0.alpha),
                       cfg.get_double("b.prior.beta", h.beta0.beta));
  h.gamma = cfg.get_double("gamma", h.gamma);
  h.levels = cfg.get_int("levels", h.levels);
  h.fixed_w = cfg.get_double("fixed.w", h.fixed_w);
  h.fixed_b = cfg.get_double("fixed.b", h.fixed_b);
  h.controls.max_iters = cfg.get_int("solver.max_iters", h.controls.max_iters);
  h.controls.tol = cfg.get_double("solver.tol", h.controls.tol);
  h.controls.damping = cfg.get_double("solver.damping", h.controls.damping);
  h.controls.reset_value = BetaParams(cfg.get_double("solver.reset.alpha", 10.0),
                                      cfg.get_double("solver.reset.beta", 10.0));
  h.max_sweeps = cfg.get_int("sweeps.max", h.max_sweeps);
  if (cfg.has("fb.window")) h.fb_window = cfg.get_double("fb.window", 0.0);
}

// Natural-parameter override shared by every family.
std::optional<NaturalParams> natural_prior(const ConfigMap& cfg) {
  if (!cfg.has("z.prior.xi")) return std::nullopt;
  NaturalParams th;
  const auto xi = cfg.get_double_list("z.prior.xi");
  th.xi = Eigen::Map<const Eigen::VectorXd>(xi.data(), xi.size());
  th.eta = cfg.get_double("z.prior.eta", 0.0);
  return th;
}

StepRecord base_record(long t, std::string family, const StepDiagnostics& diag) {
  StepRecord r;
  r.t = t;
  r.family = std::move(family);
  r.e_w = diag.e_w;
  r.var_w = diag.var_w;
  r.e_b = diag.e_b;
  r.eta_eff = diag.eta_eff;
  r.eta_asymptote = diag.eta_asymptote;
  r.elbo = diag.elbo;
  r.log_pred = diag.log_pred;
  r.reset_w = diag.reset_w;
  r.reset_b = diag.reset_b;
  r.iterations = diag.sweeps;
  return r;
}

void mark_change(StepRecord& r, const std::set<long>& changes, bool annotate) {
  if (annotate) r.change = changes.count(r.t) > 0;
}

void summarize_bernoulli(StepRecord& r, const NaturalParams& th) {
  r.posterior_summary = {{"a", BernoulliBeta::a(th)},
                         {"b", BernoulliBeta::b(th)},
                         {"mean", th.xi[0] / (th.xi[0] + th.xi[1])}};
}

void summarize_nig(StepRecord& r, const NaturalParams& th) {
  const double shape = GaussianNig::shape(th);
  const double rate = GaussianNig::rate(th);
  r.posterior_summary = {{"mu", GaussianNig::mu(th)},
                         {"kappa", GaussianNig::kappa(th)},
                         {"shape", shape},
                         {"rate", rate},
                         {"var_mean", shape > 1.0 ? rate / (shape - 1.0)
                                                  : std::numeric_limits<double>::quiet_NaN()}};
}

void summarize_niw(StepRecord& r, const GaussianNiw& fam, const NaturalParams& th) {
  const Eigen::VectorXd mu = fam.mean(th);
  for (int j = 0; j < fam.dim(); ++j) {
    r.posterior_summary.emplace_back("mu_" + std::to_string(j), mu[j]);
  }
  r.posterior_summary.emplace_back("kappa", fam.kappa(th));
  r.posterior_summary.emplace_back("dof", fam.dof(th));
  const double nu = fam.dof(th);
  const Eigen::MatrixXd cov = (nu > fam.dim() + 1.0)
                                  ? Eigen::MatrixXd(fam.psi(th) / (nu - fam.dim() - 1.0))
                                  : Eigen::MatrixXd(fam.psi(th) / std::max(nu, 1.0));
  for (int a = 0; a < fam.dim(); ++a) {
    for (int b = a; b < fam.dim(); ++b) {
      r.posterior_summary.emplace_back("cov_" + std::to_string(a) + "_" + std::to_string(b),
                                       cov(a, b));
    }
  }
}

void summarize_linreg(StepRecord& r, const LinRegNig& fam, const NaturalParams& th) {
  const Eigen::VectorXd coef = fam.coef_mean(th);
  for (int j = 0; j < fam.order(); ++j) {
    r.posterior_summary.emplace_back("coef_" + std::to_string(j), coef[j]);
  }
  r.posterior_summary.emplace_back("noise_var", fam.noise_var_mean(th));
}

// ---- per-family pipelines ----

struct FamilyKind {
  enum Value { Bernoulli, Nig, Niw, LinReg } value;
};

FamilyKind::Value family_from_name(const std::string& name) {
  if (name == "bernoulli" || name == "bernoulli-beta") return FamilyKind::Bernoulli;
  if (name == "gaussian" || name == "gaussian-nig") return FamilyKind::Nig;
  if (name == "gaussian-niw" || name == "niw") return FamilyKind::Niw;
  if (name == "linreg" || name == "linreg-nig") return FamilyKind::LinReg;
  throw config_error("unknown family '" + name +
                     "' (valid: bernoulli, gaussian, gaussian-niw, linreg)");
}

HierarchyConfig<BernoulliBeta> bernoulli_config(const ConfigMap& cfg) {
  HierarchyConfig<BernoulliBeta> h{
      BernoulliBeta{}, BernoulliBeta::from_counts(cfg.get_double("z.prior.alpha", 1.0),
                                                  cfg.get_double("z.prior.beta", 1.0))};
  if (auto nat = natural_prior(cfg)) h.theta0 = *nat;
  apply_hierarchy_config(h, cfg);
  return h;
}

HierarchyConfig<GaussianNig> nig_config(const ConfigMap& cfg) {
  HierarchyConfig<GaussianNig> h{
      GaussianNig{},
      GaussianNig::from_moments(cfg.get_double("z.prior.mu", 0.0),
                                cfg.get_double("z.prior.kappa", 1.0),
                                cfg.get_double("z.prior.shape", 1.0),
                                cfg.get_double("z.prior.rate", 1.0))};
  if (auto nat = natural_prior(cfg)) h.theta0 = *nat;
  apply_hierarchy_config(h, cfg);
  return h;
}

HierarchyConfig<GaussianNiw> niw_config(const ConfigMap& cfg, int d) {
  GaussianNiw fam(d);
  Eigen::VectorXd mu0 = Eigen::VectorXd::Zero(d);
  const auto mu_list = cfg.get_double_list("z.prior.mu");
  if (!mu_list.empty()) {
    if (static_cast<int>(mu_list.size()) != d) {
      throw config_error("z.prior.mu: expected " + std::to_string(d) + " components");
    }
    mu0 = Eigen::Map<const Eigen::VectorXd>(mu_list.data(), d);
  }
  Eigen::MatrixXd scale = Eigen::MatrixXd::Identity(d, d);
  const auto scale_list = cfg.get_double_list("z.prior.scale");
  if (scale_list.size() == 1) {
    scale *= scale_list[0];
  } else if (static_cast<int>(scale_list.size()) == d * d) {
    scale = Eigen::Map<const Eigen::MatrixXd>(scale_list.data(), d, d);
  } else if (!scale_list.empty()) {
    throw config_error("z.prior.scale: expected 1 or " + std::to_string(d * d) + " entries");
  }
  HierarchyConfig<GaussianNiw> h{
      fam, fam.from_moments(mu0, cfg.get_double("z.prior.kappa", 0.1),
                            cfg.get_double("z.prior.dof", static_cast<double>(d) + 1.0), scale)};
  if (auto nat = natural_prior(cfg)) h.theta0 = *nat;
  apply_hierarchy_config(h, cfg);
  return h;
}

HierarchyConfig<LinRegNig> linreg_config(const ConfigMap& cfg, int p) {
  LinRegNig fam(p);
  HierarchyConfig<LinRegNig> h{fam,
                               fam.ridge_prior(cfg.get_double("z.prior.ridge", 1.0),
                                               cfg.get_double("z.prior.shape", 2.0),
                                               cfg.get_double("z.prior.rate", 0.2))};
  if (auto nat = natural_prior(cfg)) h.theta0 = *nat;
  apply_hierarchy_config(h, cfg);
  return h;
}

std::vector<SufficientStats> binary_stats(const BernoulliBeta& fam, const StreamRows& rows) {
  std::vector<SufficientStats> out;
  out.reserve(rows.rows.size());
  for (std::size_t i = 0; i < rows.rows.size(); ++i) {
    require_row_width(rows, i, 1, "value");
    const double v = rows.rows[i][0];
    if (!(v == 0.0 || v == 1.0)) {
      throw input_error("line " + std::to_string(rows.line_numbers[i]) +
                        ": binary stream expects 0 or 1, got " + fmt_g17(v));
    }
    out.push_back(fam.suff_stats(v));
  }
  return out;
}

std::vector<SufficientStats> scalar_stats(const GaussianNig& fam, const StreamRows& rows) {
  std::vector<SufficientStats> out;
  out.reserve(rows.rows.size());
  for (std::size_t i = 0; i < rows.rows.size(); ++i) {
    require_row_width(rows, i, 1, "value");
    out.push_back(fam.suff_stats(rows.rows[i][0]));
  }
  return out;
}

std::vector<SufficientStats> vector_stats(const GaussianNiw& fam, const StreamRows& rows) {
  std::vector<SufficientStats> out;
  out.reserve(rows.rows.size());
  for (std::size_t i = 0; i < rows.rows.size(); ++i) {
    require_row_width(rows, i, fam.dim(), "components");
    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(rows.rows[i].data(), fam.dim());
    out.push_back(fam.suff_stats(x));
  }
  return out;
}

std::vector<SufficientStats> regression_stats(const LinRegNig& fam, const StreamRows& rows) {
  std::vector<SufficientStats> out;
  out.reserve(rows.rows.size());
  for (std::size_t i = 0; i < rows.rows.size(); ++i) {
    require_row_width(rows, i, fam.order() + 1, "columns (u..., y)");
    RegressionObs obs;
    obs.u = Eigen::Map<const Eigen::VectorXd>(rows.rows[i].data(), fam.order());
    obs.y = rows.rows[i].back();
    out.push_back(fam.suff_stats(obs));
  }
  return out;
}

template <ConjugateFamily F, class Summarize>
void emit_filter_records(const AdaptiveFilter<F>& filter,
                         const std::vector<SufficientStats>& stats, std::ostream& out,
                         const std::set<long>& changes, bool annotate, Summarize&& summarize) {
  const auto trace = filter.run(stats);
  for (std::size_t i = 0; i < trace.size(); ++i) {
    StepRecord r = base_record(static_cast<long>(i) + 1, std::string(filter.config().family.name()),
                               trace[i].second);
    summarize(r, trace[i].first.theta);
    mark_change(r, changes, annotate);
    out << to_json_line(r) << "\n";
  }
}

template <ConjugateFamily F, class Summarize>
void emit_smooth_records(const AdaptiveFilter<F>& filter,
                         const std::vector<SufficientStats>& stats, std::ostream& out,
                         const std::set<long>& changes, bool annotate, Summarize&& summarize) {
  const auto fb = filter.forward_backward(stats);
  if (fb.clamp_count > 0) {
    log_warn(std::to_string(fb.clamp_count) +
             " combined posteriors were invalid and clamped to the naive prior");
  }
  for (std::size_t i = 0; i < fb.combined.size(); ++i) {
    StepRecord r = base_record(static_cast<long>(i) + 1, std::string(filter.config().family.name()),
                               fb.forward[i].second);
    summarize(r, fb.combined[i]);
    r.eta_eff = fb.combined[i].eta;
    r.posterior_summary.emplace_back("f_eta_eff", fb.forward[i].first.theta.eta);
    r.posterior_summary.emplace_back("b_eta_eff", fb.backward[i].first.theta.eta);
    mark_change(r, changes, annotate);
    out << to_json_line(r) << "\n";
  }
}

void filter_or_smooth(const std::string& family_name, const ConfigMap& cfg, const StreamRows& rows,
                      std::ostream& out, const std::set<long>& changes, bool annotate,
                      bool smooth) {
  const auto kind = family_from_name(family_name);
  if (rows.rows.empty()) return;
  switch (kind) {
    case FamilyKind::Bernoulli: {
      const auto h = bernoulli_config(cfg);
      AdaptiveFilter<BernoulliBeta> filter(h);
      const auto stats = binary_stats(h.family, rows);
      const auto summ = [](StepRecord& r, const NaturalParams& th) { summarize_bernoulli(r, th); };
      smooth ? emit_smooth_records(filter, stats, out, changes, annotate, summ)
             : emit_filter_records(filter, stats, out, changes, annotate, summ);
      break;
    }
    case FamilyKind::Nig: {
      const auto h = nig_config(cfg);
      AdaptiveFilter<GaussianNig> filter(h);
      const auto stats = scalar_stats(h.family, rows);
      const auto summ = [](StepRecord& r, const NaturalParams& th) { summarize_nig(r, th); };
      smooth ? emit_smooth_records(filter, stats, out, changes, annotate, summ)
             : emit_filter_records(filter, stats, out, changes, annotate, summ);
      break;
    }
    case FamilyKind::Niw: {
      const int d = static_cast<int>(rows.rows[0].size());
      const auto h = niw_config(cfg, d);
      AdaptiveFilter<GaussianNiw> filter(h);
      const auto stats = vector_stats(h.family, rows);
      const auto fam = h.family;
      const auto summ = [fam](StepRecord& r, const NaturalParams& th) { summarize_niw(r, fam, th); };
      smooth ? emit_smooth_records(filter, stats, out, changes, annotate, summ)
             : emit_filter_records(filter, stats, out, changes, annotate, summ);
      break;
    }
    case FamilyKind::LinReg: {
      const int p = static_cast<int>(rows.rows[0].size()) - 1;
      if (p < 1) {
        throw input_error("line " + std::to_string(rows.line_numbers[0]) +
                          ": regressor-response rows need at least two columns");
      }
      const auto h = linreg_config(cfg, p);
      AdaptiveFilter<LinRegNig> filter(h);
      const auto stats = regression_stats(h.family, rows);
      const auto fam = h.family;
      const auto summ = [fam](StepRecord& r, const NaturalParams& th) {
        summarize_linreg(r, fam, th);
      };
      smooth ? emit_smooth_records(filter, stats, out, changes, annotate, summ)
             : emit_filter_records(filter, stats, out, changes, annotate, summ);
      break;
    }
  }
}

int cmd_filter(const CommonOptions& opt, const std::string& family, bool smooth) {
  const ConfigMap cfg = load_config(opt);
  const StreamRows rows = read_input(opt);
  const std::set<long> changes = load_change_trials(opt.changes_path);
  OutputSink sink(opt.output);
  filter_or_smooth(family, cfg, rows, sink.stream(), changes, !opt.changes_path.empty(), smooth);
  log_info("processed " + std::to_string(rows.rows.size()) + " observations");
  return 0;
}

int cmd_ar(const CommonOptions& opt, int order, const std::string& smoothing, bool intercept) {
  const ConfigMap cfg = load_config(opt);
  const StreamRows rows = read_input(opt);
  const std::set<long> changes = load_change_trials(opt.changes_path);
  OutputSink sink(opt.output);

  std::vector<double> signal;
  signal.reserve(rows.rows.size());
  for (std::size_t i = 0; i < rows.rows.size(); ++i) {
    require_row_width(rows, i, 1, "value");
    signal.push_back(rows.rows[i][0]);
  }
  if (signal.empty()) return 0;

  Smoothing mode;
  if (smoothing == "forward") {
    mode = Smoothing::Forward;
  } else if (smoothing == "fb" || smoothing == "forward-backward") {
    mode = Smoothing::ForwardBackward;
  } else {
    throw config_error("unknown smoothing '" + smoothing + "' (valid: forward, fb)");
  }

  ArConfig ar = make_ar_config(order, intercept, mode);
  ar.hierarchy.theta0 = ar.hierarchy.family.ridge_prior(cfg.get_double("z.prior.ridge", 1.0),
                                                        cfg.get_double("z.prior.shape", 2.0),
                                                        cfg.get_double("z.prior.rate", 0.2));
  apply_hierarchy_config(ar.hierarchy, cfg);
  const ArFit fit = ar_fit(ar, signal);
  for (std::size_t i = 0; i < fit.steps.size(); ++i) {
    const auto& s = fit.steps[i];
    StepRecord r = base_record(s.t + 1, "ar-linreg", s.diag);
    for (int j = 0; j < s.coef_mean.size(); ++j) {
      r.posterior_summary.emplace_back("coef_" + std::to_string(j), s.coef_mean[j]);
    }
    for (int j = 0; j < s.coef_var.size(); ++j) {
      r.posterior_summary.emplace_back("coef_var_" + std::to_string(j), s.coef_var[j]);
    }
    r.posterior_summary.emplace_back("noise_var", s.noise_var_mean);
    if (ar.smoothing == Smoothing::ForwardBackward) {
      r.eta_eff = fit.posteriors[i].eta;
    }
    mark_change(r, changes, !opt.changes_path.empty());
    sink.stream() << to_json_line(r) << "\n";
  }
  return 0;
}

int cmd_generate(const CommonOptions& opt, SyntheticSpec spec, const std::string& scenario_name_) {
  spec.scenario = scenario_from_name(scenario_name_);
  const GeneratedStream stream = generate(spec);
  OutputSink sink(opt.output);
  std::ostream& out = sink.stream();
  if (!stream.vectors.empty()) {
    for (const auto& v : stream.vectors) {
      for (int j = 0; j < v.size(); ++j) out << (j ? "," : "") << fmt_g17(v[j]);
      out << "\n";
    }
  } else {
    const bool binary = spec.scenario == Scenario::BinarySwitch;
    for (double v : stream.values) {
      if (binary) {
        out << static_cast<int>(v) << "\n";
      } else {
        out << fmt_g17(v) << "\n";
      }
    }
  }
  if (opt.output != "-") {
    std::ofstream side(opt.output + ".changes");
    if (!side) throw input_error("cannot write sidecar file '" + opt.output + ".changes'");
    side << "{\"change_trials\":[";
    for (std::size_t i = 0; i < stream.change_trials.size(); ++i) {
      side << (i ? "," : "") << stream.change_trials[i];
    }
    side << "],\"artifact_trials\":[";
    for (std::size_t i = 0; i < stream.artifact_trials.size(); ++i) {
      side << (i ? "," : "") << stream.artifact_trials[i];
    }
    side << "]}\n";
  }
  log_info("generated " + std::to_string(stream.size()) + " observations");
  return 0;
}

OptimizerConfig optimizer_config(const ConfigMap& cfg, bool baseline) {
  OptimizerConfig oc;
  oc.step_size = cfg.get_double("opt.step_size", 0.05);
  oc.epsilon = cfg.get_double("opt.epsilon", 1e-8);
  oc.phi1_0 = BetaParams(cfg.get_double("opt.phi1.alpha", 9.0), cfg.get_double("opt.phi1.beta", 1.0));
  oc.phi2_0 =
      BetaParams(cfg.get_double("opt.phi2.alpha", 9.5), cfg.get_double("opt.phi2.beta", 0.5));
  oc.fixed_w1 = cfg.get_double("opt.fixed_w1", 0.9);
  oc.fixed_w2 = cfg.get_double("opt.fixed_w2", 0.999);
  oc.levels = baseline ? 1 : cfg.get_int("opt.levels", 3);
  return oc;
}

int cmd_optdemo(const CommonOptions& opt, int iterations, int dim, double outlier_prob,
                double outlier_scale, double noise, std::uint64_t seed,
                const std::string& prefix) {
  const ConfigMap cfg = load_config(opt);
  QuadraticTestbed tb;
  tb.curvature = Eigen::VectorXd::LinSpaced(dim, 0.5, 2.0);
  tb.target = Eigen::VectorXd::Zero(dim);
  tb.x0 = Eigen::VectorXd::Constant(dim, 3.0);
  tb.grad_noise_sigma = noise;
  tb.outlier_prob = outlier_prob;
  tb.outlier_scale = outlier_scale;
  tb.iterations = iterations;
  tb.seed = seed;

  const auto write_trace = [&](const TestbedTrace& trace, const std::string& family,
                               const std::string& path) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot open output file '" + path + "'");
    for (std::size_t i = 0; i < trace.loss.size(); ++i) {
      StepRecord r;
      r.t = static_cast<long>(i) + 1;
      r.family = family;
      r.e_w = trace.e_w1[i];
      r.e_b = trace.e_w2[i];
      r.posterior_summary = {{"loss", trace.loss[i]},
                             {"e_w1", trace.e_w1[i]},
                             {"e_w2", trace.e_w2[i]}};
      out << to_json_line(r) << "\n";
    }
  };

  const TestbedTrace ada = train_testbed(tb, optimizer_config(cfg, false));
  const TestbedTrace fixed = train_testbed(tb, optimizer_config(cfg, true));
  write_trace(ada, "adafvf-testbed", prefix + ".adafvf.jsonl");
  write_trace(fixed, "fixed-decay-testbed", prefix + ".baseline.jsonl");
  if (iterations > 0) {
    std::cerr << "adafvf final loss: " << fmt_g17(ada.final_loss)
              << ", fixed-decay final loss: " << fmt_g17(fixed.final_loss) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming Bayesian filtering with learned forgetting"};
  app.require_subcommand(1);

  CommonOptions filter_opt, smooth_opt, ar_opt, gen_opt, opt_opt;
  std::string filter_family = "gaussian", smooth_family = "gaussian";

  auto* filter_cmd = app.add_subcommand("filter", "run the adaptive filter over a stream");
  add_common(filter_cmd, filter_opt);
  filter_cmd->add_option("-f,--family", filter_family,
                         "observation family: bernoulli, gaussian, gaussian-niw, linreg");

  auto* smooth_cmd = app.add_subcommand("smooth", "offline forward-backward smoothing");
  add_common(smooth_cmd, smooth_opt);
  smooth_cmd->add_option("-f,--family", smooth_family, "observation family");

  auto* ar_cmd = app.add_subcommand("ar", "adaptive autoregressive fit of a scalar signal");
  add_common(ar_cmd, ar_opt);
  int ar_order = 10;
  std::string ar_smoothing = "forward";
  bool ar_intercept = false;
  ar_cmd->add_option("-p,--order", ar_order, "autoregressive order");
  ar_cmd->add_option("--smoothing", ar_smoothing, "forward or fb");
  ar_cmd->add_flag("--intercept", ar_intercept, "include an intercept regressor");

  auto* gen_cmd = app.add_subcommand("generate", "generate a benchmark scenario stream");
  add_common(gen_cmd, gen_opt, false);
  std::string gen_scenario = "binary-switch";
  SyntheticSpec spec;
  gen_cmd->add_option("-s,--scenario", gen_scenario,
                      "binary-switch, gaussian-2d-walk, sinusoid-mix, impulse-artifacts");
  gen_cmd->add_option("--seed", spec.seed, "random seed");
  gen_cmd->add_option("-n,--count", spec.n, "stream length");
  gen_cmd->add_option("--period", spec.period, "binary-switch regime length");
  gen_cmd->add_option("--p-high", spec.p_high, "binary-switch high probability");
  gen_cmd->add_option("--p-low", spec.p_low, "binary-switch low probability");
  gen_cmd->add_option("--segment-length", spec.segment_length, "gaussian walk segment length");
  gen_cmd->add_option("--walk-sigma", spec.walk_sigma, "gaussian walk step deviation");
  gen_cmd->add_option("--waves", spec.wave_count, "sinusoid mixture size");
  gen_cmd->add_option("--noise-var", spec.noise_var, "sinusoid observation noise variance");
  gen_cmd->add_option("--impulse", spec.impulse_magnitude, "impulse amplitude");

  auto* opt_cmd = app.add_subcommand("optdemo", "gradient optimizer comparison on a noisy bowl");
  add_common(opt_cmd, opt_opt, false);
  int od_iterations = 500, od_dim = 8;
  double od_outlier_prob = 0.01, od_outlier_scale = 100.0, od_noise = 0.5;
  std::uint64_t od_seed = 1;
  std::string od_prefix = "optdemo";
  opt_cmd->add_option("--iterations", od_iterations, "optimization steps");
  opt_cmd->add_option("--dim", od_dim, "problem dimension");
  opt_cmd->add_option("--outlier-prob", od_outlier_prob, "probability of an outlier gradient");
  opt_cmd->add_option("--outlier-scale", od_outlier_scale, "outlier magnitude factor");
  opt_cmd->add_option("--noise", od_noise, "gradient noise deviation");
  opt_cmd->add_option("--seed", od_seed, "random seed");
  opt_cmd->add_option("--prefix", od_prefix, "output file prefix");

  try {
    app.parse(argc, argv);
    if (filter_cmd->parsed()) return cmd_filter(filter_opt, filter_family, false);
    if (smooth_cmd->parsed()) return cmd_filter(smooth_opt, smooth_family, true);
    if (ar_cmd->parsed()) return cmd_ar(ar_opt, ar_order, ar_smoothing, ar_intercept);
    if (gen_cmd->parsed()) return cmd_generate(gen_opt, spec, gen_scenario);
    if (opt_cmd->parsed()) {
      return cmd_optdemo(opt_opt, od_iterations, od_dim, od_outlier_prob, od_outlier_scale,
                         od_noise, od_seed, od_prefix);
    }
    return 2;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const input_error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 1;
  } catch (const config_error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const numerical_error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::domain_error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
