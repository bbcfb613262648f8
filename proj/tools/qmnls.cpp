#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cli_config.hpp"
#include "output.hpp"
#include "qmnls/checkpoint.hpp"
#include "qmnls/datum.hpp"
#include "qmnls/errors.hpp"
#include "qmnls/evolution.hpp"
#include "qmnls/kernel_bounds.hpp"
#include "qmnls/limits.hpp"
#include "qmnls/solitons.hpp"

namespace fs = std::filesystem;
using namespace qmnls;
using namespace qmnls::cli;

namespace {

struct Options {
  std::string config;
  std::string out = ".";
  unsigned threads = 1;
  double s = 1.0;
  std::string profile = "special";
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string hs_column(double s) { return "hs_" + num(s); }

void summary(RunLog& log, const std::string& line) {
  std::cout << line << '\n';
  log.line(line);
}

void write_diagnostics(const fs::path& path, const Diagnostics& d) {
  std::vector<std::string> header = {"t", "mass", "energy"};
  for (const auto& h : d.hs_norms) header.push_back(hs_column(h.s));
  CsvWriter csv(path, header);
  for (std::size_t i = 0; i < d.samples(); ++i) {
    csv.cell(d.times[i]).cell(d.mass[i]).cell(d.energy[i]);
    for (const auto& h : d.hs_norms) csv.cell(h.values[i]);
    csv.end_row();
  }
}

double relative_drift(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double worst = 0.0;
  for (double x : v) worst = std::max(worst, std::abs(x - v.front()));
  return v.front() != 0.0 ? worst / std::abs(v.front()) : worst;
}

int run_evolve(const Options& o, RunLog& log) {
  const RunConfig cfg = parse_run_config(read_text(o.config));
  const fs::path out = o.out;
  try {
    const EvolveResult res = evolve(cfg);
    write_diagnostics(out / "diagnostics.csv", res.diagnostics);
    if (!res.checkpoints.empty()) {
      fs::create_directories(out / "checkpoints");
      for (const auto& snap : res.checkpoints)
        write_checkpoint(out / "checkpoints" / ("step_" + std::to_string(snap.step) + ".bin"), snap.state, cfg.eps,
                         snap.t);
    }
    write_checkpoint(out / "final.bin", res.final_state, cfg.eps, cfg.t_final);
    summary(log, "evolve: datum=" + datum_id(cfg.datum) + " eps=" + num(cfg.eps) + " steps=" +
                     std::to_string(cfg.steps()) + " mass_drift=" + num(relative_drift(res.diagnostics.mass)) +
                     " energy_drift=" + num(relative_drift(res.diagnostics.energy)));
  } catch (const EvolutionAborted& e) {
    write_diagnostics(out / "diagnostics.csv", e.last_good());
    throw;
  }
  return 0;
}

int run_sweep(const Options& o, RunLog& log) {
  const SweepConfig cfg = parse_sweep_config(read_text(o.config));
  const SweepResult res = semiclassical_sweep(cfg, o.threads);
  CsvWriter csv(fs::path(o.out) / "sweep.csv", {"eps", "sup_err", "s", "T", "dt", "n", "L", "datum_id"});
  bool any_failed = false;
  for (std::size_t i = 0; i < res.eps_values.size(); ++i) {
    csv.cell(res.eps_values[i]).cell(res.sup_errors[i]).cell(res.meta.s).cell(res.meta.t_final).cell(res.meta.dt);
    csv.cell(res.meta.n).cell(res.meta.length).cell(res.meta.datum_id).end_row();
    if (res.failed[i]) {
      any_failed = true;
      std::cerr << "eps=" << num(res.eps_values[i]) << " failed: " << res.failure[i] << '\n';
      log.line("eps=" + num(res.eps_values[i]) + " failed: " + res.failure[i]);
    }
  }
  std::string errs;
  for (double e : res.sup_errors) errs += (errs.empty() ? "" : ",") + num(e);
  summary(log, "sweep-eps: s=" + num(res.meta.s) + (res.meta.within_hypothesis ? "" : " (outside s > 1/2)") +
                   " sup_err=[" + errs + "]");
  return any_failed ? 1 : 0;
}

int run_limit(const Options& o, RunLog& log) {
  LimitConfig cfg;
  if (!o.config.empty()) {
    cfg = parse_limit_config(read_text(o.config));
  } else {
    cfg.s = o.s;
    cfg.profile = o.profile;
    if (cfg.profile != "special") throw ConfigError("--profile: only 'special' is available");
  }
  const fs::path out = o.out;
  const PlateauReport rep = plateau_report(cfg.s);
  write_text(out / "plateau_report.txt", rep.to_text());
  const SpectralWeight w = special_profile_weight(cfg.s);
  CsvWriter csv(out / "limit_integral.csv", {"lambda", "value", "error", "intervals", "bessel"});
  for (double lambda : cfg.lambdas) {
    const LimitIntegral li = limit_integral_at(w, lambda);
    const double bessel = lambda > 0.0 ? special_profile_limit_bessel(lambda) : 0.0;
    csv.cell(lambda).cell(li.value).cell(li.error).cell(li.intervals).cell(bessel).end_row();
  }
  summary(log, "limit-integral: s=" + num(cfg.s) + " plateau=" + format_double(rep.plateau) +
                   " computed=" + format_double(rep.computed_constant) + " stated=" + format_double(rep.stated_constant) +
                   " diff_stated=" + num(rep.stated_difference()));
  return 0;
}

int run_soliton(const Options& o, RunLog& log) {
  const SolitonConfig cfg = parse_soliton_config(read_text(o.config));
  const fs::path out = o.out;
  const SolitonProblem& p = cfg.problem;
  const Field init = make_field(GaussianDatum{cfg.init_amplitude, cfg.init_width, 0.0}, p.grid());
  try {
    const SolitonResult r = petviashvili_solve(p, init, cfg.tol, cfg.max_iter);
    write_soliton(out / "soliton.bin", p, r);
    CsvWriter profile(out / "profile.csv", {"x", "Q", "v"});
    for (std::size_t j = 0; j < r.Q.size(); ++j)
      profile.cell(p.grid().x(j)).cell(r.Q[j].real()).cell(r.v[j].real()).end_row();
    CsvWriter gam(out / "gammas.csv", {"iteration", "gamma"});
    for (std::size_t i = 0; i < r.gammas.size(); ++i) gam.cell(i + 1).cell(r.gammas[i]).end_row();
    summary(log, "soliton: eps=" + num(p.eps) + " tau=" + num(p.tau) + " iterations=" + std::to_string(r.iterations) +
                     " residual=" + num(r.residual_pde) + " pohozaev=" + num(r.residual_pohozaev) +
                     " nehari=" + num(r.residual_nehari) + " action=" + format_double(r.action));
  } catch (const SolitonNotConverged& e) {
    std::ostringstream ss;
    ss << "not converged after " << e.iterations() << " iterations\n"
       << "last gamma " << format_double(e.gamma()) << "\n"
       << "last residual " << format_double(e.residual()) << "\n";
    write_text(out / "nonconvergence.txt", ss.str());
    std::cerr << ss.str();
    throw;
  }

  if (!cfg.nonexistence_dims.empty()) {
    std::string text;
    for (int d : cfg.nonexistence_dims) {
      text += nonexistence_report(d).to_text() + "\n";
      text += nonexistence_report(d, true).to_text() + "\n";
    }
    write_text(out / "nonexistence.txt", text);
  }
  if (!cfg.scaling_s.empty()) {
    const ScalingFit fit = scaling_exponents_check(cfg.scaling_s);
    std::vector<std::string> header = {"k", "log2_l3_cube"};
    for (double s : fit.s_values) header.push_back("log2_" + hs_column(s));
    CsvWriter csv(out / "scaling.csv", header);
    for (std::size_t i = 0; i < fit.ks.size(); ++i) {
      csv.cell(std::to_string(fit.ks[i])).cell(fit.log2_l3_cube[i]);
      for (const auto& series : fit.log2_hs) csv.cell(series[i]);
      csv.end_row();
    }
    CsvWriter slopes(out / "scaling_slopes.csv", {"quantity", "slope", "expected"});
    slopes.cell(std::string("l3_cube")).cell(fit.l3_slope).cell(2.0).end_row();
    for (std::size_t i = 0; i < fit.s_values.size(); ++i)
      slopes.cell(hs_column(fit.s_values[i])).cell(fit.hs_slopes[i]).cell(fit.s_values[i] + 0.5).end_row();
  }
  if (cfg.trilinear_samples > 0) {
    const TrilinearAudit a = trilinear_audit(cfg.trilinear_samples);
    CsvWriter csv(out / "trilinear.csv", {"samples", "max_ratio", "max_ratio_refined", "relative_change"});
    csv.cell(a.samples).cell(a.max_ratio).cell(a.max_ratio_refined).cell(a.relative_change).end_row();
  }
  return 0;
}

void write_audit(const fs::path& path, const std::vector<AuditRow>& rows) {
  CsvWriter csv(path, {"case", "xi", "tau", "xi1_or_na", "value", "bound", "ratio"});
  for (const auto& r : rows) {
    csv.cell(r.kind).cell(r.xi).cell(r.tau);
    if (r.xi1)
      csv.cell(*r.xi1);
    else
      csv.cell(std::string("na"));
    csv.cell(r.value).cell(r.bound).cell(r.ratio).end_row();
  }
}

std::string sanitize(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

int run_verify(const Options& o, RunLog& log) {
  const AuditConfig cfg = parse_audit_config(read_text(o.config));
  const fs::path out = o.out;
  std::vector<AuditReport> reports;
  auto wants = [&](const char* name) { return std::find(cfg.audits.begin(), cfg.audits.end(), name) != cfg.audits.end(); };

  if (wants("root")) reports.push_back(root_formula_audit(cfg.root_samples, cfg.root_seed));
  if (wants("lower")) reports.push_back(lower_bound_audit(cfg.eps, cfg.xi_grid, cfg.tau_fraction));
  if (wants("upper")) reports.push_back(upper_bound_audit(cfg.eps, cfg.xi_grid, cfg.tau_fraction));
  if (wants("ratio91")) reports.push_back(ratio91_audit(cfg.eps, cfg.xi_grid));
  if (wants("phi")) reports.push_back(phi_kernel_audit(cfg.phi_beta, cfg.phi_gamma, cfg.phi_a));
  if (wants("tail")) reports.push_back(tail_integral_audit(cfg.tail_A, cfg.tail_a));
  if (wants("smoothing")) {
    const SmoothingAudit a =
        smoothing_supremum_sample(cfg.smoothing, cfg.smoothing_samples, cfg.smoothing_xi_max, o.threads);
    AuditReport rep;
    rep.name = "smoothing";
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
      const auto& s = a.samples[i];
      rep.rows.push_back({"smoothing_case" + std::to_string(s.proof_case), s.xi, s.tau, std::nullopt, s.value,
                          a.running_max[i], a.worst > 0.0 ? s.value / a.worst : 0.0});
    }
    rep.checks.push_back({"final decade raises max < 5%", a.final_decade_increase < 0.05,
                          "increase " + num(a.final_decade_increase)});
    rep.checks.push_back({"no flagged samples", a.flagged == 0, std::to_string(a.flagged) + " flagged"});
    rep.checks.push_back({"finite supremum", std::isfinite(a.worst), "max " + num(a.worst)});
    reports.push_back(std::move(rep));
  }

  CsvWriter checks(out / "audit_summary.csv", {"audit", "check", "ok", "detail"});
  std::size_t failed = 0, total = 0;
  for (const auto& rep : reports) {
    write_audit(out / ("audit_" + rep.name + ".csv"), rep.rows);
    for (const auto& c : rep.checks) {
      ++total;
      if (!c.ok) {
        ++failed;
        std::cerr << rep.name << ": " << c.name << " FAILED (" << c.detail << ")\n";
      }
      checks.cell(rep.name).cell(sanitize(c.name)).cell(std::string(c.ok ? "1" : "0")).cell(sanitize(c.detail)).end_row();
    }
  }
  summary(log, "verify-kernels: " + std::to_string(total - failed) + "/" + std::to_string(total) + " checks passed");
  return failed == 0 ? 0 : 1;
}

int run_growth(const Options& o, RunLog& log) {
  const GrowthConfig cfg = parse_growth_config(read_text(o.config));
  const fs::path out = o.out;
  std::vector<GrowthResult> results;
  for (double s : cfg.s_values) results.push_back(growth_tracking(cfg.run, s, cfg.margin));

  std::vector<std::string> header = {"t"};
  for (const auto& r : results) header.push_back(hs_column(r.s));
  CsvWriter csv(out / "growth.csv", header);
  for (std::size_t i = 0; i < results.front().times.size(); ++i) {
    csv.cell(results.front().times[i]);
    for (const auto& r : results) csv.cell(r.norms[i]);
    csv.end_row();
  }
  CsvWriter fit(out / "growth_fit.csv", {"s", "slope", "intercept", "exponent", "margin", "within_bound"});
  bool ok = true;
  std::string line = "growth:";
  for (const auto& r : results) {
    fit.cell(r.s).cell(r.slope).cell(r.intercept).cell(r.exponent).cell(r.margin);
    fit.cell(std::string(r.within_bound ? "1" : "0")).end_row();
    ok = ok && r.within_bound;
    line += " s=" + num(r.s) + " slope=" + num(r.slope) + "/" + num(r.exponent) + (r.within_bound ? "" : " VIOLATED");
  }
  summary(log, line);
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral solver and verification experiments for the quantum-modified NLS"};
  app.require_subcommand(1);
  Options o;

  struct Sub {
    const char* name;
    const char* help;
    int (*run)(const Options&, RunLog&);
  };
  const Sub subs[] = {
      {"evolve", "Split-step evolution with diagnostics and checkpoints", run_evolve},
      {"sweep-eps", "Semiclassical sweep over eps against the eps = 0 reference", run_sweep},
      {"limit-integral", "Plateau and oscillatory limit integral of the special profile", run_limit},
      {"soliton", "Petviashvili ground state and identity residuals", run_soliton},
      {"verify-kernels", "Root, kernel and smoothing audits", run_verify},
      {"growth", "Sobolev norm growth against the one-sided exponent", run_growth},
  };
  int (*chosen)(const Options&, RunLog&) = nullptr;
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    auto* cfg = sub->add_option("--config", o.config, "JSON config file");
    if (std::string(s.name) == "limit-integral") {
      sub->add_option("--s", o.s, "Sobolev order");
      sub->add_option("--profile", o.profile, "Datum profile (special)");
    } else {
      cfg->required();
    }
    sub->add_option("--out", o.out, "Output directory");
    sub->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
    sub->callback([&chosen, run = s.run] { chosen = run; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    fs::create_directories(o.out);
  } catch (const std::exception& e) {
    std::cerr << "error: cannot create output directory: " << e.what() << '\n';
    return 2;
  }
  RunLog log(o.out);
  std::string cmdline;
  for (int i = 0; i < argc; ++i) cmdline += (i ? " " : "") + std::string(argv[i]);
  log.line("start " + cmdline);

  int code = 0;
  try {
    code = chosen(o, log);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    code = 2;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    code = 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    code = 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    code = 1;
  }
  log.line("exit " + std::to_string(code));
  return code;
}
