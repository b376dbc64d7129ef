#include "afnlab/cli.hpp"

#include "afnlab/config.hpp"
#include "afnlab/correlation.hpp"
#include "afnlab/lattice.hpp"
#include "afnlab/obs.hpp"
#include "afnlab/renewal.hpp"
#include "afnlab/schedule.hpp"
#include "afnlab/tails.hpp"
#include "afnlab/tower.hpp"
#include "afnlab/ulam.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"

namespace afn {

namespace {

using nlohmann::ordered_json;

std::string fmt17(double v) {
  char buf[64];
  snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf);
}

void write_json(const ordered_json& j, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << j.dump(1) << '\n';
}

// Build products shared by the subcommands, constructed on demand.
struct Pipeline {
  ExperimentConfig cfg;
  MapParams p;
  std::optional<OrbitLattice> lat;
  std::optional<ReturnSchedule> sched;
  std::optional<DensityVector> h;
  std::optional<CumulativeMeasure> mu0;
  std::optional<DensityVector> h_tau;
  std::optional<CumulativeMeasure> mu_tau;
  std::optional<MeanData> means;

  explicit Pipeline(const ExperimentConfig& c) : cfg(c), p(c.alpha, c.b) {}

  const OrbitLattice& lattice() {
    if (!lat) lat = build_lattice_auto(p, cfg.caps.depth_n, 1e10);
    return *lat;
  }
  const ReturnSchedule& schedule() {
    if (!sched) sched = build_schedule(p, lattice(), cfg.caps.phi_cap);
    return *sched;
  }
  const CumulativeMeasure& mu0_cdf() {
    if (!mu0) {
      Grid gy = Grid::uniform(lattice().e0, 1.0, (size_t)cfg.caps.grid_cells);
      UlamOperator op = assemble_ulam(induced_branchset(lattice(), schedule()), gy,
                                      OperatorKind::InducedF);
      h = invariant_density(op);
      mu0 = CumulativeMeasure(*h);
    }
    return *mu0;
  }
  const CumulativeMeasure& mu_tau_cdf() {
    if (!mu_tau) {
      Grid gy = Grid::uniform(lattice().e0, 1.0, (size_t)cfg.caps.grid_cells);
      long long m_cap = std::min(cfg.caps.phi_cap * 2, lattice().depth_n());
      UlamOperator op = assemble_ulam(first_return_branchset(lattice(), m_cap), gy,
                                      OperatorKind::FirstReturn);
      h_tau = invariant_density(op);
      mu_tau = CumulativeMeasure(*h_tau);
    }
    return *mu_tau;
  }
  const MeanData& mean_data() {
    if (!means) means = estimate_means(schedule(), lattice(), mu0_cdf(), mu_tau_cdf());
    return *means;
  }
};

int cmd_induce(Pipeline& pl) {
  namespace fs = std::filesystem;
  fs::create_directories(pl.cfg.outputs);
  const OrbitLattice& lat = pl.lattice();
  const ReturnSchedule& s = pl.schedule();
  export_schedule_csv(s, lat, pl.cfg.outputs + "/schedule.csv");
  export_schedule_json(s, lat, pl.cfg.outputs + "/schedule.json");

  LatticeResiduals res = lattice_residuals(lat);
  ordered_json j;
  j["e0"] = fmt17(lat.e0);
  j["depth_n"] = lat.depth_n();
  j["depth_k"] = lat.depth_k();
  j["y_first"] = lat.y_first;
  j["x_residual_max"] = res.x_max;
  j["y_residual_max"] = res.y_max;
  j["e_forward_residual_max"] = res.e_max;
  j["sigma"] = lat.sigma;
  j["tau_at_1"] = lat.tau1;
  j["lambda"] = lat.lambda;
  double ylen = 1.0 - lat.e0;
  double cov = s.covered_length / ylen;
  j["covered_fraction"] = cov;
  j["uncovered_length"] = s.uncovered_length;
  j["cells"] = s.cells.size();
  write_json(j, pl.cfg.outputs + "/lattice.json");
  double uncovered_frac = 1.0 - cov;
  return uncovered_frac > 1e-3 ? 2 : 0;
}

ordered_json fit_to_json(const TailFit& f) {
  ordered_json j;
  j["beta_hat"] = f.beta_hat;
  j["c_hat"] = f.c_hat;
  j["c_limit"] = f.c_limit;
  j["residual_exponent"] = f.residual_exponent;
  j["residual_exponent_limit"] = f.residual_exponent_limit;
  j["window"] = {f.window_lo, f.window_hi};
  return j;
}

int cmd_tails(Pipeline& pl) {
  namespace fs = std::filesystem;
  fs::create_directories(pl.cfg.outputs);
  size_t n_max = (size_t)std::min<long long>(pl.cfg.caps.n_max, pl.cfg.caps.phi_cap);
  TailSeries tphi = tail_phi(pl.schedule(), pl.mu0_cdf(), n_max);
  TailSeries ttau = tail_tau(pl.lattice(), pl.mu_tau_cdf(), n_max);
  export_tail_csv(tphi, pl.cfg.outputs + "/tails_phi.csv");
  export_tail_csv(ttau, pl.cfg.outputs + "/tails_tau.csv");
  size_t lo = 20, hi = (size_t)(0.9 * (double)n_max);
  TailFit fphi = fit_tail(tphi, lo, hi, pl.p.beta);
  TailFit ftau = fit_tail(ttau, lo, hi, pl.p.beta);
  write_json(fit_to_json(fphi), pl.cfg.outputs + "/fit_phi.json");
  write_json(fit_to_json(ftau), pl.cfg.outputs + "/fit_tau.json");
  const MeanData& md = pl.mean_data();
  ordered_json j;
  j["phi_bar"] = md.phi_bar;
  j["phi_bar_err"] = md.phi_bar_err;
  j["tau_bar"] = md.tau_bar;
  j["tau_bar_err"] = md.tau_bar_err;
  j["rho_bar"] = md.rho_bar;
  j["rho_bar_err"] = md.rho_bar_err;
  j["product_identity_gap"] =
      std::fabs(md.phi_bar - md.rho_bar * md.tau_bar) / md.phi_bar;
  write_json(j, pl.cfg.outputs + "/means.json");
  return 0;
}

int cmd_ulam(Pipeline& pl) {
  namespace fs = std::filesystem;
  fs::create_directories(pl.cfg.outputs);
  Grid gy = Grid::uniform(pl.lattice().e0, 1.0, (size_t)pl.cfg.caps.grid_cells);
  UlamOperator op = assemble_ulam(induced_branchset(pl.lattice(), pl.schedule()), gy,
                                  OperatorKind::InducedF);
  {
    std::ofstream f(pl.cfg.outputs + "/induced_matrix.txt");
    for (size_t r = 0; r < op.n(); ++r)
      for (size_t k = op.rowptr[r]; k < op.rowptr[r + 1]; ++k)
        f << r << ' ' << op.col[k] << ' ' << fmt17(op.val[k]) << '\n';
  }
  DensityVector h = invariant_density(op);
  {
    std::ofstream f(pl.cfg.outputs + "/induced_density.csv");
    f << "cell_left,cell_right,weight\n";
    for (size_t i = 0; i < h.grid.cells(); ++i)
      f << fmt17(h.grid.left(i)) << ',' << fmt17(h.grid.right(i)) << ','
        << fmt17(h.weights[i]) << '\n';
  }
  SpectralReport sr = spectral_report(op);
  ordered_json j;
  j["leading_eigenvalue"] = sr.leading;
  j["second_modulus"] = sr.second_modulus;
  j["gap"] = sr.gap;
  j["row_sum_dev"] = op.max_row_sum_dev();
  j["remainder"] = op.remainder_total;
  j["flagged_rows"] = op.flagged_rows;
  write_json(j, pl.cfg.outputs + "/spectral.json");
  return op.remainder_total > 1e-3 ? 2 : 0;
}

int cmd_tower(Pipeline& pl) {
  namespace fs = std::filesystem;
  fs::create_directories(pl.cfg.outputs);
  Grid base = Grid::uniform(pl.lattice().e0, 1.0, 1024);
  TowerModel tm = build_tower(pl.p, pl.lattice(), pl.schedule(), pl.mu0_cdf(), base,
                              pl.cfg.caps.j_max);
  OperatorFamily fam = operator_family(tm);
  long long n_max = std::min<long long>(pl.cfg.caps.j_max, 50);
  std::vector<double> res = renewal_identity_residuals(fam, n_max);
  std::ofstream f(pl.cfg.outputs + "/renewal_residuals.csv");
  f << "n,residual,truncation_budget\n";
  double trunc = tm.truncated_column_mass();
  for (long long n = 1; n <= n_max; ++n)
    f << n << ',' << fmt17(res[(size_t)n]) << ',' << fmt17(trunc) << '\n';
  return 0;
}

// one row of the verification report
ordered_json row(const std::string& check, double statistic, double tolerance,
                 bool pass) {
  ordered_json r;
  r["check"] = check;
  r["statistic"] = statistic;
  r["tolerance"] = tolerance;
  r["pass"] = pass;
  return r;
}

int cmd_verify(Pipeline& pl, const std::vector<std::string>& which) {
  namespace fs = std::filesystem;
  fs::create_directories(pl.cfg.outputs);
  ordered_json rows = ordered_json::array();
  bool all_pass = true;
  auto add = [&](ordered_json r) {
    all_pass = all_pass && r["pass"].get<bool>();
    rows.push_back(std::move(r));
  };

  for (const std::string& wk : which) {
    if (wk == "h0") {
      size_t n_max = (size_t)std::min<long long>(pl.cfg.caps.n_max, pl.cfg.caps.phi_cap);
      TailSeries tphi = tail_phi(pl.schedule(), pl.mu0_cdf(), n_max);
      TailFit f = fit_tail(tphi, 20, std::min<size_t>(500, n_max), pl.p.beta);
      add(row("h0-tail-exponent", f.beta_hat, 0.1,
              std::fabs(f.beta_hat - pl.p.beta) <= 0.1));
      double resid_req = std::min(2.0 * pl.p.beta, pl.p.beta + 1.0) - 0.25;
      add(row("h0-residual-exponent", f.residual_exponent_limit, resid_req,
              f.residual_exponent_limit >= resid_req));
    } else if (wk == "h1") {
      size_t n_max = (size_t)std::min<long long>(pl.cfg.caps.n_max, pl.cfg.caps.phi_cap);
      H1Report h1 = check_H1(pl.schedule(), pl.mu0_cdf(), n_max);
      add(row("h1-trend-slope", h1.trend_slope, 0.1,
              std::fabs(h1.trend_slope) <= 0.1));
      add(row("h1-sup-ratio", h1.sup_ratio, 1e6, std::isfinite(h1.sup_ratio)));
    } else if (wk == "lemmaA1") {
      size_t j_max = std::min<size_t>(200, (size_t)pl.cfg.caps.n_max);
      CompareReturns cr = compare_returns(pl.schedule(), pl.lattice(), pl.mu0_cdf(),
                                          pl.mu_tau_cdf(), j_max, 2e-3);
      double worst = 0;
      bool ok = true;
      for (size_t j = 0; j <= j_max; ++j) {
        double gap = std::fabs(cr.lhs[j] - (cr.rhs_sum1[j] - cr.rhs_sum2[j]));
        worst = std::max(worst, gap - cr.budget[j]);
        ok = ok && gap <= cr.budget[j];
      }
      add(row("return-comparison-identity", worst, 0.0, ok));
    } else if (wk == "corA2") {
      CorollaryBound cb = corollary_bound(pl.schedule(), pl.lattice(), pl.mu0_cdf(),
                                          pl.mu_tau_cdf(), 10, 100, pl.mean_data());
      double worst = 0;
      for (size_t n = 10; n <= 100; ++n) worst = std::min(worst, cb.margin[n]);
      add(row("tail-sum-bound-margin", worst, 0.0, worst >= 0.0));
      const MeanData& md = pl.mean_data();
      double gap = std::fabs(md.phi_bar - md.rho_bar * md.tau_bar) / md.phi_bar;
      add(row("mean-product-identity", gap, 0.02, gap <= 0.02));
    } else if (wk == "renewal") {
      Grid base = Grid::uniform(pl.lattice().e0, 1.0, 1024);
      TowerModel tm = build_tower(pl.p, pl.lattice(), pl.schedule(), pl.mu0_cdf(),
                                  base, std::max<long long>(pl.cfg.caps.j_max, 52));
      OperatorFamily fam = operator_family(tm);
      std::vector<double> res = renewal_identity_residuals(fam, 50);
      double worst = 0;
      for (double r : res) worst = std::max(worst, r);
      add(row("renewal-equation", worst, 1e-8, worst <= 1e-8));
    } else if (wk == "decomposition") {
      Grid base = Grid::uniform(pl.lattice().e0, 1.0, 512);
      TowerModel tm = build_tower(pl.p, pl.lattice(), pl.schedule(), pl.mu0_cdf(),
                                  base, std::max<long long>(pl.cfg.caps.j_max, 64));
      std::vector<double> probe(tm.slots, 0.0);
      for (size_t c = 0; c < tm.cells(); ++c)
        for (long long i = 0; i < tm.height[c]; ++i)
          probe[tm.col_off[c] + (size_t)i] = tm.mass0[c] / (double)tm.height[c];
      DecompositionReport dr = check_decomposition(tm, probe, 30);
      double worst = 0;
      for (long long n = 1; n <= 30; ++n)
        worst = std::max(worst,
                         dr.residual[(size_t)n] - dr.trunc_budget[(size_t)n]);
      add(row("tower-decomposition", worst, 1e-8, worst <= 1e-8));
    } else if (wk == "spectra") {
      Grid gy = Grid::uniform(pl.lattice().e0, 1.0, (size_t)pl.cfg.caps.grid_cells);
      UlamOperator op = assemble_ulam(induced_branchset(pl.lattice(), pl.schedule()),
                                      gy, OperatorKind::InducedF);
      SpectralReport sr = spectral_report(op);
      add(row("leading-eigenvalue", sr.leading, 1e-8,
              std::fabs(sr.leading - 1.0) <= 1e-8));
      add(row("spectral-gap", sr.gap, 0.0, sr.gap > 0.0));
    } else {
      std::cerr << "unknown verify target: " << wk << "\n";
      return 1;
    }
  }
  ordered_json j;
  j["alpha"] = pl.cfg.alpha;
  j["b"] = pl.cfg.b;
  j["rows"] = rows;
  j["all_pass"] = all_pass;
  write_json(j, pl.cfg.outputs + "/verify_report.json");
  for (const auto& r : rows)
    std::cout << (r["pass"].get<bool>() ? "[PASS] " : "[FAIL] ")
              << r["check"].get<std::string>()
              << " statistic=" << r["statistic"].get<double>() << "\n";
  return all_pass ? 0 : 4;
}

std::vector<long long> log_spaced(long long lo, long long hi, int per_decade) {
  std::vector<long long> out;
  double f = std::pow(10.0, 1.0 / per_decade);
  double v = (double)lo;
  long long last = -1;
  while (v <= (double)hi + 0.5) {
    long long n = (long long)std::llround(v);
    if (n != last) out.push_back(n);
    last = n;
    v *= f;
  }
  if (out.back() != hi) out.push_back(hi);
  return out;
}

int cmd_correlate(Pipeline& pl, const std::string& mode) {
  namespace fs = std::filesystem;
  fs::create_directories(pl.cfg.outputs);
  bool finite = mode == "finite";
  if (finite != pl.p.finite_measure) {
    std::cerr << "mode mismatch: alpha=" << pl.cfg.alpha << " is "
              << (pl.p.finite_measure ? "finite" : "infinite") << "\n";
    return 3;
  }
  Observable v = make_observable(pl.cfg.observables[0], pl.lattice().e0);
  Observable w = make_observable(pl.cfg.observables[1], pl.lattice().e0);
  long long n_max = pl.cfg.caps.n_max;
  ordered_json summary;
  std::ofstream f(pl.cfg.outputs + "/correlate_" + mode + ".csv");
  f << "n,rho,leading,residual,budget\n";

  if (finite) {
    Grid gx = Grid::graded(0.0, 1.0, (size_t)pl.cfg.caps.grid_cells, 3.0);
    UlamOperator map_op = assemble_ulam(map_branchset(pl.p, pl.lattice().e0), gx,
                                        OperatorKind::MapF);
    // f-invariant density through the induced measure
    PushupResult pu = pushup_measure(pl.p, pl.schedule(), pl.mu0_cdf(),
                                     pl.cfg.caps.j_max * 8, gx);
    DensityVector mu;
    mu.grid = gx;
    mu.weights.resize(gx.cells());
    for (size_t i = 0; i < gx.cells(); ++i)
      mu.weights[i] = pu.accumulated[i] / std::max(gx.width(i), 1e-300);
    mu.normalize(1.0);
    std::vector<double> rho = correlation_operator(map_op, v, w, mu, n_max);
    CumulativeMeasure mu_cdf(mu);
    double iv = 0, iw = 0;
    for (size_t i = 0; i < gx.cells(); ++i) {
      double cm = mu_cdf.mass(gx.left(i), gx.right(i));
      iv += v.eval(gx.mid(i)) * cm;
      iw += w.eval(gx.mid(i)) * cm;
    }
    size_t tail_n = (size_t)std::min<long long>(pl.cfg.caps.phi_cap,
                                                std::max<long long>(512, 2 * n_max));
    TailSeries tphi = tail_phi(pl.schedule(), pl.mu0_cdf(), tail_n);
    DecayPrediction dp =
        predict_finite(tphi, pl.mean_data(), iv, iw, n_max, pl.p.beta);
    std::vector<double> centered((size_t)n_max + 1);
    for (long long n = 0; n <= n_max; ++n)
      centered[(size_t)n] = rho[(size_t)n] - iv * iw;
    for (long long n = 0; n <= n_max; ++n) {
      double lead = dp.leading[(size_t)n];
      f << n << ',' << fmt17(centered[(size_t)n]) << ',' << fmt17(lead) << ','
        << fmt17(centered[(size_t)n] - lead) << ',' << fmt17(0.0) << '\n';
    }
    size_t lo = 20, hi = (size_t)std::min<long long>(300, n_max);
    LinFit lf = loglog_fit(centered, lo, hi);
    summary["slope"] = lf.slope;
    summary["slope_expected"] = -(pl.p.beta - 1.0);
    summary["int_v"] = iv;
    summary["int_w"] = iw;
    summary["error_label"] = dp.error_label;
    // Monte Carlo cross-check at a few n
    std::vector<long long> nlist{1, 10, 100};
    McCorrelation mc = correlation_montecarlo(pl.p, v, w, nlist, pl.cfg.mc_samples,
                                              pl.cfg.burn_in, pl.cfg.seed);
    ordered_json mcrows = ordered_json::array();
    for (size_t k = 0; k < nlist.size(); ++k) {
      ordered_json r;
      r["n"] = nlist[k];
      r["mc"] = mc.rho[k] - mc.int_v * mc.int_w;
      r["se"] = mc.se[k];
      r["operator"] = centered[(size_t)nlist[k]];
      mcrows.push_back(r);
    }
    summary["monte_carlo"] = mcrows;
  } else {
    long long phi_need = std::max(pl.cfg.caps.phi_cap, 2 * n_max + 64);
    ReturnSchedule sched = build_schedule(pl.p, pl.lattice(), phi_need);
    Grid base = Grid::schedule_aligned(sched, 4e-6, 512);
    TowerModel tm = build_tower(pl.p, pl.lattice(), sched, pl.mu0_cdf(), base,
                                std::max(pl.cfg.caps.j_max, n_max + phi_need / 2));
    std::vector<long long> nrep = log_spaced(1, n_max, 12);
    InfiniteCorrelation ic = correlation_infinite(pl.p, tm, v, w, nrep);
    DecayPrediction dp = predict_infinite(pl.p.beta, ic.int_v, ic.int_w, n_max);
    for (size_t k = 0; k < nrep.size(); ++k) {
      double lead = dp.leading[(size_t)nrep[k]];
      f << nrep[k] << ',' << fmt17(ic.rho[k]) << ',' << fmt17(lead) << ','
        << fmt17(ic.rho[k] - lead) << ',' << fmt17(ic.budget[k]) << '\n';
    }
    // slope over the reported points
    std::vector<double> xs, ys;
    for (size_t k = 0; k < nrep.size(); ++k) {
      if (nrep[k] >= 100 && ic.rho[k] > 0) {
        xs.push_back(std::log((double)nrep[k]));
        ys.push_back(std::log(ic.rho[k]));
      }
    }
    LinFit lf = linear_fit(xs, ys);
    summary["slope"] = lf.slope;
    summary["slope_expected"] = pl.p.beta - 1.0;
    summary["int_v"] = ic.int_v;
    summary["int_w"] = ic.int_w;
    summary["q"] = dp.q;
    summary["d0"] = dp.d0;
    double last_ratio = 0;
    for (size_t k = 0; k < nrep.size(); ++k)
      if (ic.rho[k] > 0)
        last_ratio = std::pow((double)nrep[k], 1.0 - pl.p.beta) * ic.rho[k] /
                     (ic.int_v * ic.int_w);
    summary["d0_ratio_terminal"] = last_ratio;
    summary["truncation_dominated"] = ic.truncation_dominated;
  }
  write_json(summary, pl.cfg.outputs + "/correlate_summary_" + mode + ".json");
  return 0;
}

int cmd_report(const ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  ordered_json rep;
  std::vector<std::string> names;
  if (fs::exists(cfg.outputs))
    for (const auto& e : fs::directory_iterator(cfg.outputs))
      if (e.path().extension() == ".json" && e.path().filename() != "report.json")
        names.push_back(e.path().string());
  std::sort(names.begin(), names.end());
  for (const auto& n : names) {
    std::ifstream f(n);
    ordered_json j;
    f >> j;
    rep[fs::path(n).filename().string()] = j;
  }
  write_json(rep, cfg.outputs + "/report.json");
  std::cout << "collated " << names.size() << " reports\n";
  return 0;
}

} // namespace

int cli_run(const std::vector<std::string>& args) {
  CLI::App app{"general-return inducing laboratory for interval maps"};
  app.require_subcommand(1);

  std::string config_path;
  double alpha = -1, b = -1;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out;
  app.add_option("--config", config_path, "experiment config JSON");
  app.add_option("--alpha", alpha, "override alpha");
  app.add_option("--b", b, "override b");
  app.add_option("--seed", seed, "override seed")->each([&](std::string) {
    seed_set = true;
  });
  app.add_option("--out", out, "override output directory");

  auto* c_induce = app.add_subcommand("induce", "build lattice and schedule");
  auto* c_tails = app.add_subcommand("tails", "tail series, fits and means");
  auto* c_ulam = app.add_subcommand("ulam", "operators, density, spectra");
  auto* c_tower = app.add_subcommand("tower", "tower and renewal residuals");
  auto* c_verify = app.add_subcommand("verify", "run named checks");
  std::vector<std::string> which;
  c_verify->add_option("--which", which, "checks to run")->delimiter(',');
  auto* c_corr = app.add_subcommand("correlate", "correlation experiment");
  std::string mode = "finite";
  c_corr->add_option("--mode", mode, "finite|infinite");
  auto* c_report = app.add_subcommand("report", "collate output JSONs");

  std::vector<std::string> raw(args);
  std::reverse(raw.begin(), raw.end());
  try {
    app.parse(raw);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  try {
    ExperimentConfig cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    if (alpha > 0) cfg.alpha = alpha;
    if (b > 0) cfg.b = b;
    if (seed_set) cfg.seed = seed;
    if (!out.empty()) cfg.outputs = out;
    validate(cfg);
    if (c_report->parsed()) return cmd_report(cfg);
    Pipeline pl(cfg);
    if (c_induce->parsed()) return cmd_induce(pl);
    if (c_tails->parsed()) return cmd_tails(pl);
    if (c_ulam->parsed()) return cmd_ulam(pl);
    if (c_tower->parsed()) return cmd_tower(pl);
    if (c_verify->parsed()) return cmd_verify(pl, which);
    if (c_corr->parsed()) return cmd_correlate(pl, mode);
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    std::string msg = e.what();
    if (msg.find("coverage") != std::string::npos ||
        msg.find("depth") != std::string::npos)
      return 2;
    return 4;
  }
  return 1;
}

} // namespace afn
