#include "vprisk_cli/commands.hpp"

#include <vprisk/csv.hpp>
#include <vprisk/errors.hpp>
#include <vprisk/parallel.hpp>
#include <vprisk/rng.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>

namespace vprisk::cli {

namespace {

std::string num(double v) { return csv::format_double(v); }
std::string num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

std::filesystem::path with_suffix(const std::filesystem::path& out, const char* suffix) {
  return std::filesystem::path(out.string() + suffix);
}

void write_echo(const ExperimentConfig& c, const std::filesystem::path& out) {
  open_out(with_suffix(out, ".config.json")) << resolved_json(c).dump(2) << '\n';
}

// The timestamp is the only line that changes between identical runs.
std::ofstream open_sidecar(const ExperimentConfig& c, const std::filesystem::path& out, const char* suffix) {
  std::ofstream s = open_out(with_suffix(out, suffix));
  s << "generated: " << timestamp() << '\n';
  s << "command: " << to_string(c.command) << '\n';
  s << "config_hash: " << config_hash(c) << '\n';
  return s;
}

std::uint64_t design_seed(std::uint64_t seed, int replication) {
  return CounterRng(seed).fork(2 * static_cast<std::uint64_t>(replication)).seed();
}

std::uint64_t mc_seed(std::uint64_t seed, int replication) {
  return CounterRng(seed).fork(2 * static_cast<std::uint64_t>(replication) + 1).seed();
}

std::uint64_t point_seed(std::uint64_t seed, int replication, std::size_t point) {
  return CounterRng(design_seed(seed, replication)).fork(point).seed();
}

void add_error(std::string& slot, const std::string& what) {
  if (!slot.empty()) slot += "; ";
  slot += what;
}

std::optional<std::size_t> argmin(const std::vector<std::optional<double>>& v) {
  std::optional<std::size_t> best;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (v[k] && (!best || *v[k] < *v[*best])) best = k;
  }
  return best;
}

bool within_steps(const std::vector<double>& grid, std::size_t k, double value, std::size_t steps) {
  const double lo = grid[k >= steps ? k - steps : 0];
  const double hi = grid[std::min(grid.size() - 1, k + steps)];
  return lo <= value && value <= hi;
}

const char* yes_no(bool b) { return b ? "yes" : "no"; }

struct Dims {
  Index n = 0;
  Index p = 0;
};

// --- profile -----------------------------------------------------------------

RunResult run_profile(const ExperimentConfig& c, const std::filesystem::path& out) {
  const VarianceProfile g = build_profile(c, c.n, c.p.value_or(0));
  save_csv(out, g);
  write_echo(c, out);

  ValidationOptions opts;
  opts.d_star = c.d_star;
  const ProfileDiagnostics d = validate(g, test_profile_columns(g), opts);
  const double n = static_cast<double>(g.n());
  const Eigen::VectorXd rows = g.gamma_sq().rowwise().sum() / n;
  const Eigen::VectorXd cols = g.gamma_sq().colwise().sum().transpose() / n;

  std::ofstream s = open_sidecar(c, out, ".diagnostics.txt");
  s << "n: " << g.n() << "\np: " << g.p() << '\n';
  s << "min_entry: " << num(d.min_entry) << "\nmax_entry: " << num(d.max_entry) << '\n';
  s << "row_sum_min: " << num(rows.minCoeff()) << "\nrow_sum_max: " << num(rows.maxCoeff()) << '\n';
  s << "col_sum_min: " << num(cols.minCoeff()) << "\ncol_sum_max: " << num(cols.maxCoeff()) << '\n';
  s << "row_sum_defect: " << num(d.row_sum_defect) << '\n';
  s << "col_sum_defect: " << num(d.col_sum_defect) << '\n';
  for (const std::string& w : d.warnings) s << "warning: " << w << '\n';
  for (const std::string& e : d.errors) s << "error: " << e << '\n';
  return {1, 0};
}

// --- risk-sweep ----------------------------------------------------------------

RunResult run_risk_sweep(const ExperimentConfig& c, const std::filesystem::path& out, unsigned threads) {
  const VarianceProfile g = build_profile(c, c.n, c.p.value_or(0));
  const TestProfile s = build_test_profile(c, g);
  const std::vector<double>& grid = c.lambdas;
  const std::size_t L = grid.size(), R = static_cast<std::size_t>(c.replications);
  const bool det = c.wants("det"), emp = c.wants("emp"), mc = c.wants("mc");
  const bool dof = c.wants("dof"), gcv = c.wants("gcv");

  std::vector<CurvePoint> det_pts;
  if (det) det_pts = risk_curve(g, s, c.params, grid);

  std::vector<std::optional<RiskReport>> emp_rep(R * L);
  std::vector<std::optional<MonteCarloEstimate>> mc_rep(R * L);
  std::vector<std::string> errors(R * L);
  std::vector<std::optional<DesignMatrix>> designs(R);
  std::vector<std::string> design_errors(R);

  if (emp || mc) {
    parallel_for(R, threads, [&](std::size_t r) {
      try {
        designs[r] = sample_design(g, c.entry_dist, design_seed(c.seed, static_cast<int>(r)), c.profile);
        if (!emp) return;
        const SpectralDecomposition dec = spectral_decompose(*designs[r]);
        for (std::size_t k = 0; k < L; ++k) {
          try {
            emp_rep[r * L + k] = emp_test_risk(dec, s, c.params, grid[k]);
          } catch (const std::exception& e) {
            add_error(errors[r * L + k], std::string("emp: ") + e.what());
          }
        }
      } catch (const std::exception& e) {
        design_errors[r] = std::string("design: ") + e.what();
      }
    });
  }
  if (mc) {
    parallel_for(R * L, threads, [&](std::size_t cell) {
      const std::size_t r = cell / L;
      if (!designs[r]) return;
      try {
        mc_rep[cell] = monte_carlo_test_risk(*designs[r], s, c.params, grid[cell % L], c.mc_draws,
                                             mc_seed(c.seed, static_cast<int>(r)));
      } catch (const std::exception& e) {
        add_error(errors[cell], std::string("mc: ") + e.what());
      }
    });
  }

  std::vector<std::string> header = {"profile", "n", "p", "lambda", "seed", "replication"};
  if (det) {
    for (const char* h : {"det_test_risk", "det_train_risk", "det_bias", "det_variance"}) header.push_back(h);
    if (dof) header.push_back("det_dof");
    if (gcv) header.push_back("det_gcv");
    header.push_back("det_iterations");
    header.push_back("det_residual");
  }
  if (emp) {
    for (const char* h : {"emp_test_risk", "emp_train_risk", "emp_bias", "emp_variance"}) header.push_back(h);
    if (dof) header.push_back("emp_dof");
    if (gcv) header.push_back("emp_gcv");
  }
  if (mc) {
    header.push_back("mc_test_risk");
    header.push_back("mc_std_error");
    header.push_back("mc_draws");
  }
  header.push_back("error");
  header.push_back("config_hash");

  const std::string hash = config_hash(c);
  RunResult result;
  std::ofstream f = open_out(out);
  csv::Writer w(f, header);
  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t k = 0; k < L; ++k) {
      const std::size_t cell = r * L + k;
      std::string err = errors[cell];
      if (!design_errors[r].empty()) add_error(err, design_errors[r]);
      std::vector<std::string> row = {c.profile, std::to_string(g.n()), std::to_string(g.p()), num(grid[k]),
                                      std::to_string(c.seed), std::to_string(r)};
      if (det) {
        const std::optional<RiskReport>& d = det_pts[k].report;
        if (!det_pts[k].error.empty()) add_error(err, "det: " + det_pts[k].error);
        row.push_back(d ? num(d->test_risk) : "");
        row.push_back(d ? num(d->train_risk) : "");
        row.push_back(d ? num(d->bias) : "");
        row.push_back(d ? num(d->variance) : "");
        if (dof) row.push_back(d ? num(d->dof) : "");
        if (gcv) row.push_back(d ? num(d->gcv) : "");
        row.push_back(d ? std::to_string(d->iterations) : "");
        row.push_back(d ? num(d->residual) : "");
      }
      if (emp) {
        const std::optional<RiskReport>& e = emp_rep[cell];
        row.push_back(e ? num(e->test_risk) : "");
        row.push_back(e ? num(e->train_risk) : "");
        row.push_back(e ? num(e->bias) : "");
        row.push_back(e ? num(e->variance) : "");
        if (dof) row.push_back(e ? num(e->dof) : "");
        if (gcv) row.push_back(e ? num(e->gcv) : "");
      }
      if (mc) {
        const std::optional<MonteCarloEstimate>& m = mc_rep[cell];
        row.push_back(m ? num(m->mean) : "");
        row.push_back(m ? num(m->std_error) : "");
        row.push_back(m ? std::to_string(m->draws) : "");
      }
      row.push_back(err);
      row.push_back(hash);
      w.write_row(row);
      ++result.points;
      if (!err.empty()) ++result.failed;
    }
  }
  write_echo(c, out);

  std::ofstream sm = open_sidecar(c, out, ".summary.txt");
  sm << "points: " << result.points << "\nfailed: " << result.failed << '\n';
  std::optional<double> lstar;
  if (c.params.alpha > 0) {
    lstar = optimal_lambda(c.params, g.n(), g.p());
    sm << "lambda_star: " << num(*lstar) << '\n';
  } else {
    sm << "lambda_star: undefined (alpha = 0)\n";
  }
  auto report_argmin = [&](const char* name, const std::vector<std::optional<double>>& v) {
    const std::optional<std::size_t> k = argmin(v);
    if (!k) return;
    sm << name << "_argmin_lambda: " << num(grid[*k]) << '\n';
    if (lstar) sm << name << "_argmin_within_one_step_of_lambda_star: " << yes_no(within_steps(grid, *k, *lstar, 1)) << '\n';
  };
  if (det) {
    std::vector<std::optional<double>> v(L);
    for (std::size_t k = 0; k < L; ++k) {
      if (det_pts[k].report) v[k] = det_pts[k].report->test_risk;
    }
    report_argmin("det_test_risk", v);
  }
  for (std::size_t r = 0; r < R && emp; ++r) {
    std::vector<std::optional<double>> v(L);
    for (std::size_t k = 0; k < L; ++k) {
      if (emp_rep[r * L + k]) v[k] = emp_rep[r * L + k]->test_risk;
    }
    sm << "replication: " << r << '\n';
    report_argmin("emp_test_risk", v);
    if (!det) continue;
    double gt = 0, gtr = 0, gd = 0;
    bool any = false;
    for (std::size_t k = 0; k < L; ++k) {
      const auto& e = emp_rep[r * L + k];
      const auto& d = det_pts[k].report;
      if (!e || !d) continue;
      any = true;
      gt = std::max(gt, std::abs(e->test_risk - d->test_risk));
      gtr = std::max(gtr, std::abs(e->train_risk - d->train_risk));
      gd = std::max(gd, std::abs(e->dof - d->dof));
    }
    if (any) {
      sm << "max_abs_gap_test_risk: " << num(gt) << '\n';
      sm << "max_abs_gap_train_risk: " << num(gtr) << '\n';
      sm << "max_abs_gap_dof: " << num(gd) << '\n';
    }
  }
  if (mc && emp) {
    std::size_t agree = 0, cells = 0;
    for (std::size_t cell = 0; cell < R * L; ++cell) {
      if (!mc_rep[cell] || !emp_rep[cell]) continue;
      ++cells;
      if (std::abs(mc_rep[cell]->mean - emp_rep[cell]->test_risk) <= 3 * mc_rep[cell]->std_error) ++agree;
    }
    sm << "mc_within_3_std_errors: " << agree << " of " << cells << '\n';
  }
  return result;
}

// --- descent -------------------------------------------------------------------

RunResult run_descent(const ExperimentConfig& c, const std::filesystem::path& out, unsigned threads) {
  const Index mult = profile_p_multiple(c);
  const std::size_t K = c.ratios.size(), R = static_cast<std::size_t>(c.replications);
  const bool det = c.wants("det"), emp = c.wants("emp");

  std::vector<DescentPoint> det_pts;
  if (det) {
    ProfileFamily family{[&](Index n, Index p) { return build_profile(c, n, p); }, mult, c.profile};
    ValidationOptions v;
    v.for_ridgeless = true;
    v.d_star = c.d_star;
    det_pts = descent_curve(family, [](const VarianceProfile& g) { return test_profile_columns(g); }, c.params,
                            c.n, c.ratios, v, threads);
  }

  std::vector<std::optional<double>> emp_risk(R * K);
  std::vector<std::string> errors(R * K);
  if (emp) {
    parallel_for(R * K, threads, [&](std::size_t cell) {
      const std::size_t r = cell / K, k = cell % K;
      try {
        const VarianceProfile g = build_profile(c, c.n, descent_p(c.ratios[k], c.n, mult));
        const DesignMatrix d = sample_design(g, c.entry_dist, point_seed(c.seed, static_cast<int>(r), k), c.profile);
        emp_risk[cell] =
            emp_test_risk(spectral_decompose(d), test_profile_columns(g), c.params, c.emp_ridgeless_lambda).test_risk;
      } catch (const std::exception& e) {
        add_error(errors[cell], std::string("emp: ") + e.what());
      }
    });
  }

  std::vector<std::string> header = {"profile", "n", "p", "ratio", "seed", "replication"};
  if (det) {
    header.push_back("det_ridgeless_risk");
    header.push_back("det_error_estimate");
  }
  if (emp) {
    header.push_back("emp_proxy_risk");
    header.push_back("emp_lambda");
  }
  header.push_back("warning");
  header.push_back("error");
  header.push_back("config_hash");

  const std::string hash = config_hash(c);
  RunResult result;
  std::ofstream f = open_out(out);
  csv::Writer w(f, header);
  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t k = 0; k < K; ++k) {
      const std::size_t cell = r * K + k;
      const Index p = descent_p(c.ratios[k], c.n, mult);
      std::string err = errors[cell];
      std::vector<std::string> row = {c.profile, std::to_string(c.n), std::to_string(p), num(c.ratios[k]),
                                      std::to_string(c.seed), std::to_string(r)};
      if (det) {
        if (!det_pts[k].error.empty()) add_error(err, "det: " + det_pts[k].error);
        row.push_back(num(det_pts[k].risk));
        row.push_back(det_pts[k].risk ? num(det_pts[k].error_estimate) : "");
      }
      if (emp) {
        row.push_back(num(emp_risk[cell]));
        row.push_back(num(c.emp_ridgeless_lambda));
      }
      row.push_back(emp && p == c.n ? "p = n: empirical ridgeless proxy is ill-conditioned" : "");
      row.push_back(err);
      row.push_back(hash);
      w.write_row(row);
      ++result.points;
      if (!err.empty()) ++result.failed;
    }
  }
  write_echo(c, out);

  std::ofstream sm = open_sidecar(c, out, ".summary.txt");
  sm << "points: " << result.points << "\nfailed: " << result.failed << '\n';
  if (det) {
    std::vector<double> curve, at;
    for (const DescentPoint& d : det_pts) {
      if (!d.risk) continue;
      curve.push_back(*d.risk);
      at.push_back(d.ratio);
    }
    sm << "det_evaluated_points: " << curve.size() << " of " << K << '\n';
    sm << "det_interior_local_maxima: " << count_interior_maxima(curve) << '\n';
    for (std::size_t k = 1; k + 1 < curve.size(); ++k) {
      if (curve[k] > curve[k - 1] && curve[k] > curve[k + 1]) sm << "det_peak_ratio: " << num(at[k]) << '\n';
    }
  }
  return result;
}

// --- eig -----------------------------------------------------------------------

RunResult run_eig(const ExperimentConfig& c, const std::filesystem::path& out, unsigned threads) {
  const Index mult = profile_p_multiple(c);
  const std::size_t K = c.ratios.size(), R = static_cast<std::size_t>(c.replications);
  std::vector<std::optional<double>> tau(R * K);
  std::vector<std::string> errors(R * K);
  parallel_for(R * K, threads, [&](std::size_t cell) {
    const std::size_t r = cell / K, k = cell % K;
    try {
      const VarianceProfile g = build_profile(c, c.n, descent_p(c.ratios[k], c.n, mult));
      const DesignMatrix d = sample_design(g, c.entry_dist, point_seed(c.seed, static_cast<int>(r), k), c.profile);
      tau[cell] = min_nonzero_eigenvalue(d.X);
    } catch (const std::exception& e) {
      errors[cell] = e.what();
    }
  });

  const std::string hash = config_hash(c);
  RunResult result;
  std::ofstream f = open_out(out);
  csv::Writer w(f, {"profile", "n", "p", "ratio", "seed", "replication", "tau_min", "error", "config_hash"});
  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t k = 0; k < K; ++k) {
      const std::size_t cell = r * K + k;
      w.write_row({c.profile, std::to_string(c.n), std::to_string(descent_p(c.ratios[k], c.n, mult)),
                   num(c.ratios[k]), std::to_string(c.seed), std::to_string(r), num(tau[cell]), errors[cell], hash});
      ++result.points;
      if (!errors[cell].empty()) ++result.failed;
    }
  }
  write_echo(c, out);

  std::ofstream sm = open_sidecar(c, out, ".summary.txt");
  sm << "points: " << result.points << "\nfailed: " << result.failed << '\n';
  std::size_t nearest = 0;
  for (std::size_t k = 1; k < K; ++k) {
    if (std::abs(c.ratios[k] - 1) < std::abs(c.ratios[nearest] - 1)) nearest = k;
  }
  sm << "ratio_nearest_one: " << num(c.ratios[nearest]) << '\n';
  for (std::size_t r = 0; r < R; ++r) {
    const std::optional<std::size_t> k =
        argmin(std::vector<std::optional<double>>(tau.begin() + r * K, tau.begin() + (r + 1) * K));
    if (!k) continue;
    sm << "replication: " << r << "\nargmin_ratio: " << num(c.ratios[*k]) << '\n';
    sm << "argmin_at_ratio_nearest_one: " << yes_no(*k == nearest) << '\n';
  }
  return result;
}

// --- gcv -----------------------------------------------------------------------

RunResult run_gcv(const ExperimentConfig& c, const std::filesystem::path& out, unsigned threads) {
  const VarianceProfile g = build_profile(c, c.n, c.p.value_or(0));
  const TestProfile s = build_test_profile(c, g);
  const std::vector<double>& grid = c.lambdas;
  const std::size_t L = grid.size(), R = static_cast<std::size_t>(c.replications);
  const bool det = c.wants("det"), emp = c.wants("emp");

  const double gap = std::abs(double(g.p()) / double(g.n()) - 1.0);
  std::string excluded;
  if (gap < c.d_star) {
    excluded = "excluded: |p/n - 1| = " + num(gap) + " is below d_star = " + num(c.d_star) +
               " (interpolation threshold)";
  }

  std::vector<CurvePoint> det_pts;
  if (det) det_pts = risk_curve(g, s, c.params, grid);
  std::vector<std::optional<RiskReport>> emp_rep(R * L);
  std::vector<std::string> errors(R * L);
  if (emp) {
    parallel_for(R, threads, [&](std::size_t r) {
      try {
        const SpectralDecomposition dec = spectral_decompose(
            sample_design(g, c.entry_dist, design_seed(c.seed, static_cast<int>(r)), c.profile));
        for (std::size_t k = 0; k < L; ++k) {
          try {
            emp_rep[r * L + k] = emp_test_risk(dec, s, c.params, grid[k]);
          } catch (const std::exception& e) {
            add_error(errors[r * L + k], std::string("emp: ") + e.what());
          }
        }
      } catch (const std::exception& e) {
        for (std::size_t k = 0; k < L; ++k) add_error(errors[r * L + k], std::string("design: ") + e.what());
      }
    });
  }

  std::vector<std::string> header = {"profile", "n", "p", "lambda", "seed", "replication"};
  if (det) {
    header.push_back("det_test_risk");
    header.push_back("det_gcv");
  }
  if (emp) {
    header.push_back("emp_test_risk");
    header.push_back("emp_gcv");
  }
  header.push_back("gcv_status");
  header.push_back("error");
  header.push_back("config_hash");

  const std::string hash = config_hash(c);
  RunResult result;
  std::vector<std::optional<double>> det_g(L), det_t(L);
  std::vector<std::vector<std::optional<double>>> emp_g(R, std::vector<std::optional<double>>(L)),
      emp_t(R, std::vector<std::optional<double>>(L));
  std::ofstream f = open_out(out);
  csv::Writer w(f, header);
  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t k = 0; k < L; ++k) {
      const std::size_t cell = r * L + k;
      std::string err = errors[cell];
      std::string status = excluded;
      std::vector<std::string> row = {c.profile, std::to_string(g.n()), std::to_string(g.p()), num(grid[k]),
                                      std::to_string(c.seed), std::to_string(r)};
      if (det) {
        const std::optional<RiskReport>& d = det_pts[k].report;
        if (!det_pts[k].error.empty()) add_error(err, "det: " + det_pts[k].error);
        std::optional<double> gv;
        if (d && excluded.empty()) {
          gv = d->gcv;
          if (!gv) add_error(status, "det out of domain: 1 - dof < 1e-6");
        }
        row.push_back(d ? num(d->test_risk) : "");
        row.push_back(num(gv));
        det_t[k] = d ? std::optional<double>(d->test_risk) : std::nullopt;
        det_g[k] = gv;
      }
      if (emp) {
        const std::optional<RiskReport>& e = emp_rep[cell];
        std::optional<double> gv;
        if (e && excluded.empty()) {
          gv = e->gcv;
          if (!gv) add_error(status, "emp out of domain: 1 - dof < 1e-6");
        }
        row.push_back(e ? num(e->test_risk) : "");
        row.push_back(num(gv));
        emp_t[r][k] = e ? std::optional<double>(e->test_risk) : std::nullopt;
        emp_g[r][k] = gv;
      }
      row.push_back(status);
      row.push_back(err);
      row.push_back(hash);
      w.write_row(row);
      ++result.points;
      if (!err.empty()) ++result.failed;
    }
  }
  write_echo(c, out);

  std::ofstream sm = open_sidecar(c, out, ".summary.txt");
  sm << "points: " << result.points << "\nfailed: " << result.failed << '\n';
  if (!excluded.empty()) sm << "gcv: " << excluded << '\n';
  std::optional<double> lstar;
  if (c.params.alpha > 0) {
    lstar = optimal_lambda(c.params, g.n(), g.p());
    sm << "lambda_star: " << num(*lstar) << '\n';
  }
  auto line = [&](const std::string& name, const std::optional<std::size_t>& k) {
    if (k) sm << name << "_argmin_lambda: " << num(grid[*k]) << '\n';
  };
  const std::optional<std::size_t> kdg = argmin(det_g);
  if (det) {
    line("det_test_risk", argmin(det_t));
    line("det_gcv", kdg);
    if (kdg && lstar) {
      std::size_t steps = 0;
      while (!within_steps(grid, *kdg, *lstar, steps) && steps < L) ++steps;
      if (steps == 0) {
        sm << "det_gcv_argmin_vs_lambda_star: same grid point\n";
      } else {
        sm << "det_gcv_argmin_vs_lambda_star: distinct (" << steps << " grid steps)\n";
      }
    }
  }
  for (std::size_t r = 0; r < R && emp; ++r) {
    sm << "replication: " << r << '\n';
    line("emp_test_risk", argmin(emp_t[r]));
    const std::optional<std::size_t> keg = argmin(emp_g[r]);
    line("emp_gcv", keg);
    if (keg && kdg) {
      const std::size_t d = *keg > *kdg ? *keg - *kdg : *kdg - *keg;
      sm << "gcv_argmins_within_two_steps: " << yes_no(d <= 2) << '\n';
    }
  }
  return result;
}

}  // namespace

int exit_code(const RunResult& r) noexcept {
  if (r.points > 0 && r.failed == r.points) return 3;
  if (r.failed > 0) return 2;
  return 0;
}

std::size_t count_interior_maxima(const std::vector<double>& v) {
  std::size_t count = 0;
  for (std::size_t k = 1; k + 1 < v.size(); ++k) {
    if (v[k] > v[k - 1] && v[k] > v[k + 1]) ++count;
  }
  return count;
}

RunResult run_command(const ExperimentConfig& c, const std::filesystem::path& out, unsigned threads) {
  if (threads == 0) threads = default_thread_count();
  switch (c.command) {
    case Command::Profile: return run_profile(c, out);
    case Command::RiskSweep: return run_risk_sweep(c, out, threads);
    case Command::Descent: return run_descent(c, out, threads);
    case Command::Eig: return run_eig(c, out, threads);
    case Command::Gcv: return run_gcv(c, out, threads);
  }
  return {};
}

}  // namespace vprisk::cli
