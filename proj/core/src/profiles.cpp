#include "vprisk/profiles.hpp"

#include "vprisk/csv.hpp"
#include "vprisk/errors.hpp"
#include "vprisk/rng.hpp"

#include <cmath>
#include <cstdio>
#include <string>

namespace vprisk {

namespace {

void require_dims(Index n, Index p) {
  if (n < 1 || p < 1) {
    throw InvalidArgument("profile dimensions must be positive, got n=" + std::to_string(n) +
                          ", p=" + std::to_string(p));
  }
}

void require_nonneg(double v, const char* name) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw InvalidArgument(std::string(name) + " must be finite and >= 0");
  }
}

void require_divisible(Index n, Index p, Index k, const char* kind) {
  require_dims(n, p);
  if (n % k != 0 || p % k != 0) {
    throw InvalidArgument(std::string(kind) + " profile needs n and p divisible by " +
                          std::to_string(k) + ", got n=" + std::to_string(n) +
                          ", p=" + std::to_string(p));
  }
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

VarianceProfile::VarianceProfile(Eigen::MatrixXd gamma_sq) : gamma_sq_(std::move(gamma_sq)) {
  require_dims(gamma_sq_.rows(), gamma_sq_.cols());
  for (Index j = 0; j < gamma_sq_.cols(); ++j) {
    for (Index i = 0; i < gamma_sq_.rows(); ++i) {
      const double v = gamma_sq_(i, j);
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw InvalidArgument("variance profile entry (" + std::to_string(i) + ", " +
                              std::to_string(j) + ") is negative or not finite");
      }
    }
  }
}

TestProfile::TestProfile(Eigen::VectorXd tilde_gamma_sq) : values_(std::move(tilde_gamma_sq)) {
  if (values_.size() < 1) throw InvalidArgument("test profile must be non-empty");
  for (Index j = 0; j < values_.size(); ++j) {
    if (!(values_(j) >= 0.0) || !std::isfinite(values_(j))) {
      throw InvalidArgument("test profile entry " + std::to_string(j) +
                            " is negative or not finite");
    }
  }
}

VarianceProfile make_constant(Index n, Index p, double gamma) {
  require_dims(n, p);
  if (!std::isfinite(gamma)) throw InvalidArgument("gamma must be finite");
  return VarianceProfile(Eigen::MatrixXd::Constant(n, p, gamma * gamma));
}

VarianceProfile make_quasi_doubly_stochastic(Index n, Index p, std::uint64_t seed, int max_sweeps,
                                             double tol) {
  require_dims(n, p);
  const CounterRng rng(seed);
  Eigen::MatrixXd g(n, p);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < p; ++j) {
      g(i, j) = 0.5 + rng.uniform(static_cast<std::uint64_t>(i * p + j), 0);
    }
  }

  const double nd = static_cast<double>(n);
  const double pd = static_cast<double>(p);
  double defect = 0.0;
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    g.array().colwise() *= (pd / g.rowwise().sum().array());
    g.array().rowwise() *= (nd / g.colwise().sum().array());
    // Columns are exact after the last step; only rows can be off.
    defect = ((g.rowwise().sum().array() - pd) / nd).abs().maxCoeff();
    if (defect <= tol) return VarianceProfile(std::move(g));
  }
  throw ConvergenceError("Sinkhorn scaling did not converge (row-sum defect " + fmt(defect) + ")",
                         defect, max_sweeps);
}

VarianceProfile make_piecewise(Index n, Index p, double gamma1_sq, double gamma2_sq) {
  require_divisible(n, p, 4, "piecewise");
  require_nonneg(gamma1_sq, "gamma1_sq");
  require_nonneg(gamma2_sq, "gamma2_sq");
  const Index n1 = n / 4;
  const Index p1 = p / 4;
  Eigen::MatrixXd g = Eigen::MatrixXd::Constant(n, p, gamma2_sq);
  g.topLeftCorner(n1, p1).setConstant(gamma1_sq);
  g.bottomRightCorner(n - n1, p - p1).setConstant(gamma1_sq);
  return VarianceProfile(std::move(g));
}

VarianceProfile make_block(Index n, Index p, double gamma1_sq, double gamma2_sq,
                           double gamma3_sq) {
  require_divisible(n, p, 12, "block");
  require_nonneg(gamma1_sq, "gamma1_sq");
  require_nonneg(gamma2_sq, "gamma2_sq");
  require_nonneg(gamma3_sq, "gamma3_sq");
  const Index rows[3] = {n / 4, n / 3, 5 * n / 12};
  const Index cols[3] = {p / 4, p / 3, 5 * p / 12};
  const double layout[3][3] = {{gamma1_sq, gamma2_sq, 1.0},
                               {gamma2_sq, gamma1_sq, gamma3_sq},
                               {1.0, gamma3_sq, gamma1_sq}};
  Eigen::MatrixXd g(n, p);
  Index r0 = 0;
  for (int a = 0; a < 3; ++a) {
    Index c0 = 0;
    for (int b = 0; b < 3; ++b) {
      g.block(r0, c0, rows[a], cols[b]).setConstant(layout[a][b]);
      c0 += cols[b];
    }
    r0 += rows[a];
  }
  return VarianceProfile(std::move(g));
}

VarianceProfile make_alternated_columns(Index n, Index p, double gamma1_sq, double gamma2_sq) {
  require_dims(n, p);
  require_nonneg(gamma1_sq, "gamma1_sq");
  require_nonneg(gamma2_sq, "gamma2_sq");
  Eigen::MatrixXd g(n, p);
  for (Index j = 0; j < p; ++j) {
    // 1-based column j + 1 is even exactly when j is odd.
    g.col(j).setConstant(j % 2 == 1 ? gamma1_sq : gamma2_sq);
  }
  return VarianceProfile(std::move(g));
}

VarianceProfile make_polynomial(Index n, Index p, double tau) {
  require_dims(n, p);
  if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidArgument("tau must be positive");
  const double m = static_cast<double>(std::min(n, p));
  Eigen::MatrixXd g(n, p);
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < n; ++i) {
      g(i, j) = std::pow(std::abs(static_cast<double>(i - j)) / m, 6) + tau;
    }
  }
  return VarianceProfile(std::move(g));
}

MixtureProfile make_mixture(Index n, const Eigen::VectorXd& class_probs,
                            const Eigen::MatrixXd& class_variances, std::uint64_t seed) {
  const Index k = class_probs.size();
  if (k < 1) throw InvalidArgument("mixture needs at least one class");
  if (class_variances.rows() != k) {
    throw InvalidArgument("class_variances has " + std::to_string(class_variances.rows()) +
                          " rows for " + std::to_string(k) + " classes");
  }
  require_dims(n, class_variances.cols());
  for (Index c = 0; c < k; ++c) require_nonneg(class_probs(c), "class probability");
  if (std::abs(class_probs.sum() - 1.0) > 1e-12) {
    throw InvalidArgument("class probabilities sum to " + fmt(class_probs.sum()) + ", not 1");
  }

  const CounterRng rng(seed);
  Eigen::MatrixXd g(n, class_variances.cols());
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const double u = rng.uniform(static_cast<std::uint64_t>(i), 0);
    Index c = 0;
    double acc = class_probs(0);
    while (c + 1 < k && u >= acc) acc += class_probs(++c);
    // Rounding in the cumulative sum can run past the last class with mass.
    while (class_probs(c) == 0.0) --c;
    labels[static_cast<std::size_t>(i)] = static_cast<int>(c);
    g.row(i) = class_variances.row(c);
  }
  return {VarianceProfile(std::move(g)), std::move(labels)};
}

VarianceProfile load_csv(const std::filesystem::path& path) {
  Eigen::MatrixXd m = csv::read_matrix(path);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (!(m(i, j) >= 0.0) || !std::isfinite(m(i, j))) {
        const long row = static_cast<long>(i) + 1;
        const long col = static_cast<long>(j) + 1;
        throw ParseError("negative or non-finite variance " + csv::format_double(m(i, j)) +
                             " at row " + std::to_string(row) + ", column " + std::to_string(col),
                         row, col);
      }
    }
  }
  return VarianceProfile(std::move(m));
}

void save_csv(const std::filesystem::path& path, const VarianceProfile& profile) {
  csv::write_matrix(path, profile.gamma_sq());
}

VarianceProfile normalize(const VarianceProfile& profile) {
  const double mean = profile.mean();
  if (!(mean > 0.0)) throw InvalidArgument("cannot normalize an all-zero profile");
  return VarianceProfile(profile.gamma_sq() / mean);
}

PopulationCovariance population_covariance(const VarianceProfile& profile) {
  return {profile.gamma_sq().colwise().mean().transpose()};
}

TestProfile test_profile_columns(const VarianceProfile& profile) {
  return TestProfile(population_covariance(profile).sigma_diag);
}

ProfileDiagnostics validate(const VarianceProfile& profile, const TestProfile& test_profile,
                            const ValidationOptions& options) {
  ProfileDiagnostics d;
  const Eigen::MatrixXd& g = profile.gamma_sq();
  const double n = static_cast<double>(profile.n());
  const double p = static_cast<double>(profile.p());

  d.max_entry = g.maxCoeff();
  d.min_entry = g.minCoeff();
  d.degenerate = d.max_entry == 0.0;
  d.row_sum_defect = (g.rowwise().sum().array() / n - p / n).abs().maxCoeff();
  d.col_sum_defect = (g.colwise().sum().array() / n - 1.0).abs().maxCoeff();
  d.ratio_gap = std::abs(p / n - 1.0);

  if (test_profile.p() != profile.p()) {
    d.errors.push_back("test profile has length " + std::to_string(test_profile.p()) +
                       " but the profile has p=" + std::to_string(profile.p()));
  }

  auto& sink = options.for_ridgeless ? d.errors : d.warnings;
  if (d.degenerate) sink.push_back("profile is identically zero");

  double min_all = d.min_entry;
  if (test_profile.p() > 0) min_all = std::min(min_all, test_profile.values().minCoeff());
  d.min_entry_ok = min_all >= options.gamma_min_sq;
  if (!d.min_entry_ok) {
    sink.push_back("minimum variance " + fmt(min_all) + " is below gamma_min_sq=" +
                   fmt(options.gamma_min_sq));
  }
  d.ratio_ok = d.ratio_gap >= options.d_star;
  if (!d.ratio_ok) {
    sink.push_back("|p/n - 1| = " + fmt(d.ratio_gap) + " is below d_star=" + fmt(options.d_star));
  }
  return d;
}

void require_ridgeless_valid(const VarianceProfile& profile, const TestProfile& test_profile,
                             ValidationOptions options) {
  options.for_ridgeless = true;
  const ProfileDiagnostics d = validate(profile, test_profile, options);
  if (d.ok()) return;
  std::string msg = "ridgeless evaluation not valid:";
  for (const auto& e : d.errors) msg += " " + e + ";";
  msg.pop_back();
  throw AssumptionViolation(msg);
}

}  // namespace vprisk
