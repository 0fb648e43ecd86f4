#include "vprisk/empirical.hpp"
#include "vprisk/equivalents.hpp"
#include "vprisk/errors.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numbers>
#include <random>

using namespace vprisk;
using vprisk::testing::zoo;

namespace {

SpectralDecomposition identity_spectrum(Index p, Index n) {
  SpectralDecomposition d;
  d.eigenvalues = Eigen::VectorXd::Ones(p);
  d.eigenvectors = Eigen::MatrixXd::Identity(p, p);
  d.rank_tol = 1e-10;
  d.n = n;
  return d;
}

// Eigenvalues of a symmetric 3x3 matrix from its characteristic polynomial
// (trigonometric form of the cubic roots), sorted decreasingly.
std::vector<double> cubic_eigenvalues(const Eigen::Matrix3d& a) {
  const double q = a.trace() / 3.0;
  const Eigen::Matrix3d b = a - q * Eigen::Matrix3d::Identity();
  const double p = std::sqrt((b * b).trace() / 6.0);
  const double r = std::clamp((b / p).determinant() / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double e1 = q + 2 * p * std::cos(phi);
  const double e3 = q + 2 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
  return {e1, 3 * q - e1 - e3, e3};
}

Eigen::MatrixXd gaussian_matrix(Index n, Index p, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> z;
  Eigen::MatrixXd x(n, p);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < p; ++j) x(i, j) = z(gen);
  }
  return x;
}

}  // namespace

TEST(Sampling, StandardizedMoments) {
  for (EntryDist dist : {EntryDist::Gaussian, EntryDist::Pareto}) {
    const int n = 1000000;
    double s = 0, ss = 0;
    for (int k = 0; k < n; ++k) {
      const double z = standardized_entry(17, static_cast<std::uint64_t>(k), dist);
      s += z;
      ss += z * z;
    }
    const double mean = s / n;
    EXPECT_LE(std::abs(mean), 4e-3) << to_string(dist);
    // The standardized Pareto(6, 1) has fourth moment about 39, which widens the spread.
    const double tol = dist == EntryDist::Pareto ? 3e-2 : 1e-2;
    EXPECT_LE(std::abs(ss / n - mean * mean - 1.0), tol) << to_string(dist);
  }
}

TEST(Sampling, ParetoSupport) {
  // z >= (1 - 1.2) / sqrt(0.06), the image of the Pareto scale.
  for (int k = 0; k < 10000; ++k) {
    EXPECT_GE(standardized_entry(3, static_cast<std::uint64_t>(k), EntryDist::Pareto),
              -0.2 / std::sqrt(0.06) - 1e-12);
  }
}

TEST(Sampling, DesignReproducibility) {
  const VarianceProfile g = make_polynomial(7, 5, 0.2);
  const DesignMatrix a = sample_design(g, EntryDist::Pareto, 99, "poly");
  const DesignMatrix b = sample_design(g, EntryDist::Pareto, 99);
  EXPECT_EQ(a.X, b.X);
  EXPECT_EQ(a.profile_ref, "poly");
  EXPECT_NE(a.X, sample_design(g, EntryDist::Pareto, 100).X);
  EXPECT_NE(a.X, sample_design(g, EntryDist::Gaussian, 99).X);
  EXPECT_EQ(sample_design(make_constant(4, 3, 0.0), EntryDist::Gaussian, 1).X,
            Eigen::MatrixXd::Zero(4, 3));
  // Entry (i, j) is a function of the index alone.
  EXPECT_DOUBLE_EQ(a.X(2, 3), std::sqrt(g(2, 3)) * standardized_entry(99, 2 + 3 * 7, EntryDist::Pareto));
  EXPECT_EQ(parse_entry_dist("pareto"), EntryDist::Pareto);
  EXPECT_THROW(parse_entry_dist("cauchy"), InvalidArgument);
}

TEST(Spectral, TrivialDesigns) {
  const SpectralDecomposition zero = spectral_decompose(Eigen::MatrixXd::Zero(4, 3));
  EXPECT_EQ(zero.eigenvalues, Eigen::VectorXd::Zero(3));
  EXPECT_EQ(zero.rank(), 0);
  EXPECT_THROW(min_nonzero_eigenvalue(zero), InvalidArgument);

  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(9, 4);
  x.topRows(4) = 3.0 * Eigen::MatrixXd::Identity(4, 4);
  const SpectralDecomposition id = spectral_decompose(x);
  EXPECT_LE((id.eigenvalues.array() - 1.0).abs().maxCoeff(), 1e-14);
  EXPECT_NEAR(min_nonzero_eigenvalue(id), 1.0, 1e-14);
  EXPECT_LE((resolvent_diag(id, 1.0).array() - 0.5).abs().maxCoeff(), 1e-14);
}

TEST(Spectral, MatchesCharacteristicPolynomial) {
  const Eigen::MatrixXd x = gaussian_matrix(5, 3, 21);
  const SpectralDecomposition dec = spectral_decompose(x);
  const Eigen::Matrix3d cov = x.transpose() * x / 5.0;
  const std::vector<double> roots = cubic_eigenvalues(cov);
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(dec.eigenvalues(k), roots[k], 1e-8);
}

TEST(Spectral, ReconstructionAndOrdering) {
  const DesignMatrix d = sample_design(normalize(make_block(24, 36, 0.5, 2, 4)), EntryDist::Gaussian, 4);
  const SpectralDecomposition dec = spectral_decompose(d);
  const Eigen::MatrixXd cov = d.X.transpose() * d.X / 24.0;
  const Eigen::MatrixXd rebuilt =
      dec.eigenvectors * dec.eigenvalues.asDiagonal() * dec.eigenvectors.transpose();
  EXPECT_LE((rebuilt - cov).cwiseAbs().maxCoeff(), 1e-8 * dec.eigenvalues(0));
  for (Index k = 1; k < dec.p(); ++k) EXPECT_GE(dec.eigenvalues(k - 1), dec.eigenvalues(k));
  EXPECT_GE(dec.eigenvalues.minCoeff(), 0.0);
  EXPECT_EQ(dec.rank(), 24);
}

TEST(Spectral, RankOneDesign) {
  Eigen::MatrixXd x(3, 2);
  x << 1, 2, 2, 4, -1, -2;
  const SpectralDecomposition dec = spectral_decompose(x);
  EXPECT_EQ(dec.rank(), 1);
  EXPECT_NEAR(min_nonzero_eigenvalue(dec), 30.0 / 3.0, 1e-12);
  EXPECT_NEAR(min_nonzero_eigenvalue(x), 10.0, 1e-12);
}

TEST(EmpiricalRisk, Dof) {
  EXPECT_EQ(emp_dof(spectral_decompose(Eigen::MatrixXd::Zero(3, 3)), 1.0), 0.0);
  EXPECT_DOUBLE_EQ(emp_dof(identity_spectrum(4, 8), 1.0), 0.5);

  const VarianceProfile g = make_constant(1000, 500, 1.0);
  const SpectralDecomposition dec = spectral_decompose(sample_design(g, EntryDist::Gaussian, 1));
  EXPECT_LE(std::abs(emp_dof(dec, 1.0) - det_dof(g, 1.0)), 0.01);
}

TEST(EmpiricalRisk, DegenerateModelAndScalarCase) {
  const SpectralDecomposition dec = spectral_decompose(gaussian_matrix(6, 4, 3));
  const RiskReport zero = emp_test_risk(dec, TestProfile(Eigen::VectorXd::Ones(4)), {0, 0}, 0.3);
  EXPECT_EQ(zero.test_risk, 0.0);

  // n = p = 1: theta - beta = (-lambda beta + x eps) / (x^2 + lambda).
  const double x = 2.0, lambda = 0.5, alpha = 1.5, sigma = 0.7, s = 1.3;
  Eigen::MatrixXd xm(1, 1);
  xm << x;
  const RiskReport r = emp_test_risk(spectral_decompose(xm), TestProfile(Eigen::VectorXd::Constant(1, s)),
                                     {alpha, sigma}, lambda);
  const double denom = (x * x + lambda) * (x * x + lambda);
  EXPECT_NEAR(r.test_risk,
              sigma * sigma + s * (lambda * lambda * alpha * alpha + x * x * sigma * sigma) / denom,
              1e-14);
  EXPECT_NEAR(r.bias, s * lambda * lambda * alpha * alpha / denom, 1e-14);
  // Training residual y - x theta = lambda y / (x^2 + lambda).
  EXPECT_NEAR(r.train_risk, lambda * lambda * (x * x * alpha * alpha + sigma * sigma) / denom, 1e-14);
}

TEST(EmpiricalRisk, TracksDeterministicEquivalent) {
  const VarianceProfile g = make_constant(400, 600, 1.0);
  const TestProfile s = test_profile_columns(g);
  const SpectralDecomposition dec = spectral_decompose(sample_design(g, EntryDist::Gaussian, 2));
  for (double lambda : {0.1, 0.3, 1.0, 3.0, 10.0}) {
    EXPECT_LE(std::abs(emp_test_risk(dec, s, {1, 1}, lambda).test_risk -
                       det_test_risk(g, s, {1, 1}, lambda)),
              0.02)
        << lambda;
  }
}

TEST(EmpiricalRisk, TrainRiskLimits) {
  const SpectralDecomposition wide = spectral_decompose(gaussian_matrix(20, 40, 5));
  EXPECT_LT(emp_train_risk(wide, {1, 1}, 1e-8), 1e-6);

  // Unit spectrum, alpha = 0: sigma^2 p / (4 n) + sigma^2 (1 - p/n).
  EXPECT_NEAR(emp_train_risk(identity_spectrum(4, 8), {0.0, 1.5}, 1.0),
              2.25 * 4.0 / 32.0 + 2.25 * 0.5, 1e-14);
}

TEST(EmpiricalRisk, TrainRiskMatchesMonteCarloOracle) {
  const Index n = 30, p = 45;
  const DesignMatrix d = sample_design(normalize(make_polynomial(n, p, 0.1)), EntryDist::Gaussian, 8);
  const ModelParams params{1.3, 0.6};
  const double lambda = 0.4;
  Eigen::MatrixXd a = d.X.transpose() * d.X;
  a.diagonal().array() += n * lambda;
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(a);

  std::mt19937_64 gen(2024);
  std::normal_distribution<double> z;
  const int draws = 2000;
  double s = 0, ss = 0;
  for (int k = 0; k < draws; ++k) {
    Eigen::VectorXd beta(p), eps(n);
    for (Index j = 0; j < p; ++j) beta(j) = params.alpha / std::sqrt(double(p)) * z(gen);
    for (Index i = 0; i < n; ++i) eps(i) = params.sigma * z(gen);
    const Eigen::VectorXd y = d.X * beta + eps;
    const Eigen::VectorXd theta = ldlt.solve(d.X.transpose() * y);
    const double loss = (y - d.X * theta).squaredNorm() / n;
    s += loss;
    ss += loss * loss;
  }
  const double mean = s / draws;
  const double se = std::sqrt((ss / draws - mean * mean) / (draws - 1));
  EXPECT_LE(std::abs(mean - emp_train_risk(spectral_decompose(d), params, lambda)), 3 * se);
}

TEST(EmpiricalRisk, Gcv) {
  const SpectralDecomposition tall = spectral_decompose(gaussian_matrix(40, 10, 6));
  EXPECT_NEAR(*emp_gcv(tall, {1, 1}, 1e8), emp_train_risk(tall, {1, 1}, 1e8), 1e-6);
  // dof -> 1 only when p <= n.
  EXPECT_FALSE(emp_gcv(tall, {1, 1}, 1e-12).has_value());
  const SpectralDecomposition wide = spectral_decompose(gaussian_matrix(10, 40, 6));
  EXPECT_TRUE(emp_gcv(wide, {1, 1}, 1e-12).has_value());
}

TEST(EmpiricalRisk, GcvTracksDeterministicGcvAtDeskScale) {
  for (const auto& [name, g] : zoo(1000, 500)) {
    if (name == "constant" || name == "quasi_ds" || name == "piecewise") continue;
    const SpectralDecomposition dec = spectral_decompose(sample_design(g, EntryDist::Gaussian, 3));
    for (double lambda : {0.1, 0.5, 1.0, 3.0}) {
      const double det = *det_gcv(g, {1, 1}, lambda);
      EXPECT_LE(std::abs(*emp_gcv(dec, {1, 1}, lambda) - det), 0.05 * std::max(1.0, det))
          << name << " " << lambda;
    }
  }
}

TEST(EmpiricalRisk, ResolventDiagonal) {
  const VarianceProfile g = make_constant(1000, 500, 1.0);
  const SpectralDecomposition dec = spectral_decompose(sample_design(g, EntryDist::Gaussian, 9));
  const Eigen::VectorXd q = resolvent_diag(dec, 1.0);
  EXPECT_GT(q.minCoeff(), 0.0);
  EXPECT_LT(q.maxCoeff(), 1.0);
  const DysonSolution s = solve_dyson(g, 1.0);
  const Eigen::VectorXd u = test_profile_columns(g).values();
  EXPECT_LE(std::abs(u.dot(q - s.T) / 500.0), 0.02);
}

TEST(EmpiricalRisk, CompanionTraceIdentity) {
  EXPECT_LE(companion_trace_identity(gaussian_matrix(6, 6, 1), 0.5), 1e-8 * 6 / 0.5);
  EXPECT_LE(companion_trace_identity(gaussian_matrix(5, 8, 2), 0.3), 1e-10);
  EXPECT_LE(companion_trace_identity(Eigen::MatrixXd::Zero(5, 8), 0.3), 1e-12);
}

TEST(MonteCarlo, DegenerateModel) {
  const DesignMatrix d = sample_design(make_constant(8, 5, 1.0), EntryDist::Gaussian, 1);
  const MonteCarloEstimate e =
      monte_carlo_test_risk(d, TestProfile(Eigen::VectorXd::Ones(5)), {0, 0}, 1.0, 10, 3);
  EXPECT_EQ(e.mean, 0.0);
  EXPECT_EQ(e.std_error, 0.0);
  EXPECT_THROW(monte_carlo_test_risk(d, TestProfile(Eigen::VectorXd::Ones(5)), {1, 1}, 1.0, 1, 3),
               InvalidArgument);
}

TEST(MonteCarlo, AgreesWithConditionalRisk) {
  const VarianceProfile g = normalize(make_alternated_columns(30, 20, 0.5, 1.5));
  const DesignMatrix d = sample_design(g, EntryDist::Gaussian, 12);
  const TestProfile s = test_profile_columns(g);
  const MonteCarloEstimate e = monte_carlo_test_risk(d, s, {1, 1}, 1.0, 50000, 77);
  const double exact = emp_test_risk(spectral_decompose(d), s, {1, 1}, 1.0).test_risk;
  EXPECT_LE(std::abs(e.mean - exact), 3 * e.std_error);
}

TEST(MonteCarlo, BatchSizeDoesNotChangeDraws) {
  const VarianceProfile g = make_constant(10, 6, 1.0);
  const DesignMatrix d = sample_design(g, EntryDist::Pareto, 5);
  const TestProfile s = test_profile_columns(g);
  const MonteCarloEstimate a = monte_carlo_test_risk(d, s, {1, 1}, 0.5, 300, 9, 7);
  const MonteCarloEstimate b = monte_carlo_test_risk(d, s, {1, 1}, 0.5, 300, 9, 300);
  EXPECT_NEAR(a.mean, b.mean, 1e-12);
  EXPECT_NEAR(a.std_error, b.std_error, 1e-12);
}

TEST(MonteCarlo, RidgelessContinuity) {
  const DesignMatrix d = sample_design(make_constant(40, 20, 1.0), EntryDist::Gaussian, 2);
  const TestProfile s(Eigen::VectorXd::Ones(20));
  const MonteCarloEstimate a = monte_carlo_test_risk(d, s, {1, 1}, 1e-8, 4000, 1);
  const MonteCarloEstimate b = monte_carlo_test_risk(d, s, {1, 1}, 1e-6, 4000, 2);
  EXPECT_LE(std::abs(a.mean - b.mean), 3 * std::hypot(a.std_error, b.std_error));
}

TEST(EmpiricalProperties, PermutationInvariance) {
  const VarianceProfile g = normalize(make_polynomial(20, 15, 0.1));
  const DesignMatrix d = sample_design(g, EntryDist::Gaussian, 3);
  const TestProfile s = test_profile_columns(g);
  Eigen::PermutationMatrix<Eigen::Dynamic> perm(15);
  perm.setIdentity();
  std::mt19937 gen(4);
  std::shuffle(perm.indices().data(), perm.indices().data() + 15, gen);
  const Eigen::MatrixXd xp = d.X * perm;
  const TestProfile sp(perm.transpose() * s.values());

  const SpectralDecomposition a = spectral_decompose(d.X);
  const SpectralDecomposition b = spectral_decompose(xp);
  for (double lambda : {0.05, 1.0}) {
    const RiskReport ra = emp_test_risk(a, s, {1, 1}, lambda);
    const RiskReport rb = emp_test_risk(b, sp, {1, 1}, lambda);
    EXPECT_NEAR(ra.test_risk, rb.test_risk, 1e-10);
    EXPECT_NEAR(ra.train_risk, rb.train_risk, 1e-10);
    EXPECT_NEAR(ra.dof, rb.dof, 1e-10);
  }
}

TEST(EmpiricalProperties, DecompositionAndDofBounds) {
  for (const auto& [name, g] : zoo(24, 36)) {
    const SpectralDecomposition dec = spectral_decompose(sample_design(g, EntryDist::Pareto, 6));
    const TestProfile s = test_profile_columns(g);
    double previous = 2.0;
    for (double lambda : {1e-3, 0.01, 0.1, 1.0, 10.0}) {
      const RiskReport r = emp_test_risk(dec, s, {0.9, 1.1}, lambda);
      EXPECT_NEAR(1.21 + r.bias + r.variance, r.test_risk, 1e-10) << name;
      EXPECT_LT(r.dof, previous) << name;
      EXPECT_LE(r.dof, std::min(1.0, double(dec.rank()) / dec.p()) + 1e-15) << name;
      previous = r.dof;
    }
  }
}

TEST(EmpiricalProperties, MonteCarloIsUnbiased) {
  const VarianceProfile g = normalize(make_block(12, 24, 0.5, 2, 4));
  const DesignMatrix d = sample_design(g, EntryDist::Gaussian, 1);
  const TestProfile s = test_profile_columns(g);
  const double exact = emp_test_risk(spectral_decompose(d), s, {1, 1}, 0.5).test_risk;
  std::vector<double> z;
  for (std::uint64_t rep = 0; rep < 20; ++rep) {
    const MonteCarloEstimate e = monte_carlo_test_risk(d, s, {1, 1}, 0.5, 1000, 100 + rep);
    z.push_back((e.mean - exact) / e.std_error);
  }
  double mean = 0, var = 0;
  for (double v : z) mean += v / 20.0;
  for (double v : z) var += (v - mean) * (v - mean) / 19.0;
  EXPECT_LE(std::abs(mean), 3.0 / std::sqrt(20.0) * std::sqrt(var));
}

TEST(EmpiricalProperties, MinEigenvalueDipsAtInterpolation) {
  const Index n = 100;
  std::vector<double> ratios;
  for (int k = 0; k < 15; ++k) ratios.push_back(0.3 * std::pow(10.0, k / 14.0));
  std::size_t best = 0;
  double best_val = 1e300;
  for (std::size_t k = 0; k < ratios.size(); ++k) {
    const Index p = static_cast<Index>(std::llround(ratios[k] * n));
    const double v = min_nonzero_eigenvalue(
        sample_design(make_constant(n, p, 1.0), EntryDist::Gaussian, 40 + k).X);
    if (v < best_val) {
      best_val = v;
      best = k;
    }
  }
  std::size_t nearest = 0;
  for (std::size_t k = 1; k < ratios.size(); ++k) {
    if (std::abs(ratios[k] - 1) < std::abs(ratios[nearest] - 1)) nearest = k;
  }
  EXPECT_EQ(best, nearest);
}
