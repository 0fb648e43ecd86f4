#include "vprisk/dyson.hpp"
#include "vprisk/errors.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

using namespace vprisk;
using vprisk::testing::mp_companion_root;
using vprisk::testing::mp_root;
using vprisk::testing::rel_err;
using vprisk::testing::zoo;

namespace {

// dm/dz at z = -lambda by implicit differentiation of F(m, lambda) =
// -lambda c m^2 + (c - 1 - lambda) m + 1: dm/dlambda = -F_lambda / F_m.
double mp_root_prime(double c, double lambda) {
  const double m = mp_root(c, lambda);
  const double f_lambda = -c * m * m - m;
  const double f_m = -2.0 * lambda * c * m + c - 1.0 - lambda;
  return f_lambda / f_m;  // = -dm/dlambda
}

double mp_companion_root_prime(double c, double lambda) {
  const double m = mp_companion_root(c, lambda);
  const double f_lambda = -m * m - m;
  const double f_m = -2.0 * lambda * m + 1.0 - c - lambda;
  return f_lambda / f_m;
}

std::vector<double> log_grid(double lo, double hi, int count) {
  std::vector<double> g;
  for (int k = 0; k < count; ++k) {
    g.push_back(lo * std::pow(hi / lo, static_cast<double>(k) / (count - 1)));
  }
  return g;
}

}  // namespace

TEST(Dyson, ConstantProfileMatchesQuadraticOracle) {
  for (auto [n, p] : {std::pair<Index, Index>{50, 25}, {40, 40}, {30, 90}}) {
    const VarianceProfile g = make_constant(n, p, 1.0);
    const double c = static_cast<double>(p) / static_cast<double>(n);
    for (double lambda : log_grid(1e-3, 1e3, 13)) {
      const DysonSolution s = solve_dyson(g, lambda);
      EXPECT_LE(s.residual, 1e-12);
      EXPECT_LE((s.T.array() - mp_root(c, lambda)).abs().maxCoeff(), 1e-10 * mp_root(c, lambda))
          << "c=" << c << " lambda=" << lambda;
      EXPECT_LE((s.T_tilde.array() - mp_companion_root(c, lambda)).abs().maxCoeff(),
                1e-10 * mp_companion_root(c, lambda));
    }
  }
}

TEST(Dyson, LargeLambdaAsymptote) {
  const VarianceProfile g = normalize(make_polynomial(30, 45, 0.1));
  const double lambda = 1e6;
  const DysonSolution s = solve_dyson(g, lambda);
  const double bound = 10.0 * g.gamma_sq().maxCoeff() * 1.5 / lambda;
  EXPECT_LE((s.T.array() * lambda - 1.0).abs().maxCoeff(), bound);
}

TEST(Dyson, TwoByTwoMatchesPlainIteration) {
  Eigen::Matrix2d m;
  m << 1, 2, 3, 4;
  const VarianceProfile g{Eigen::MatrixXd(m)};
  const double lambda = 1.0;

  // Undamped Jacobi iteration of the displayed system, written out by hand.
  double t[2] = {1, 1};
  double tt[2] = {1, 1};
  for (int it = 0; it < 50000; ++it) {
    double nt[2];
    double ntt[2];
    for (int j = 0; j < 2; ++j) nt[j] = 1.0 / (lambda * (1.0 + (m(0, j) * tt[0] + m(1, j) * tt[1]) / 2));
    for (int i = 0; i < 2; ++i) ntt[i] = 1.0 / (lambda * (1.0 + (m(i, 0) * t[0] + m(i, 1) * t[1]) / 2));
    t[0] = nt[0];
    t[1] = nt[1];
    tt[0] = ntt[0];
    tt[1] = ntt[1];
  }
  const DysonSolution s = solve_dyson(g, lambda);
  EXPECT_NEAR(s.T(0), t[0], 1e-10);
  EXPECT_NEAR(s.T(1), t[1], 1e-10);
  EXPECT_NEAR(s.T_tilde(0), tt[0], 1e-10);
  EXPECT_NEAR(s.T_tilde(1), tt[1], 1e-10);
}

TEST(Dyson, ResidualDefinition) {
  const VarianceProfile g = make_constant(20, 10, 1.0);
  const double c = 0.5;
  const Eigen::VectorXd t = Eigen::VectorXd::Constant(10, mp_root(c, 0.7));
  const Eigen::VectorXd tt = Eigen::VectorXd::Constant(20, mp_companion_root(c, 0.7));
  EXPECT_LE(dyson_residual(g, 0.7, t, tt), 1e-12);
  EXPECT_DOUBLE_EQ(dyson_residual(g, 0.7, Eigen::VectorXd::Zero(10), Eigen::VectorXd::Zero(20)),
                   1.0);
  Eigen::VectorXd bumped = t;
  bumped(3) += 1e-3;
  EXPECT_GT(dyson_residual(g, 0.7, bumped, tt), 1e-4);
  EXPECT_THROW(dyson_residual(g, 0.7, tt, t), InvalidArgument);
}

TEST(Dyson, RejectsBadInput) {
  const VarianceProfile g = make_constant(4, 4, 1.0);
  EXPECT_THROW(solve_dyson(g, 0.0), InvalidArgument);
  EXPECT_THROW(solve_dyson(g, -1.0), InvalidArgument);
  DysonOptions opts;
  opts.max_iter = 1;
  EXPECT_THROW(solve_dyson(normalize(make_polynomial(30, 40, 0.1)), 1e-3, opts), ConvergenceError);
  try {
    solve_dyson(normalize(make_polynomial(30, 40, 0.1)), 1e-3, opts);
  } catch (const ConvergenceError& e) {
    EXPECT_GT(e.residual(), 0.0);
    EXPECT_EQ(e.iterations(), 1);
  }
}

TEST(Dyson, WarmStartReachesSameFixedPoint) {
  const VarianceProfile g = normalize(make_block(24, 36, 0.5, 2, 4));
  const DysonSolution a = solve_dyson(g, 0.3);
  DysonOptions opts;
  opts.warm_start = &a;
  const DysonSolution b = solve_dyson(g, 0.25, opts);
  const DysonSolution c = solve_dyson(g, 0.25);
  EXPECT_LE((b.T - c.T).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LE(b.iterations, c.iterations);
}

TEST(Dyson, DerivativeMatchesImplicitMpDerivative) {
  for (double c : {0.5, 2.0}) {
    const VarianceProfile g = make_constant(40, static_cast<Index>(40 * c), 1.0);
    for (double lambda : {0.01, 0.3, 1.0, 20.0}) {
      const DysonSolution s = solve_dyson(g, lambda);
      const DysonDerivative d = solve_dyson_derivative(g, lambda, s);
      EXPECT_FALSE(d.finite_difference);
      EXPECT_LE((d.T_prime.array() / mp_root_prime(c, lambda) - 1.0).abs().maxCoeff(), 1e-9);
      EXPECT_LE((d.T_tilde_prime.array() / mp_companion_root_prime(c, lambda) - 1.0)
                    .abs()
                    .maxCoeff(),
                1e-9);
    }
  }
}

TEST(Dyson, DerivativeMatchesFiniteDifferencesOnZoo) {
  for (auto [n, p] : {std::pair<Index, Index>{36, 48}, {48, 24}}) {
    for (const auto& [name, g] : zoo(n, p)) {
      for (double lambda : {0.1, 1.0, 10.0}) {
        const DysonSolution s = solve_dyson(g, lambda);
        const DysonDerivative d = solve_dyson_derivative(g, lambda, s);
        const DysonDerivative fd = finite_difference_derivative(g, lambda);
        EXPECT_LE((d.T_prime - fd.T_prime).cwiseAbs().cwiseQuotient(fd.T_prime).maxCoeff(), 1e-6)
            << name << " lambda=" << lambda;
        EXPECT_LE((d.T_tilde_prime - fd.T_tilde_prime)
                      .cwiseAbs()
                      .cwiseQuotient(fd.T_tilde_prime)
                      .maxCoeff(),
                  1e-6)
            << name;
      }
    }
  }
}

TEST(Dyson, DerivativeLargeLambda) {
  const VarianceProfile g = normalize(make_alternated_columns(20, 30, 0.5, 1.5));
  const double lambda = 1e4;
  const DysonDerivative d = solve_dyson_derivative(g, lambda, solve_dyson(g, lambda));
  EXPECT_LE((d.T_prime.array() * lambda * lambda - 1.0).abs().maxCoeff(), 10.0 / lambda);
}

TEST(Dyson, StieltjesBoundsAndMonotonicity) {
  for (const auto& [name, g] : zoo(24, 36)) {
    Eigen::VectorXd previous;
    for (double lambda : log_grid(1e-2, 1e2, 9)) {
      const DysonSolution s = solve_dyson(g, lambda);
      const DysonDerivative d = solve_dyson_derivative(g, lambda, s);
      EXPECT_GT(s.T.minCoeff(), 0.0) << name;
      EXPECT_LE(s.T.maxCoeff(), 1.0 / lambda) << name;
      EXPECT_GT(s.T_tilde.minCoeff(), 0.0) << name;
      EXPECT_LE(s.T_tilde.maxCoeff(), 1.0 / lambda) << name;
      EXPECT_TRUE((d.T_prime.array() >= s.T.array().square() * (1 - 1e-12)).all()) << name;
      EXPECT_TRUE((d.T_prime.array() <= (1 + 1e-12) / (lambda * lambda)).all()) << name;
      if (previous.size() > 0) EXPECT_TRUE((s.T.array() <= previous.array()).all()) << name;
      previous = s.T;
    }
  }
}

TEST(Dyson, SolveIsBitwiseDeterministic) {
  const VarianceProfile g = make_quasi_doubly_stochastic(30, 45, 2);
  const DysonSolution a = solve_dyson(g, 0.05);
  const DysonSolution b = solve_dyson(g, 0.05);
  EXPECT_EQ(a.T, b.T);
  EXPECT_EQ(a.T_tilde, b.T_tilde);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(MarchenkoPastur, ClosedForms) {
  EXPECT_NEAR(mp_stieltjes(1.0, 1.0), (std::sqrt(5.0) - 1.0) / 2.0, 1e-15);
  EXPECT_NEAR(mp_stieltjes(1.0, 1e9) * 1e9, 1.0, 1e-8);
  EXPECT_NEAR(mp_stieltjes(0.5, 1e-10), 2.0, 1e-8);
  EXPECT_NEAR(mp_stieltjes_companion(2.0, 1e-10), 1.0, 1e-8);
  EXPECT_NEAR(mp_stieltjes_companion_prime(2.0, 1e-10), 2.0, 1e-7);
  for (double c : {0.3, 1.0, 2.5}) {
    for (double lambda : {1e-3, 0.1, 1.0, 50.0}) {
      EXPECT_LE(rel_err(mp_stieltjes(c, lambda), mp_root(c, lambda)), 1e-14);
      EXPECT_LE(rel_err(mp_stieltjes_companion(c, lambda), mp_companion_root(c, lambda)), 1e-14);
      EXPECT_LE(rel_err(mp_stieltjes_prime(c, lambda), mp_root_prime(c, lambda)), 1e-12);
      EXPECT_LE(rel_err(mp_stieltjes_companion_prime(c, lambda),
                        mp_companion_root_prime(c, lambda)),
                1e-12);
      // The two transforms are tied by lambda m = 1 / (1 + mt).
      EXPECT_NEAR(lambda * mp_stieltjes(c, lambda), 1.0 / (1.0 + mp_stieltjes_companion(c, lambda)),
                  1e-12);
    }
  }
}

TEST(Kappa, QuasiDoublyStochasticCollapse) {
  const VarianceProfile g = make_quasi_doubly_stochastic(40, 80, 9);
  for (double lambda : {0.05, 1.0}) {
    const DysonSolution s = solve_dyson(g, lambda);
    const KappaValue k = kappa(g, lambda, s);
    EXPECT_LE((k.kappa.array() * mp_companion_root(2.0, lambda) - 1.0).abs().maxCoeff(), 1e-9);
  }
}

TEST(Kappa, ConstantProfileValueAndDerivative) {
  const VarianceProfile g = make_constant(30, 60, 1.0);
  const double lambda = 1.0;
  const DysonSolution s = solve_dyson(g, lambda);
  const DysonDerivative d = solve_dyson_derivative(g, lambda, s);
  const double mt = mp_companion_root(2.0, lambda);
  EXPECT_LE((kappa(g, lambda, s).kappa.array() - 1.0 / mt).abs().maxCoeff(), 1e-10);
  // kappa = 1 / mt(-lambda) so d kappa / d lambda = mt'(z) / mt^2.
  const double expect = mp_companion_root_prime(2.0, lambda) / (mt * mt);
  EXPECT_LE((kappa_prime(g, lambda, s, d).array() / expect - 1.0).abs().maxCoeff(), 1e-9);
}

TEST(Kappa, ConsistencyIdentityOnZoo) {
  for (const auto& [name, g] : zoo(36, 54)) {
    const Eigen::ArrayXd sigma = population_covariance(g).sigma_diag.array();
    for (double lambda : {0.1, 1.0, 10.0}) {
      const DysonSolution s = solve_dyson(g, lambda);
      const Eigen::ArrayXd k = kappa(g, lambda, s).kappa.array();
      EXPECT_TRUE((k > 0).all());
      const Eigen::ArrayXd rebuilt = k / (lambda * (sigma + k));
      EXPECT_LE((rebuilt / s.T.array() - 1.0).abs().maxCoeff(), 1e-8) << name;
    }
  }
}

TEST(Kappa, PrimeMatchesFiniteDifferences) {
  for (const auto& [name, g] : zoo(36, 54)) {
    for (double lambda : {0.1, 1.0, 10.0}) {
      const DysonSolution s = solve_dyson(g, lambda);
      const Eigen::VectorXd kp = kappa_prime(g, lambda, s, solve_dyson_derivative(g, lambda, s));
      const double h = 1e-5 * lambda;
      const Eigen::VectorXd up = kappa(g, lambda + h, solve_dyson(g, lambda + h)).kappa;
      const Eigen::VectorXd down = kappa(g, lambda - h, solve_dyson(g, lambda - h)).kappa;
      const Eigen::VectorXd fd = (up - down) / (2 * h);
      EXPECT_LE((kp - fd).cwiseAbs().cwiseQuotient(fd.cwiseAbs()).maxCoeff(), 1e-5) << name;
    }
  }
}

TEST(Kappa, ZeroColumnIsRejected) {
  const VarianceProfile g = make_alternated_columns(6, 4, 0.0, 1.0);
  const DysonSolution s = solve_dyson(g, 1.0);
  EXPECT_THROW(kappa(g, 1.0, s), InvalidArgument);
}

TEST(Ridgeless, ConstantProfileLimits) {
  const VarianceProfile under = make_constant(100, 50, 1.0);
  const RidgelessLimits lu = ridgeless_limits(under, RidgelessMode::Under);
  EXPECT_LE((lu.first.array() - 2.0).abs().maxCoeff(), 1e-8);
  EXPECT_LE(lu.error_estimate, 1e-6);
  // T'(0-) for MP with c < 1 is m(0)^3 = 1 / (1 - c)^3.
  EXPECT_LE((lu.second.array() - 8.0).abs().maxCoeff(), 1e-6);

  const VarianceProfile over = make_constant(100, 200, 1.0);
  const RidgelessLimits lo = ridgeless_limits(over, RidgelessMode::Over);
  EXPECT_LE((lo.first.array() - 1.0).abs().maxCoeff(), 1e-8);
  EXPECT_LE((lo.second.array() - 2.0).abs().maxCoeff(), 1e-6);
}

TEST(Ridgeless, QuasiDoublyStochasticMatchesConstant) {
  const VarianceProfile g = make_quasi_doubly_stochastic(60, 120, 5);
  const RidgelessLimits lo = ridgeless_limits(g, RidgelessMode::Over);
  EXPECT_LE((lo.first.array() - 1.0).abs().maxCoeff(), 1e-7);
  EXPECT_LE((lo.second.array() - 2.0).abs().maxCoeff(), 1e-6);
}

TEST(Ridgeless, Guards) {
  EXPECT_THROW(ridgeless_limits(make_constant(50, 50, 1.0), RidgelessMode::Under),
               AssumptionViolation);
  EXPECT_THROW(ridgeless_limits(make_constant(50, 100, 1.0), RidgelessMode::Under),
               AssumptionViolation);
  EXPECT_THROW(ridgeless_limits(make_constant(100, 50, 1.0), RidgelessMode::Over),
               AssumptionViolation);
  EXPECT_THROW(ridgeless_limits(make_alternated_columns(50, 100, 0.0, 1.0), RidgelessMode::Over),
               AssumptionViolation);
  EXPECT_THROW(ridgeless_limits(make_constant(100, 50, 1.0), RidgelessMode::Under, {1e-2, 1e-3}),
               InvalidArgument);
}
