#pragma once

#include "vprisk/dyson.hpp"
#include "vprisk/profiles.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace vprisk {

/// Signal strength (E[beta beta^T] = alpha^2/p I) and noise level. Zero is
/// allowed for either, which degenerates the model to noise-only or noiseless.
struct ModelParams {
  double alpha = 1.0;
  double sigma = 1.0;
};

enum class RiskKind { Deterministic, Empirical, MonteCarlo };

const char* to_string(RiskKind kind) noexcept;

struct RiskReport {
  RiskKind kind = RiskKind::Deterministic;
  double lambda = 0.0;
  double test_risk = 0.0;
  double train_risk = 0.0;
  double bias = 0.0;
  double variance = 0.0;
  double dof = 0.0;
  std::optional<double> gcv;  // empty when 1 - dof < gcv_domain_tol
  // Solver metadata; zero for empirical reports.
  long iterations = 0;
  double residual = 0.0;
};

/// GCV is reported out of domain when 1 - dof falls below this.
inline constexpr double gcv_domain_tol = 1e-6;

/// sigma^2 p / (alpha^2 n). Throws InvalidArgument unless alpha > 0.
double optimal_lambda(const ModelParams& params, Index n, Index p);

/// Dyson solution and its derivative at one lambda.
struct DeterministicPoint {
  DysonSolution solution;
  DysonDerivative derivative;
};

DeterministicPoint solve_point(const VarianceProfile& profile, double lambda,
                               const DysonSolution* warm_start = nullptr);

/// (1/p) sum_j Sigma_j / (Sigma_j + kappa_j).
double det_dof(const VarianceProfile& profile, double lambda);
double det_dof(const VarianceProfile& profile, const DeterministicPoint& point);
/// 1 - lambda * mean(T); equal to det_dof at a solved point.
double det_dof_trace(const DeterministicPoint& point);

double det_test_risk(const VarianceProfile& profile, const TestProfile& test_profile,
                     const ModelParams& params, double lambda);

/// (lambda^2 alpha^2 / p) Tr[T - lambda T'] + (lambda^2 sigma^2 / n) Tr[T'] + sigma^2 (1 - p/n).
///
/// This is E[|Y - X theta|^2 / n | X] with T substituted for the resolvent
/// diagonal; the last term accounts for the n - p zero eigenvalues of X X^T / n
/// when p < n (and is negative, cancelling the missing ones, when p > n).
double det_train_risk(const VarianceProfile& profile, const ModelParams& params, double lambda);

struct BiasVariance {
  double bias = 0.0;
  double variance = 0.0;
};

/// bias = (lambda^2 alpha^2 / p) Tr[S~ T'], variance = (sigma^2 / n) Tr[S~ (T - lambda T')].
BiasVariance det_bias_variance(const VarianceProfile& profile, const TestProfile& test_profile,
                               const ModelParams& params, double lambda);

/// Train risk / (1 - dof)^2, or empty when 1 - dof < gcv_domain_tol.
std::optional<double> det_gcv(const VarianceProfile& profile, const ModelParams& params,
                              double lambda);

/// Every deterministic quantity at a solved point.
RiskReport det_report(const VarianceProfile& profile, const TestProfile& test_profile,
                      const ModelParams& params, const DeterministicPoint& point);

struct RidgelessRisk {
  double risk = 0.0;
  RidgelessMode mode = RidgelessMode::Under;
  double error_estimate = 0.0;
};

/// lambda -> 0+ limit of the deterministic test risk.
///   p < n: sigma^2 + (sigma^2/n) Tr[S~ T(0-)]
///   p > n: sigma^2 + (alpha^2/p) Tr[S~ kappa (Sigma + kappa)^-1]
///                  + (sigma^2/n) Tr[S~ kappa' Sigma (Sigma + kappa)^-2]
/// with kappa, kappa' taken at 0+.
RidgelessRisk ridgeless_test_risk(const VarianceProfile& profile, const TestProfile& test_profile,
                                  const ModelParams& params,
                                  const ValidationOptions& validation = {});

struct CurvePoint {
  double x = 0.0;
  std::optional<RiskReport> report;
  std::string error;
};

/// One deterministic report per lambda, warm-starting each solve from the
/// previous one. The grid must be strictly positive and strictly increasing;
/// failures at individual points are recorded and the sweep continues.
std::vector<CurvePoint> risk_curve(const VarianceProfile& profile, const TestProfile& test_profile,
                                   const ModelParams& params, const std::vector<double>& lambdas);

/// Builds the profile for dimensions (n, p).
struct ProfileFamily {
  std::function<VarianceProfile(Index n, Index p)> make;
  Index p_multiple = 1;  // p is rounded up to a multiple of this
  std::string name;
};

using TestRule = std::function<TestProfile(const VarianceProfile&)>;

struct DescentPoint {
  double ratio = 0.0;
  Index p = 0;
  std::optional<double> risk;
  double error_estimate = 0.0;
  std::string error;
};

/// p = round(ratio * n), rounded up to the family's multiple.
Index descent_p(double ratio, Index n, Index p_multiple);

/// Ridgeless deterministic risk per ratio. Points are independent and are
/// spread over `threads` workers (0 = all cores); output order follows the grid.
std::vector<DescentPoint> descent_curve(const ProfileFamily& family, const TestRule& test_rule,
                                        const ModelParams& params, Index n,
                                        const std::vector<double>& ratios,
                                        const ValidationOptions& validation = {},
                                        unsigned threads = 1);

}  // namespace vprisk
