#pragma once

#include "vprisk/profiles.hpp"

#include <Eigen/Dense>

#include <vector>

namespace vprisk {

/// Solution of the coupled system, at z = -lambda,
///
///   T_j  * lambda * (1 + (1/n) sum_i g_ij T~_i) = 1,   j = 1..p
///   T~_i * lambda * (1 + (1/n) sum_j g_ij T_j ) = 1,   i = 1..n
struct DysonSolution {
  Eigen::VectorXd T;        // length p
  Eigen::VectorXd T_tilde;  // length n
  double lambda = 0.0;
  double residual = 0.0;
  long iterations = 0;
};

/// z-derivatives T'(z), T~'(z) at z = -lambda.
struct DysonDerivative {
  Eigen::VectorXd T_prime;
  Eigen::VectorXd T_tilde_prime;
  bool finite_difference = false;  // set when the analytic system was too ill-conditioned
};

struct KappaValue {
  Eigen::VectorXd kappa;
  Eigen::VectorXd kappa_prime;  // empty unless requested
};

struct DysonOptions {
  double tol = 1e-12;
  long max_iter = 100000;
  const DysonSolution* warm_start = nullptr;  // initial iterate; dimensions must match
};

/// Damped alternating fixed point. Throws InvalidArgument for lambda <= 0 and
/// ConvergenceError (with the final residual) after max_iter iterations.
DysonSolution solve_dyson(const VarianceProfile& profile, double lambda,
                          const DysonOptions& options = {});

/// Sup-norm defect of both equations.
double dyson_residual(const VarianceProfile& profile, double lambda, const Eigen::VectorXd& T,
                      const Eigen::VectorXd& T_tilde);

/// Solves the differentiated system through a Schur complement on the smaller
/// side. Falls back to central differences of solve_dyson when the reduced
/// matrix has reciprocal condition number below 1e-12.
DysonDerivative solve_dyson_derivative(const VarianceProfile& profile, double lambda,
                                       const DysonSolution& solution);

/// Central-difference derivative (T(-lambda + h) - T(-lambda - h)) / 2h in z, h = rel_step * lambda.
DysonDerivative finite_difference_derivative(const VarianceProfile& profile, double lambda,
                                             double rel_step = 1e-5);

// --- Marchenko-Pastur closed forms (c = p/n, z = -lambda) -------------------

/// Positive root of -lambda c m^2 + (c - 1 - lambda) m + 1 = 0.
double mp_stieltjes(double c, double lambda);
/// Positive root of -lambda m~^2 + (1 - c - lambda) m~ + 1 = 0, i.e. 1/m~ = lambda + c/(1 + m~).
double mp_stieltjes_companion(double c, double lambda);
/// dm/dz at z = -lambda.
double mp_stieltjes_prime(double c, double lambda);
/// dm~/dz at z = -lambda.
double mp_stieltjes_companion_prime(double c, double lambda);

// --- Regularisation surrogate --------------------------------------------

/// kappa_j = sum_i g_ij / sum_i g_ij T~_i. Throws InvalidArgument on an all-zero column.
KappaValue kappa(const VarianceProfile& profile, double lambda, const DysonSolution& solution);

/// d kappa_j / d lambda = Tr[D~_j] Tr[D~_j T~'] / Tr[D~_j T~]^2.
Eigen::VectorXd kappa_prime(const VarianceProfile& profile, double lambda,
                            const DysonSolution& solution, const DysonDerivative& derivative);

// --- lambda -> 0 -------------------------------------------------------------

enum class RidgelessMode { Under, Over };

struct RidgelessLimits {
  RidgelessMode mode = RidgelessMode::Under;
  Eigen::VectorXd first;   // T(0-) when Under, kappa(0+) when Over
  Eigen::VectorXd second;  // T'(0-) when Under, kappa'(0+) when Over
  double error_estimate = 0.0;  // relative change against the extrapolation one step earlier
  std::vector<double> lambdas;  // sequence actually used
};

/// lambda_k = 1e-2 * 4^-k, k = 0..8.
std::vector<double> default_ridgeless_sequence();

/// Evaluates the Dyson solution along a decreasing lambda sequence (warm
/// started) and Richardson-extrapolates the last three points to lambda = 0.
/// If the estimate still exceeds max_error at the end of the sequence, up to
/// max_extra_steps further lambdas (same ratio) are added; this matters when
/// the limiting spectrum has a very small lower edge.
/// Under needs p < n, Over needs p > n; validates the profile for ridgeless
/// use and throws AssumptionViolation otherwise. Throws ConvergenceError when
/// the extrapolation does not settle.
RidgelessLimits ridgeless_limits(const VarianceProfile& profile, RidgelessMode mode,
                                 const std::vector<double>& lambda_sequence =
                                     default_ridgeless_sequence(),
                                 const ValidationOptions& validation = {},
                                 double max_error = 1e-6, int max_extra_steps = 16);

}  // namespace vprisk
