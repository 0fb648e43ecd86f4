#pragma once

#include "vprisk/equivalents.hpp"
#include "vprisk/profiles.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>

namespace vprisk {

enum class EntryDist { Gaussian, Pareto };

const char* to_string(EntryDist dist) noexcept;
/// Accepts "gaussian" and "pareto".
EntryDist parse_entry_dist(const std::string& name);

struct DesignMatrix {
  Eigen::MatrixXd X;  // n x p
  std::string profile_ref;
  std::uint64_t seed = 0;
  EntryDist entry_dist = EntryDist::Gaussian;
};

/// Standardised entry number `index` of the stream: mean 0, variance 1.
/// Pareto(6, 1) draws xi = U^(-1/6) and returns (xi - 6/5) / sqrt(6/100).
double standardized_entry(std::uint64_t seed, std::uint64_t index, EntryDist dist);

/// X_ij = gamma_ij z_ij where z_ij depends only on (seed, i + j n).
DesignMatrix sample_design(const VarianceProfile& profile, EntryDist dist, std::uint64_t seed,
                           std::string profile_ref = {});

/// Eigendecomposition of X^T X / n.
struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;   // nonincreasing; entries below rank_tol are exactly 0
  Eigen::MatrixXd eigenvectors;  // columns match eigenvalues
  double rank_tol = 0.0;         // 1e-10 * largest eigenvalue
  Index n = 0;

  Index p() const noexcept { return eigenvalues.size(); }
  Index rank() const;
};

SpectralDecomposition spectral_decompose(const Eigen::MatrixXd& X);
SpectralDecomposition spectral_decompose(const DesignMatrix& design);

/// (1/p) sum_k l_k / (l_k + lambda).
double emp_dof(const SpectralDecomposition& dec, double lambda);

/// Diagonal of (Sigma^ + lambda)^-1: sum_k V_jk^2 / (l_k + lambda).
Eigen::VectorXd resolvent_diag(const SpectralDecomposition& dec, double lambda);
/// Diagonal of (Sigma^ + lambda)^-2.
Eigen::VectorXd resolvent_prime_diag(const SpectralDecomposition& dec, double lambda);

/// E[|Y - X theta|^2 / n | X] = (lambda^2 alpha^2 / p) sum_k l_k / (l_k + lambda)^2
///   + (lambda^2 sigma^2 / n) sum_k 1 / (l_k + lambda)^2 + sigma^2 (1 - p/n).
double emp_train_risk(const SpectralDecomposition& dec, const ModelParams& params, double lambda);

/// Conditional test risk with its bias/variance split; train risk, DOF and GCV
/// are filled in as well.
RiskReport emp_test_risk(const SpectralDecomposition& dec, const TestProfile& test_profile,
                         const ModelParams& params, double lambda);

/// Empty when 1 - dof < gcv_domain_tol.
std::optional<double> emp_gcv(const SpectralDecomposition& dec, const ModelParams& params,
                              double lambda);

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long draws = 0;
};

/// Direct simulation of E[(y~ - x~^T theta)^2 | X]: each draw samples beta,
/// the training noise, a test point and its noise, and solves the ridge normal
/// equations by Cholesky. Draw d uses its own counter stream, so the estimate
/// does not depend on batch_size.
MonteCarloEstimate monte_carlo_test_risk(const DesignMatrix& design,
                                         const TestProfile& test_profile,
                                         const ModelParams& params, double lambda, long num_draws,
                                         std::uint64_t seed, long batch_size = 256);

/// Smallest eigenvalue above rank_tol. Throws InvalidArgument when there is none.
double min_nonzero_eigenvalue(const SpectralDecomposition& dec);

/// Same quantity from the eigenvalues of the smaller Gram matrix (X X^T or
/// X^T X, divided by n), without eigenvectors.
double min_nonzero_eigenvalue(const Eigen::MatrixXd& X);

/// |Tr (X^T X/n + lambda)^-1 - Tr (X X^T/n + lambda)^-1 - (p - n)/lambda|.
double companion_trace_identity(const Eigen::MatrixXd& X, double lambda);

}  // namespace vprisk
