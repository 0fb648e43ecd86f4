#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace vprisk {

using Index = Eigen::Index;

/// n x p matrix of entrywise variances gamma_ij^2 of the design X = Upsilon o Z.
///
/// Immutable once built. The constructor rejects empty, negative or
/// non-finite entries; an all-zero profile is representable (it is flagged as
/// degenerate by validate()).
class VarianceProfile {
 public:
  explicit VarianceProfile(Eigen::MatrixXd gamma_sq);

  Index n() const noexcept { return gamma_sq_.rows(); }
  Index p() const noexcept { return gamma_sq_.cols(); }
  double operator()(Index i, Index j) const { return gamma_sq_(i, j); }
  const Eigen::MatrixXd& gamma_sq() const noexcept { return gamma_sq_; }

  /// (1 / (n p)) * sum of all entries.
  double mean() const { return gamma_sq_.mean(); }

 private:
  Eigen::MatrixXd gamma_sq_;
};

/// Diagonal of the test-point covariance S~_p.
class TestProfile {
 public:
  explicit TestProfile(Eigen::VectorXd tilde_gamma_sq);

  Index p() const noexcept { return values_.size(); }
  const Eigen::VectorXd& values() const noexcept { return values_; }

 private:
  Eigen::VectorXd values_;
};

/// Diagonal of Sigma_n = E[X^T X / n]; entry j is the j-th column mean of the profile.
struct PopulationCovariance {
  Eigen::VectorXd sigma_diag;
};

// --- Generators ----------------------------------------------------------

/// Every entry equals gamma^2.
VarianceProfile make_constant(Index n, Index p, double gamma);

/// Seeded positive matrix Sinkhorn-scaled so that (1/n) * row sums = p/n and
/// (1/n) * column sums = 1. Throws ConvergenceError if scaling stalls.
VarianceProfile make_quasi_doubly_stochastic(Index n, Index p, std::uint64_t seed,
                                             int max_sweeps = 10000, double tol = 1e-10);

/// Two-by-two block profile: gamma1_sq on the top-left (n/4 x p/4) and
/// bottom-right (3n/4 x 3p/4) blocks, gamma2_sq on the off-diagonal blocks.
/// Requires n and p divisible by 4.
VarianceProfile make_piecewise(Index n, Index p, double gamma1_sq, double gamma2_sq);

/// Three-by-three block profile with row/column partitions (1/4, 1/3, 5/12):
///
///   [ g1  g2  1  ]
///   [ g2  g1  g3 ]
///   [ 1   g3  g1 ]
///
/// Requires n and p divisible by 12.
VarianceProfile make_block(Index n, Index p, double gamma1_sq, double gamma2_sq, double gamma3_sq);

/// Column j (1-based) carries gamma1_sq when j is even and gamma2_sq when j is
/// odd. With 0-based storage this puts gamma2_sq in column 0.
VarianceProfile make_alternated_columns(Index n, Index p, double gamma1_sq, double gamma2_sq);

/// gamma_ij^2 = |(i - j) / min(n, p)|^6 + tau with 1-based i, j.
VarianceProfile make_polynomial(Index n, Index p, double tau);

struct MixtureProfile {
  VarianceProfile profile;
  std::vector<int> labels;  // 0-based class of each row
};

/// Rows drawn from a K-class mixture: row i copies row C_i of class_variances,
/// with C_i ~ Categorical(class_probs) from the seeded counter stream.
MixtureProfile make_mixture(Index n, const Eigen::VectorXd& class_probs,
                            const Eigen::MatrixXd& class_variances, std::uint64_t seed);

// --- I/O -----------------------------------------------------------------

/// Reads a headerless numeric CSV. Ragged rows, non-numeric cells and negative
/// entries raise ParseError naming the 1-based row/column.
VarianceProfile load_csv(const std::filesystem::path& path);
void save_csv(const std::filesystem::path& path, const VarianceProfile& profile);

// --- Derived quantities --------------------------------------------------

/// Rescales so that the mean entry is 1. Throws InvalidArgument on an all-zero profile.
VarianceProfile normalize(const VarianceProfile& profile);

PopulationCovariance population_covariance(const VarianceProfile& profile);

/// Default test profile: the column means (matches Sigma_n).
TestProfile test_profile_columns(const VarianceProfile& profile);

// --- Validation ----------------------------------------------------------

struct ValidationOptions {
  bool for_ridgeless = false;
  double gamma_min_sq = 1e-10;  // lower bound on entries for the ridgeless limit
  double d_star = 5e-3;         // required separation |p/n - 1| >= d_star
};

struct ProfileDiagnostics {
  double max_entry = 0.0;
  double min_entry = 0.0;
  bool degenerate = false;    // every entry is zero
  bool min_entry_ok = true;   // min over profile and test profile >= gamma_min_sq
  double ratio_gap = 0.0;     // |p/n - 1|
  bool ratio_ok = true;       // ratio_gap >= d_star
  double row_sum_defect = 0;  // max_i |(1/n) sum_j g_ij - p/n|
  double col_sum_defect = 0;  // max_j |(1/n) sum_i g_ij - 1|
  std::vector<std::string> errors;
  std::vector<std::string> warnings;

  bool ok() const noexcept { return errors.empty(); }
};

/// Checks the boundedness assumptions. Assumption violations are errors when
/// options.for_ridgeless is set and warnings otherwise; a test profile whose
/// length differs from p is always an error.
ProfileDiagnostics validate(const VarianceProfile& profile, const TestProfile& test_profile,
                            const ValidationOptions& options = {});

/// Throws AssumptionViolation listing every error of validate(..., for_ridgeless = true).
void require_ridgeless_valid(const VarianceProfile& profile, const TestProfile& test_profile,
                             ValidationOptions options = {});

}  // namespace vprisk
