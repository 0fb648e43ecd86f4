#include "vprisk/empirical.hpp"

#include "vprisk/errors.hpp"
#include "vprisk/rng.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>

namespace vprisk {

namespace {

constexpr double kRankTol = 1e-10;

void require_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw InvalidArgument("lambda must be positive and finite");
  }
}

void require_params(const ModelParams& params) {
  if (!(params.alpha >= 0.0) || !std::isfinite(params.alpha) || !(params.sigma >= 0.0) ||
      !std::isfinite(params.sigma)) {
    throw InvalidArgument("alpha and sigma must be finite and >= 0");
  }
}

// Eigenvalues below kRankTol * max are numerical zeros; clamping them keeps
// the lambda -> 0 behaviour of the resolvent traces exact.
void clamp_small(Eigen::VectorXd& w) {
  const double top = w.size() > 0 ? w.maxCoeff() : 0.0;
  const double tol = kRankTol * std::max(top, 0.0);
  for (Index k = 0; k < w.size(); ++k) {
    if (w(k) <= tol) w(k) = 0.0;
  }
}

}  // namespace

const char* to_string(EntryDist dist) noexcept {
  return dist == EntryDist::Pareto ? "pareto" : "gaussian";
}

EntryDist parse_entry_dist(const std::string& name) {
  if (name == "gaussian") return EntryDist::Gaussian;
  if (name == "pareto") return EntryDist::Pareto;
  throw InvalidArgument("unknown entry distribution '" + name + "' (expected gaussian or pareto)");
}

double standardized_entry(std::uint64_t seed, std::uint64_t index, EntryDist dist) {
  const CounterRng rng(seed);
  if (dist == EntryDist::Gaussian) return rng.normal(index, 0);
  // Pareto(a = 6, scale 1): mean a/(a-1) = 1.2, variance a/((a-1)^2 (a-2)) = 0.06.
  const double xi = std::pow(rng.uniform(index, 0), -1.0 / 6.0);
  return (xi - 1.2) / std::sqrt(0.06);
}

DesignMatrix sample_design(const VarianceProfile& profile, EntryDist dist, std::uint64_t seed,
                           std::string profile_ref) {
  const Index n = profile.n();
  const Index p = profile.p();
  DesignMatrix d;
  d.X.resize(n, p);
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < n; ++i) {
      const auto index = static_cast<std::uint64_t>(i + j * n);
      d.X(i, j) = std::sqrt(profile(i, j)) * standardized_entry(seed, index, dist);
    }
  }
  d.profile_ref = std::move(profile_ref);
  d.seed = seed;
  d.entry_dist = dist;
  return d;
}

Index SpectralDecomposition::rank() const {
  Index r = 0;
  for (Index k = 0; k < eigenvalues.size(); ++k) r += eigenvalues(k) > 0.0 ? 1 : 0;
  return r;
}

SpectralDecomposition spectral_decompose(const Eigen::MatrixXd& X) {
  if (X.rows() < 1 || X.cols() < 1) throw InvalidArgument("design must be non-empty");
  const Eigen::MatrixXd cov = (X.transpose() * X) / static_cast<double>(X.rows());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("eigendecomposition of the " + std::to_string(cov.rows()) + "x" +
                             std::to_string(cov.cols()) + " sample covariance failed");
  }
  SpectralDecomposition dec;
  dec.n = X.rows();
  dec.eigenvalues = es.eigenvalues().reverse();
  dec.eigenvectors = es.eigenvectors().rowwise().reverse();
  clamp_small(dec.eigenvalues);
  dec.rank_tol = kRankTol * dec.eigenvalues(0);
  return dec;
}

SpectralDecomposition spectral_decompose(const DesignMatrix& design) {
  return spectral_decompose(design.X);
}

double emp_dof(const SpectralDecomposition& dec, double lambda) {
  require_lambda(lambda);
  return (dec.eigenvalues.array() / (dec.eigenvalues.array() + lambda)).mean();
}

Eigen::VectorXd resolvent_diag(const SpectralDecomposition& dec, double lambda) {
  require_lambda(lambda);
  return dec.eigenvectors.array().square().matrix() *
         (1.0 / (dec.eigenvalues.array() + lambda)).matrix();
}

Eigen::VectorXd resolvent_prime_diag(const SpectralDecomposition& dec, double lambda) {
  require_lambda(lambda);
  return dec.eigenvectors.array().square().matrix() *
         (1.0 / (dec.eigenvalues.array() + lambda).square()).matrix();
}

double emp_train_risk(const SpectralDecomposition& dec, const ModelParams& params, double lambda) {
  require_lambda(lambda);
  require_params(params);
  const Eigen::ArrayXd& l = dec.eigenvalues.array();
  const double n = static_cast<double>(dec.n);
  const double p = static_cast<double>(dec.p());
  const double a2 = params.alpha * params.alpha;
  const double s2 = params.sigma * params.sigma;
  const Eigen::ArrayXd inv2 = 1.0 / (l + lambda).square();
  const double l2 = lambda * lambda;
  return l2 * a2 / p * (l * inv2).sum() + l2 * s2 / n * inv2.sum() + s2 * (1.0 - p / n);
}

RiskReport emp_test_risk(const SpectralDecomposition& dec, const TestProfile& test_profile,
                         const ModelParams& params, double lambda) {
  require_lambda(lambda);
  require_params(params);
  if (test_profile.p() != dec.p()) {
    throw InvalidArgument("test profile length does not match the design");
  }
  const double n = static_cast<double>(dec.n);
  const double p = static_cast<double>(dec.p());
  const double a2 = params.alpha * params.alpha;
  const double s2 = params.sigma * params.sigma;
  const Eigen::VectorXd& s = test_profile.values();
  const double tr_q = s.dot(resolvent_diag(dec, lambda));
  const double tr_qp = s.dot(resolvent_prime_diag(dec, lambda));

  RiskReport r;
  r.kind = RiskKind::Empirical;
  r.lambda = lambda;
  r.bias = lambda * lambda * a2 / p * tr_qp;
  r.variance = s2 / n * (tr_q - lambda * tr_qp);
  r.test_risk = s2 + s2 / n * tr_q + lambda * (lambda * a2 / p - s2 / n) * tr_qp;
  r.train_risk = emp_train_risk(dec, params, lambda);
  r.dof = emp_dof(dec, lambda);
  const double gap = 1.0 - r.dof;
  if (gap >= gcv_domain_tol) r.gcv = r.train_risk / (gap * gap);
  return r;
}

std::optional<double> emp_gcv(const SpectralDecomposition& dec, const ModelParams& params,
                              double lambda) {
  const double gap = 1.0 - emp_dof(dec, lambda);
  if (!(gap >= gcv_domain_tol)) return std::nullopt;
  return emp_train_risk(dec, params, lambda) / (gap * gap);
}

MonteCarloEstimate monte_carlo_test_risk(const DesignMatrix& design,
                                         const TestProfile& test_profile,
                                         const ModelParams& params, double lambda, long num_draws,
                                         std::uint64_t seed, long batch_size) {
  require_lambda(lambda);
  require_params(params);
  if (num_draws < 2) throw InvalidArgument("Monte Carlo needs at least two draws");
  if (batch_size < 1) throw InvalidArgument("batch size must be positive");
  const Eigen::MatrixXd& X = design.X;
  const Index n = X.rows();
  const Index p = X.cols();
  if (test_profile.p() != p) throw InvalidArgument("test profile length does not match the design");

  Eigen::MatrixXd gram = X.transpose() * X;
  gram.diagonal().array() += static_cast<double>(n) * lambda;
  const Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) throw std::runtime_error("ridge normal equations are singular");

  const CounterRng rng(seed);
  const double beta_sd = params.alpha / std::sqrt(static_cast<double>(p));
  const Eigen::ArrayXd test_sd = test_profile.values().array().sqrt();
  // Per-draw counter layout: beta, training noise, test point, test noise.
  const auto off_eps = static_cast<std::uint64_t>(p);
  const auto off_x = off_eps + static_cast<std::uint64_t>(n);
  const auto off_e = off_x + static_cast<std::uint64_t>(p);

  double sum = 0.0;
  double sum_sq = 0.0;
  Eigen::MatrixXd beta;
  Eigen::MatrixXd eps;
  Eigen::MatrixXd xt;
  Eigen::VectorXd et;
  for (long start = 0; start < num_draws; start += batch_size) {
    const long b = std::min(batch_size, num_draws - start);
    beta.resize(p, b);
    eps.resize(n, b);
    xt.resize(p, b);
    et.resize(b);
    for (long d = 0; d < b; ++d) {
      const auto stream = static_cast<std::uint64_t>(start + d);
      for (Index j = 0; j < p; ++j) {
        beta(j, d) = beta_sd * rng.normal(stream, static_cast<std::uint64_t>(j));
        xt(j, d) = test_sd(j) * rng.normal(stream, off_x + static_cast<std::uint64_t>(j));
      }
      for (Index i = 0; i < n; ++i) {
        eps(i, d) = params.sigma * rng.normal(stream, off_eps + static_cast<std::uint64_t>(i));
      }
      et(d) = params.sigma * rng.normal(stream, off_e);
    }
    const Eigen::MatrixXd y = X * beta + eps;
    const Eigen::MatrixXd theta = llt.solve(X.transpose() * y);
    const Eigen::VectorXd resid =
        (xt.array() * (beta - theta).array()).colwise().sum().transpose() + et.array();
    sum += resid.squaredNorm();
    sum_sq += resid.array().pow(4).sum();
  }

  MonteCarloEstimate est;
  est.draws = num_draws;
  const double m = static_cast<double>(num_draws);
  est.mean = sum / m;
  const double var = std::max(0.0, (sum_sq - m * est.mean * est.mean) / (m - 1.0));
  est.std_error = std::sqrt(var / m);
  return est;
}

double min_nonzero_eigenvalue(const SpectralDecomposition& dec) {
  for (Index k = dec.eigenvalues.size() - 1; k >= 0; --k) {
    if (dec.eigenvalues(k) > dec.rank_tol && dec.eigenvalues(k) > 0.0) return dec.eigenvalues(k);
  }
  throw InvalidArgument("sample covariance has no nonzero eigenvalue");
}

double min_nonzero_eigenvalue(const Eigen::MatrixXd& X) {
  if (X.rows() < 1 || X.cols() < 1) throw InvalidArgument("design must be non-empty");
  const double n = static_cast<double>(X.rows());
  const Eigen::MatrixXd gram =
      X.rows() <= X.cols() ? Eigen::MatrixXd(X * X.transpose() / n)
                           : Eigen::MatrixXd(X.transpose() * X / n);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("Gram eigendecomposition failed");
  Eigen::VectorXd w = es.eigenvalues();
  clamp_small(w);
  for (Index k = 0; k < w.size(); ++k) {
    if (w(k) > 0.0) return w(k);
  }
  throw InvalidArgument("sample covariance has no nonzero eigenvalue");
}

double companion_trace_identity(const Eigen::MatrixXd& X, double lambda) {
  require_lambda(lambda);
  const double n = static_cast<double>(X.rows());
  const double p = static_cast<double>(X.cols());
  auto inv_trace = [lambda](const Eigen::MatrixXd& m) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    return (1.0 / (es.eigenvalues().array() + lambda)).sum();
  };
  const double tr_p = inv_trace(X.transpose() * X / n);
  const double tr_n = inv_trace(X * X.transpose() / n);
  return std::abs(tr_p - tr_n - (p - n) / lambda);
}

}  // namespace vprisk
