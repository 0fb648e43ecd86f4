#include "vprisk/equivalents.hpp"

#include "vprisk/errors.hpp"
#include "vprisk/parallel.hpp"

#include <cmath>
#include <exception>

namespace vprisk {

namespace {

void require_params(const ModelParams& params) {
  if (!(params.alpha >= 0.0) || !std::isfinite(params.alpha) || !(params.sigma >= 0.0) ||
      !std::isfinite(params.sigma)) {
    throw InvalidArgument("alpha and sigma must be finite and >= 0");
  }
}

void require_test_profile(const VarianceProfile& profile, const TestProfile& test_profile) {
  if (test_profile.p() != profile.p()) {
    throw InvalidArgument("test profile length " + std::to_string(test_profile.p()) +
                          " does not match p=" + std::to_string(profile.p()));
  }
}

BiasVariance bias_variance_at(const VarianceProfile& profile, const TestProfile& test_profile,
                              const ModelParams& params, const DeterministicPoint& point) {
  const double lambda = point.solution.lambda;
  const Eigen::VectorXd& s = test_profile.values();
  const double tr_t = s.dot(point.solution.T);
  const double tr_tp = s.dot(point.derivative.T_prime);
  const double a2 = params.alpha * params.alpha;
  const double s2 = params.sigma * params.sigma;
  return {lambda * lambda * a2 / static_cast<double>(profile.p()) * tr_tp,
          s2 / static_cast<double>(profile.n()) * (tr_t - lambda * tr_tp)};
}

double test_risk_at(const VarianceProfile& profile, const TestProfile& test_profile,
                    const ModelParams& params, const DeterministicPoint& point) {
  const double lambda = point.solution.lambda;
  const Eigen::VectorXd& s = test_profile.values();
  const double n = static_cast<double>(profile.n());
  const double p = static_cast<double>(profile.p());
  const double a2 = params.alpha * params.alpha;
  const double s2 = params.sigma * params.sigma;
  return s2 + s2 / n * s.dot(point.solution.T) +
         lambda * (lambda * a2 / p - s2 / n) * s.dot(point.derivative.T_prime);
}

double train_risk_at(const VarianceProfile& profile, const ModelParams& params,
                     const DeterministicPoint& point) {
  const double lambda = point.solution.lambda;
  const double n = static_cast<double>(profile.n());
  const double p = static_cast<double>(profile.p());
  const double a2 = params.alpha * params.alpha;
  const double s2 = params.sigma * params.sigma;
  const double tr_t = point.solution.T.sum();
  const double tr_tp = point.derivative.T_prime.sum();
  const double l2 = lambda * lambda;
  return l2 * a2 / p * (tr_t - lambda * tr_tp) + l2 * s2 / n * tr_tp + s2 * (1.0 - p / n);
}

std::optional<double> gcv_from(double train, double dof) {
  const double gap = 1.0 - dof;
  if (!(gap >= gcv_domain_tol)) return std::nullopt;
  return train / (gap * gap);
}

}  // namespace

const char* to_string(RiskKind kind) noexcept {
  switch (kind) {
    case RiskKind::Deterministic:
      return "deterministic";
    case RiskKind::Empirical:
      return "empirical";
    case RiskKind::MonteCarlo:
      return "monte_carlo";
  }
  return "unknown";
}

double optimal_lambda(const ModelParams& params, Index n, Index p) {
  require_params(params);
  if (!(params.alpha > 0.0)) throw InvalidArgument("optimal lambda needs alpha > 0");
  if (n < 1 || p < 1) throw InvalidArgument("n and p must be positive");
  return params.sigma * params.sigma * static_cast<double>(p) /
         (params.alpha * params.alpha * static_cast<double>(n));
}

DeterministicPoint solve_point(const VarianceProfile& profile, double lambda,
                               const DysonSolution* warm_start) {
  DysonOptions opts;
  opts.warm_start = warm_start;
  DeterministicPoint pt;
  pt.solution = solve_dyson(profile, lambda, opts);
  pt.derivative = solve_dyson_derivative(profile, lambda, pt.solution);
  return pt;
}

double det_dof(const VarianceProfile& profile, const DeterministicPoint& point) {
  const Eigen::ArrayXd sigma = population_covariance(profile).sigma_diag.array();
  const Eigen::ArrayXd k = kappa(profile, point.solution.lambda, point.solution).kappa.array();
  return (sigma / (sigma + k)).mean();
}

double det_dof(const VarianceProfile& profile, double lambda) {
  return det_dof(profile, solve_point(profile, lambda));
}

double det_dof_trace(const DeterministicPoint& point) {
  return 1.0 - point.solution.lambda * point.solution.T.mean();
}

double det_test_risk(const VarianceProfile& profile, const TestProfile& test_profile,
                     const ModelParams& params, double lambda) {
  require_params(params);
  require_test_profile(profile, test_profile);
  return test_risk_at(profile, test_profile, params, solve_point(profile, lambda));
}

double det_train_risk(const VarianceProfile& profile, const ModelParams& params, double lambda) {
  require_params(params);
  return train_risk_at(profile, params, solve_point(profile, lambda));
}

BiasVariance det_bias_variance(const VarianceProfile& profile, const TestProfile& test_profile,
                               const ModelParams& params, double lambda) {
  require_params(params);
  require_test_profile(profile, test_profile);
  return bias_variance_at(profile, test_profile, params, solve_point(profile, lambda));
}

std::optional<double> det_gcv(const VarianceProfile& profile, const ModelParams& params,
                              double lambda) {
  require_params(params);
  const DeterministicPoint pt = solve_point(profile, lambda);
  return gcv_from(train_risk_at(profile, params, pt), det_dof_trace(pt));
}

RiskReport det_report(const VarianceProfile& profile, const TestProfile& test_profile,
                      const ModelParams& params, const DeterministicPoint& point) {
  require_params(params);
  require_test_profile(profile, test_profile);
  RiskReport r;
  r.kind = RiskKind::Deterministic;
  r.lambda = point.solution.lambda;
  r.test_risk = test_risk_at(profile, test_profile, params, point);
  r.train_risk = train_risk_at(profile, params, point);
  const BiasVariance bv = bias_variance_at(profile, test_profile, params, point);
  r.bias = bv.bias;
  r.variance = bv.variance;
  // The trace form avoids the division by Tr[D~_j] and so also covers zero columns.
  r.dof = det_dof_trace(point);
  r.gcv = gcv_from(r.train_risk, r.dof);
  r.iterations = point.solution.iterations;
  r.residual = point.solution.residual;
  return r;
}

RidgelessRisk ridgeless_test_risk(const VarianceProfile& profile, const TestProfile& test_profile,
                                  const ModelParams& params,
                                  const ValidationOptions& validation) {
  require_params(params);
  require_test_profile(profile, test_profile);
  require_ridgeless_valid(profile, test_profile, validation);
  const double n = static_cast<double>(profile.n());
  const double p = static_cast<double>(profile.p());
  const double a2 = params.alpha * params.alpha;
  const double s2 = params.sigma * params.sigma;
  const Eigen::ArrayXd st = test_profile.values().array();

  RidgelessRisk out;
  out.mode = profile.p() < profile.n() ? RidgelessMode::Under : RidgelessMode::Over;
  const RidgelessLimits lim =
      ridgeless_limits(profile, out.mode, default_ridgeless_sequence(), validation);
  out.error_estimate = lim.error_estimate;
  if (out.mode == RidgelessMode::Under) {
    out.risk = s2 + s2 / n * (st * lim.first.array()).sum();
  } else {
    const Eigen::ArrayXd sigma = population_covariance(profile).sigma_diag.array();
    const Eigen::ArrayXd& k = lim.first.array();
    const Eigen::ArrayXd& kp = lim.second.array();
    out.risk = s2 + a2 / p * (st * k / (sigma + k)).sum() +
               s2 / n * (kp * st * sigma / (sigma + k).square()).sum();
  }
  return out;
}

std::vector<CurvePoint> risk_curve(const VarianceProfile& profile, const TestProfile& test_profile,
                                   const ModelParams& params, const std::vector<double>& lambdas) {
  require_params(params);
  require_test_profile(profile, test_profile);
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    if (!(lambdas[k] > 0.0) || !std::isfinite(lambdas[k])) {
      throw InvalidArgument("lambda grid must be strictly positive");
    }
    if (k > 0 && !(lambdas[k] > lambdas[k - 1])) {
      throw InvalidArgument("lambda grid must be strictly increasing");
    }
  }

  std::vector<CurvePoint> out(lambdas.size());
  std::optional<DysonSolution> warm;
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    out[k].x = lambdas[k];
    try {
      DeterministicPoint pt = solve_point(profile, lambdas[k], warm ? &*warm : nullptr);
      out[k].report = det_report(profile, test_profile, params, pt);
      warm = std::move(pt.solution);
    } catch (const std::exception& e) {
      out[k].error = e.what();
    }
  }
  return out;
}

Index descent_p(double ratio, Index n, Index p_multiple) {
  if (!(ratio > 0.0) || !std::isfinite(ratio)) throw InvalidArgument("ratio must be positive");
  if (p_multiple < 1) throw InvalidArgument("p multiple must be positive");
  Index p = static_cast<Index>(std::llround(ratio * static_cast<double>(n)));
  p = std::max<Index>(p, 1);
  return (p + p_multiple - 1) / p_multiple * p_multiple;
}

std::vector<DescentPoint> descent_curve(const ProfileFamily& family, const TestRule& test_rule,
                                        const ModelParams& params, Index n,
                                        const std::vector<double>& ratios,
                                        const ValidationOptions& validation, unsigned threads) {
  require_params(params);
  if (!family.make) throw InvalidArgument("profile family has no generator");
  std::vector<DescentPoint> out(ratios.size());
  parallel_for(ratios.size(), threads, [&](std::size_t k) {
    DescentPoint& pt = out[k];
    pt.ratio = ratios[k];
    try {
      pt.p = descent_p(ratios[k], n, family.p_multiple);
      const VarianceProfile profile = family.make(n, pt.p);
      const TestProfile test = test_rule ? test_rule(profile) : test_profile_columns(profile);
      const RidgelessRisk r = ridgeless_test_risk(profile, test, params, validation);
      pt.risk = r.risk;
      pt.error_estimate = r.error_estimate;
    } catch (const std::exception& e) {
      pt.error = e.what();
    }
  });
  return out;
}

}  // namespace vprisk
