#include "vprisk/dyson.hpp"

#include "vprisk/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <utility>

namespace vprisk {

namespace {

void require_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw InvalidArgument("lambda must be positive and finite");
  }
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Positive root of a x^2 - b x - 1 = 0 with a > 0, computed without cancellation.
double positive_root(double a, double b) {
  const double disc = std::sqrt(b * b + 4.0 * a);
  return b >= 0.0 ? (b + disc) / (2.0 * a) : 2.0 / (disc - b);
}

}  // namespace

DysonSolution solve_dyson(const VarianceProfile& profile, double lambda,
                          const DysonOptions& options) {
  require_lambda(lambda);
  const Eigen::MatrixXd& g = profile.gamma_sq();
  const Index n = profile.n();
  const Index p = profile.p();
  const double inv_n = 1.0 / static_cast<double>(n);

  DysonSolution s;
  s.lambda = lambda;
  if (options.warm_start != nullptr) {
    if (options.warm_start->T.size() != p || options.warm_start->T_tilde.size() != n) {
      throw InvalidArgument("warm start has mismatched dimensions");
    }
    s.T = options.warm_start->T;
    s.T_tilde = options.warm_start->T_tilde;
  } else {
    const double init = 1.0 / (lambda + profile.mean());
    s.T = Eigen::VectorXd::Constant(p, init);
    s.T_tilde = Eigen::VectorXd::Constant(n, init);
  }

  // v tracks (1/n) G^T T~ for the current T~, u is (1/n) G T for the current T.
  Eigen::VectorXd v = inv_n * (g.transpose() * s.T_tilde);
  Eigen::VectorXd u(n);
  double theta = 1.0;
  double previous = std::numeric_limits<double>::infinity();
  for (long it = 0;; ++it) {
    u.noalias() = inv_n * (g * s.T);
    const double r_tilde = (lambda * s.T_tilde.array() * (1.0 + u.array()) - 1.0).abs().maxCoeff();
    const double r = (lambda * s.T.array() * (1.0 + v.array()) - 1.0).abs().maxCoeff();
    s.residual = std::max(r, r_tilde);
    s.iterations = it;
    if (s.residual <= options.tol) return s;
    if (!std::isfinite(s.residual) || it >= options.max_iter) {
      throw ConvergenceError("Dyson iteration stopped at lambda=" + fmt(lambda) + " after " +
                                 std::to_string(it) + " iterations (residual " +
                                 fmt(s.residual) + ")",
                             s.residual, it);
    }
    if (s.residual > previous) theta = std::max(0.5 * theta, 0.1);
    previous = s.residual;

    s.T_tilde = theta / (lambda * (1.0 + u.array())) + (1.0 - theta) * s.T_tilde.array();
    v.noalias() = inv_n * (g.transpose() * s.T_tilde);
    s.T = theta / (lambda * (1.0 + v.array())) + (1.0 - theta) * s.T.array();
  }
}

double dyson_residual(const VarianceProfile& profile, double lambda, const Eigen::VectorXd& T,
                      const Eigen::VectorXd& T_tilde) {
  if (T.size() != profile.p() || T_tilde.size() != profile.n()) {
    throw InvalidArgument("dyson_residual: dimensions do not match the profile");
  }
  const double inv_n = 1.0 / static_cast<double>(profile.n());
  const Eigen::ArrayXd v = inv_n * (profile.gamma_sq().transpose() * T_tilde).array();
  const Eigen::ArrayXd u = inv_n * (profile.gamma_sq() * T).array();
  const double r = (lambda * T.array() * (1.0 + v) - 1.0).abs().maxCoeff();
  const double r_tilde = (lambda * T_tilde.array() * (1.0 + u) - 1.0).abs().maxCoeff();
  return std::max(r, r_tilde);
}

DysonDerivative solve_dyson_derivative(const VarianceProfile& profile, double lambda,
                                       const DysonSolution& solution) {
  require_lambda(lambda);
  const Index n = profile.n();
  const Index p = profile.p();
  if (solution.T.size() != p || solution.T_tilde.size() != n) {
    throw InvalidArgument("solve_dyson_derivative: solution does not match the profile");
  }
  // With G = Gamma / n, u = G T, v = G^T T~ and z = -lambda, differentiating
  // T = -1 / (z (1 + v)) gives
  //   T'  = T^2  (1 + v - lambda G^T T~')
  //   T~' = T~^2 (1 + u - lambda G T')
  // Substituting one into the other and using the fixed point leaves a
  // min(n, p) system whose right-hand side is T^2 (or T~^2). Writing it this
  // way avoids the O(1/lambda) cancellation of the textbook form.
  const Eigen::MatrixXd gn = profile.gamma_sq() / static_cast<double>(n);
  const Eigen::ArrayXd t2 = solution.T.array().square();
  const Eigen::ArrayXd tt2 = solution.T_tilde.array().square();
  const Eigen::ArrayXd u = (gn * solution.T).array();
  const Eigen::ArrayXd v = (gn.transpose() * solution.T_tilde).array();
  const double l2 = lambda * lambda;

  DysonDerivative d;
  if (n <= p) {
    // (I - l^2 D_T~^2 G D_T^2 G^T) T~' = T~^2
    const Eigen::MatrixXd right = t2.matrix().asDiagonal() * gn.transpose();
    Eigen::MatrixXd a = -l2 * (tt2.matrix().asDiagonal() * (gn * right));
    a.diagonal().array() += 1.0;
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    if (!(lu.rcond() >= 1e-12)) return finite_difference_derivative(profile, lambda);
    d.T_tilde_prime = lu.solve(tt2.matrix());
    d.T_prime =
        (t2 * (1.0 + v - lambda * (gn.transpose() * d.T_tilde_prime).array())).matrix();
  } else {
    // (I - l^2 D_T^2 G^T D_T~^2 G) T' = T^2
    const Eigen::MatrixXd right = tt2.matrix().asDiagonal() * gn;
    Eigen::MatrixXd a = -l2 * (t2.matrix().asDiagonal() * (gn.transpose() * right));
    a.diagonal().array() += 1.0;
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    if (!(lu.rcond() >= 1e-12)) return finite_difference_derivative(profile, lambda);
    d.T_prime = lu.solve(t2.matrix());
    d.T_tilde_prime = (tt2 * (1.0 + u - lambda * (gn * d.T_prime).array())).matrix();
  }
  return d;
}

DysonDerivative finite_difference_derivative(const VarianceProfile& profile, double lambda,
                                             double rel_step) {
  require_lambda(lambda);
  const double h = rel_step * lambda;
  const DysonSolution centre = solve_dyson(profile, lambda);
  DysonOptions opts;
  opts.warm_start = &centre;
  // z + h corresponds to lambda - h.
  const DysonSolution up = solve_dyson(profile, lambda - h, opts);
  const DysonSolution down = solve_dyson(profile, lambda + h, opts);
  DysonDerivative d;
  d.T_prime = (up.T - down.T) / (2.0 * h);
  d.T_tilde_prime = (up.T_tilde - down.T_tilde) / (2.0 * h);
  d.finite_difference = true;
  return d;
}

double mp_stieltjes(double c, double lambda) {
  require_lambda(lambda);
  if (!(c > 0.0)) throw InvalidArgument("c must be positive");
  return positive_root(lambda * c, c - 1.0 - lambda);
}

double mp_stieltjes_companion(double c, double lambda) {
  require_lambda(lambda);
  if (!(c > 0.0)) throw InvalidArgument("c must be positive");
  return positive_root(lambda, 1.0 - c - lambda);
}

double mp_stieltjes_prime(double c, double lambda) {
  const double m = mp_stieltjes(c, lambda);
  return m * m * (c * m + 1.0) / (lambda * c * m * m + 1.0);
}

double mp_stieltjes_companion_prime(double c, double lambda) {
  const double m = mp_stieltjes_companion(c, lambda);
  return m * m * (1.0 + m) / (lambda * m * m + 1.0);
}

KappaValue kappa(const VarianceProfile& profile, double lambda, const DysonSolution& solution) {
  require_lambda(lambda);
  if (solution.T_tilde.size() != profile.n()) {
    throw InvalidArgument("kappa: solution does not match the profile");
  }
  const Eigen::MatrixXd& g = profile.gamma_sq();
  const Eigen::ArrayXd col = g.colwise().sum().transpose().array();
  for (Index j = 0; j < col.size(); ++j) {
    if (!(col(j) > 0.0)) {
      throw InvalidArgument("kappa undefined: column " + std::to_string(j) + " is all zero");
    }
  }
  KappaValue k;
  k.kappa = (col / (g.transpose() * solution.T_tilde).array()).matrix();
  return k;
}

Eigen::VectorXd kappa_prime(const VarianceProfile& profile, double lambda,
                            const DysonSolution& solution, const DysonDerivative& derivative) {
  const Eigen::VectorXd k = kappa(profile, lambda, solution).kappa;
  const Eigen::MatrixXd& g = profile.gamma_sq();
  const Eigen::ArrayXd col = g.colwise().sum().transpose().array();
  const Eigen::ArrayXd weighted = (g.transpose() * derivative.T_tilde_prime).array();
  // kappa^2 / col = col / Tr[D~ T~]^2
  return (k.array().square() * weighted / col).matrix();
}

std::vector<double> default_ridgeless_sequence() {
  std::vector<double> seq;
  double l = 1e-2;
  for (int k = 0; k <= 8; ++k, l /= 4.0) seq.push_back(l);
  return seq;
}

namespace {

// Two rounds of Richardson extrapolation in lambda for a geometric sequence
// with ratio q, using the last three values. The error estimate is the
// relative change against the same extrapolation one step earlier.
std::pair<Eigen::VectorXd, double> richardson(const std::vector<Eigen::VectorXd>& f, double q) {
  auto extrapolate = [q](const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                         const Eigen::VectorXd& c) {
    const Eigen::VectorXd r1a = (q * b - a) / (q - 1.0);
    const Eigen::VectorXd r1b = (q * c - b) / (q - 1.0);
    return Eigen::VectorXd((q * q * r1b - r1a) / (q * q - 1.0));
  };
  const std::size_t m = f.size();
  const Eigen::VectorXd last = extrapolate(f[m - 3], f[m - 2], f[m - 1]);
  const Eigen::VectorXd before = extrapolate(f[m - 4], f[m - 3], f[m - 2]);
  const double err = ((last - before).array().abs() / last.array().abs()).maxCoeff();
  return {last, err};
}

}  // namespace

RidgelessLimits ridgeless_limits(const VarianceProfile& profile, RidgelessMode mode,
                                 const std::vector<double>& lambda_sequence,
                                 const ValidationOptions& validation, double max_error,
                                 int max_extra_steps) {
  require_ridgeless_valid(profile, test_profile_columns(profile), validation);
  if (mode == RidgelessMode::Under && !(profile.p() < profile.n())) {
    throw AssumptionViolation("under-parameterised limit needs p < n");
  }
  if (mode == RidgelessMode::Over && !(profile.p() > profile.n())) {
    throw AssumptionViolation("over-parameterised limit needs p > n");
  }
  if (lambda_sequence.size() < 4) throw InvalidArgument("need at least four lambdas");
  const double q = lambda_sequence[0] / lambda_sequence[1];
  for (std::size_t k = 1; k < lambda_sequence.size(); ++k) {
    require_lambda(lambda_sequence[k]);
    const double ratio = lambda_sequence[k - 1] / lambda_sequence[k];
    if (!(ratio > 1.0) || std::abs(ratio - q) > 1e-9 * q) {
      throw InvalidArgument("lambda sequence must decrease geometrically");
    }
  }

  RidgelessLimits out;
  out.mode = mode;
  out.lambdas = lambda_sequence;
  std::vector<Eigen::VectorXd> first;
  std::vector<Eigen::VectorXd> second;
  DysonSolution prev;
  const std::size_t limit = lambda_sequence.size() + static_cast<std::size_t>(max_extra_steps);
  for (std::size_t k = 0; k < limit; ++k) {
    if (k >= lambda_sequence.size()) {
      // Not yet in the asymptotic regime: keep shrinking lambda geometrically.
      if (out.error_estimate <= max_error) break;
      out.lambdas.push_back(out.lambdas.back() / q);
    }
    const double lambda = out.lambdas[k];
    DysonOptions opts;
    if (k > 0) opts.warm_start = &prev;
    DysonSolution s = solve_dyson(profile, lambda, opts);
    const DysonDerivative d = solve_dyson_derivative(profile, lambda, s);
    if (mode == RidgelessMode::Under) {
      first.push_back(s.T);
      second.push_back(d.T_prime);
    } else {
      first.push_back(kappa(profile, lambda, s).kappa);
      second.push_back(kappa_prime(profile, lambda, s, d));
    }
    prev = std::move(s);
    if (first.size() >= 4) {
      auto [f0, e0] = richardson(first, q);
      auto [f1, e1] = richardson(second, q);
      out.first = std::move(f0);
      out.second = std::move(f1);
      out.error_estimate = std::max(e0, e1);
    }
  }
  if (!(out.error_estimate <= max_error)) {
    throw ConvergenceError("ridgeless extrapolation did not settle (relative change " +
                               fmt(out.error_estimate) + " at lambda=" + fmt(out.lambdas.back()) +
                               ")",
                           out.error_estimate, static_cast<long>(out.lambdas.size()));
  }
  return out;
}

}  // namespace vprisk
