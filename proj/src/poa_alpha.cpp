#include <cmath>
#include <vector>

#include "collab/analysis.hpp"
#include "collab/errors.hpp"

namespace collab {
namespace {

constexpr double kInvPhi = 0.6180339887498949;

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw InvalidInput("alpha out of range (0, 1]");
  }
}

double lower_expr(double z, double lambda, double mu, double alpha) {
  return z - 0.25 * (1.0 - alpha) * z * z - lambda * std::pow(z, alpha) + mu;
}

double upper_expr(double z, double lambda, double mu, double alpha,
                  TailForm tail) {
  const double shift = tail == TailForm::kContinuous ? 1.0 - alpha : 0.0;
  return alpha * z + shift - lambda * std::pow(z, alpha) + mu;
}

template <typename F>
double golden_min(F&& f, double a, double b, double tol) {
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

HValue h_alpha(double z, double lambda, double mu, double alpha,
               TailForm tail) {
  check_alpha(alpha);
  if (z < 0.0) throw InvalidInput("h_alpha: z must be >= 0");
  const double lo = lower_expr(z, lambda, mu, alpha);
  const double hi = upper_expr(z, lambda, mu, alpha, tail);
  HValue h;
  h.upper_branch = z > 2.0;
  h.value = h.upper_branch ? hi : lo;
  h.other_branch = h.upper_branch ? lo : hi;
  return h;
}

PoaAlpha poa_alpha_analytic(double alpha) {
  check_alpha(alpha);
  PoaAlpha p;
  p.lambda = std::pow(2.0, 1.0 - alpha);
  p.mu = 1.0 - alpha;
  p.poa = (2.0 - alpha) / p.lambda;
  p.guarantee = 1.0 / p.poa;
  return p;
}

GuaranteeMinimum min_guarantee() {
  auto g = [](double a) { return std::pow(2.0, 1.0 - a) / (2.0 - a); };
  GuaranteeMinimum m;
  m.alpha = golden_min(g, 1e-9, 1.0, 1e-12);
  m.guarantee = g(m.alpha);
  return m;
}

PoaNumeric poa_alpha_numeric(double alpha, const PoaSearchConfig& config) {
  check_alpha(alpha);
  if (config.z_points < 2 || !(config.z_max > 0.0)) {
    throw InvalidInput("poa search: z-grid needs at least two points");
  }
  if (!(config.lambda_lo > 0.0 && config.lambda_lo < config.lambda_hi)) {
    throw InvalidInput("poa search: bad lambda range");
  }
  std::vector<double> z(static_cast<std::size_t>(config.z_points));
  std::vector<double> za(z.size());
  std::vector<double> base(z.size());
  for (std::size_t k = 0; k < z.size(); ++k) {
    z[k] = config.z_max * static_cast<double>(k) / (config.z_points - 1);
    za[k] = std::pow(z[k], alpha);
    base[k] = h_alpha(z[k], 0.0, 0.0, alpha, config.tail).value;
  }
  auto min_mu = [&](double lambda) {
    double mu = 0.0;
    for (std::size_t k = 0; k < z.size(); ++k) {
      mu = std::max(mu, lambda * za[k] - base[k]);
    }
    return mu;
  };
  auto objective = [&](double lambda) { return (1.0 + min_mu(lambda)) / lambda; };
  PoaNumeric out;
  out.lambda = golden_min(objective, config.lambda_lo, config.lambda_hi, config.tol);
  out.mu = min_mu(out.lambda);
  out.poa = (1.0 + out.mu) / out.lambda;
  return out;
}

double elasticity_numeric(const std::function<double(double)>& f, double x) {
  if (!(x > 0.0)) throw InvalidInput("elasticity needs x > 0");
  const double fx = f(x);
  if (fx == 0.0) throw InvalidInput("elasticity undefined where f(x) = 0");
  const double h = 1e-6 * x;
  const double df = (f(x + h) - f(x - h)) / (2.0 * h);
  return std::abs(df * x / fx);
}

}  // namespace collab
