#include "degldp/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace degldp {
namespace {

void check_common(Index n, int m) {
  if (n < 2) throw std::invalid_argument("bounds: need n >= 2");
  if (m < 0) throw std::invalid_argument("bounds: m < 0");
}

void check_private(double eps, double delta) {
  if (!(eps > 0.0) || !std::isfinite(eps))
    throw std::invalid_argument("bounds: eps must be positive (degenerate coefficients at 0)");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("bounds: delta outside (0, 1)");
}

// (e^eps + 1) / (e^eps - 1)
double coef_a(double eps) {
  const double x = std::exp(eps);
  return (x + 1.0) / (x - 1.0);
}

// sqrt(e^eps + 1) / (e^eps - 1)
double coef_b(double eps) {
  const double x = std::exp(eps);
  return std::sqrt(x + 1.0) / (x - 1.0);
}

}  // namespace

double naive_soundness_delta(Index n, double rho) {
  if (n < 2) throw std::invalid_argument("naive_soundness_delta: n < 2");
  if (!(rho >= 0.0 && rho <= 0.5))
    throw std::invalid_argument("naive_soundness_delta: rho outside [0, 1/2]");
  if (rho == 0.0) return 0.0;  // report equals truth with certainty
  const double N = static_cast<double>(n - 1);
  const auto k0 = static_cast<long>(std::ceil(N * (1.0 - rho)));
  const double lr = std::log(rho);
  const double l1r = std::log1p(-rho);
  const double lgn = std::lgamma(N + 1.0);
  double tail = 0.0;
  for (long k = k0; k <= static_cast<long>(N); ++k) {
    const double kd = static_cast<double>(k);
    const double lt = lgn - std::lgamma(kd + 1.0) - std::lgamma(N - kd + 1.0) +
                      (N - kd) * lr + kd * l1r;
    tail += std::exp(lt);
  }
  return std::clamp(1.0 - tail, 0.0, 1.0);
}

BoundReport bound_naive(PoisonMode mode, Index n, int m, double eps,
                        double delta) {
  check_common(n, m);
  check_private(eps, delta);
  const double nd = static_cast<double>(n);
  const double md = static_cast<double>(m);
  const double x = std::exp(eps);
  const double spread = coef_a(eps) * std::sqrt(nd * std::log(1.0 / delta));

  BoundReport r;
  r.protocol = Protocol::naive;
  r.mode = mode;
  r.delta1 = delta;
  r.alpha2 = nd - 1.0;
  if (mode == PoisonMode::input) {
    r.alpha1 = md + spread;
    r.delta2 = naive_soundness_delta(n, rho_from_eps(eps));
  } else {
    r.alpha1 = (x / (x - 1.0)) * md + spread;
    r.delta2 = 0.0;
    r.tight2 = true;
  }
  return r;
}

BoundReport bound_check(PoisonMode mode, Index n, int m, double eps,
                        double delta) {
  check_common(n, m);
  check_private(eps, delta);
  const double nd = static_cast<double>(n);
  const double md = static_cast<double>(m);
  const double x = std::exp(eps);

  BoundReport r;
  r.protocol = Protocol::check;
  r.mode = mode;
  r.delta1 = r.delta2 = delta;
  if (mode == PoisonMode::input) {
    const double L = std::log(4.0 / delta);
    r.alpha1 = 3.0 * md + coef_a(eps) * std::sqrt(4.0 * md * L) +
               coef_b(eps) * std::sqrt(12.0 * nd * L);
  } else {
    r.alpha1 = ((3.0 * x + 1.0) / (x - 1.0)) * md +
               coef_b(eps) * std::sqrt(12.0 * nd * std::log(2.0 / delta));
  }
  r.alpha2 = r.alpha1;
  r.tau = tau_threshold(mode, Protocol::check, n, m, rho_from_eps(eps), delta);
  r.inapplicable = !precondition_ok(n, eps, delta);
  return r;
}

BoundReport bound_laplace(PoisonMode mode, Index n, int m, double eps,
                          double delta) {
  check_common(n, m);
  check_private(eps, delta);
  BoundReport r;
  r.protocol = Protocol::laplace;
  r.mode = mode;
  r.alpha1 = std::log(1.0 / delta) / eps;
  r.delta1 = delta;
  r.alpha2 = static_cast<double>(n) - 1.0;
  if (mode == PoisonMode::input) {
    r.delta2 = 0.5;
  } else {
    r.delta2 = 0.0;
    r.tight2 = true;
  }
  return r;
}

BoundReport bound_hybrid(PoisonMode mode, Index n, int m,
                         const PrivacyParams& params) {
  check_common(n, m);
  validate(params);
  const double eps = params.eps;
  const double delta = params.delta;
  const double nd = static_cast<double>(n);
  const double md = static_cast<double>(m);
  const double x = std::exp(eps);
  const double lap_term = 2.0 * std::log(2.0 / delta) / eps;

  BoundReport r;
  r.protocol = Protocol::hybrid;
  r.mode = mode;
  r.alpha1 = lap_term;
  r.delta1 = r.delta2 = delta;
  if (mode == PoisonMode::input) {
    const double L = std::log(8.0 / delta);
    r.alpha2 = 6.0 * md + 2.0 * coef_a(eps) * std::sqrt(4.0 * md * L) +
               coef_b(eps) * std::sqrt(48.0 * nd * L) + lap_term;
  } else {
    r.alpha2 = ((6.0 * x + 2.0) / (x - 1.0)) * md +
               coef_b(eps) * std::sqrt(48.0 * nd * std::log(4.0 / delta)) +
               lap_term;
  }
  r.tau = tau_threshold(mode, Protocol::hybrid, n, m,
                        rho_from_eps(params.c * eps), delta);
  r.inapplicable = !precondition_ok(n, eps, delta);
  return r;
}

BoundReport bound_nonprivate(Index n, int m) {
  check_common(n, m);
  BoundReport r;
  r.protocol = Protocol::nonprivate;
  r.alpha1 = static_cast<double>(m);
  r.alpha2 = std::max(0.0, std::min(2.0 * static_cast<double>(m) - 1.0,
                                    static_cast<double>(n) - 1.0));
  r.tight1 = r.tight2 = true;
  return r;
}

BoundReport compute_bound(Protocol proto, PoisonMode mode, Index n, int m,
                          const PrivacyParams& params) {
  switch (proto) {
    case Protocol::naive:
      return bound_naive(mode, n, m, params.eps, params.delta);
    case Protocol::check:
      return bound_check(mode, n, m, params.eps, params.delta);
    case Protocol::hybrid:
      return bound_hybrid(mode, n, m, params);
    case Protocol::laplace:
      return bound_laplace(mode, n, m, params.eps, params.delta);
    case Protocol::nonprivate:
      return bound_nonprivate(n, m);
  }
  throw std::invalid_argument("compute_bound: unknown protocol");
}

}  // namespace degldp
