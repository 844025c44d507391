#include "degldp/randomizers.hpp"

#include <cmath>
#include <stdexcept>

namespace degldp {

void validate(const PrivacyParams& p) {
  if (!(p.eps > 0.0) || !std::isfinite(p.eps))
    throw std::invalid_argument("privacy: eps must be positive and finite");
  if (!(p.delta > 0.0 && p.delta < 1.0))
    throw std::invalid_argument("privacy: delta must lie in (0, 1)");
  if (!(p.c > 0.0 && p.c < 1.0))
    throw std::invalid_argument("privacy: c must lie in (0, 1)");
}

double rho_from_eps(double eps) {
  if (!(eps >= 0.0) || !std::isfinite(eps))
    throw std::invalid_argument("rho_from_eps: eps must be >= 0 and finite");
  return 1.0 / (1.0 + std::exp(eps));
}

BudgetSplit split_budget(double eps, double c) {
  if (!(eps > 0.0) || !std::isfinite(eps))
    throw std::invalid_argument("split_budget: eps must be positive");
  if (!(c > 0.0 && c < 1.0))
    throw std::invalid_argument("split_budget: c must lie in (0, 1)");
  return {c * eps, (1.0 - c) * eps};
}

namespace {
// The bit primitive is defined for any flip probability; only the
// aggregators need rho < 1/2 (they guard their own denominator).
void check_rho(double rho) {
  if (!(rho >= 0.0 && rho <= 1.0))
    throw std::invalid_argument("randomized response: rho outside [0, 1]");
}
}  // namespace

std::uint8_t rr_bit_from_unit(std::uint8_t bit, double rho, double u) {
  check_rho(rho);
  return static_cast<std::uint8_t>((bit != 0) ^ (u < rho));
}

std::uint8_t rr_bit(std::uint8_t bit, double rho, RandomSource& rng) {
  check_rho(rho);
  return static_cast<std::uint8_t>((bit != 0) ^ rng.next_bernoulli(rho));
}

BitRow rr_row(const BitRow& row, std::span<const Index> skip, double rho,
              RandomSource& rng) {
  check_rho(rho);
  BitRow out = BitRow::Zero(row.size());
  std::size_t s = 0;
  for (Index j = 0; j < row.size(); ++j) {
    if (s < skip.size() && skip[s] == j) {
      ++s;
      continue;
    }
    out(j) = rr_bit(row(j), rho, rng);
  }
  return out;
}

double laplace_from_unit(double scale, double u) {
  if (!(scale > 0.0))
    throw std::invalid_argument("laplace: scale must be positive");
  if (!(u > 0.0 && u < 1.0))
    throw std::invalid_argument("laplace: u outside (0, 1)");
  const double v = u - 0.5;
  const double s = (v > 0.0) ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
  return -scale * s * std::log1p(-2.0 * std::fabs(v));
}

double laplace_sample(double scale, RandomSource& rng) {
  return laplace_from_unit(scale, rng.next_unit_open());
}

}  // namespace degldp
