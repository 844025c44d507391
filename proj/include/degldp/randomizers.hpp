#pragma once

#include <cstdint>
#include <span>

#include "degldp/graph.hpp"
#include "degldp/random.hpp"

namespace degldp {

// Per-run privacy configuration. eps > 0 and delta in (0, 1) for private
// runs; c in (0, 1) splits the hybrid budget into c*eps for the bit vector
// and (1-c)*eps for the scalar degree report.
struct PrivacyParams {
  double eps = 1.0;
  double delta = 1e-6;
  double c = 0.9;
};

// Throws std::invalid_argument on any out-of-domain field.
void validate(const PrivacyParams& p);

// Flip probability of symmetric randomized response: rho = 1/(1 + e^eps).
// eps = 0 gives 1/2 (pure noise); rho decreases toward 0 as eps grows.
double rho_from_eps(double eps);

struct BudgetSplit {
  double eps_bits;
  double eps_scalar;
};
BudgetSplit split_budget(double eps, double c);

// rr_bit_from_unit(b, rho, u) = b xor (u < rho). Pure transform used for
// exact enumeration in tests; rr_bit draws u from the source.
std::uint8_t rr_bit_from_unit(std::uint8_t bit, double rho, double u);
std::uint8_t rr_bit(std::uint8_t bit, double rho, RandomSource& rng);

// Randomizes every position of `row` except those listed in `skip` (sorted
// ascending), which are emitted as 0 and consume no randomness. Positions
// are processed in ascending index order, one draw each.
BitRow rr_row(const BitRow& row, std::span<const Index> skip, double rho,
              RandomSource& rng);

// Inverse-CDF Laplace transform with density (1/2b) e^{-|x|/b}:
// x = -b * sgn(u - 1/2) * ln(1 - 2|u - 1/2|), u in (0, 1).
double laplace_from_unit(double scale, double u);
double laplace_sample(double scale, RandomSource& rng);

}  // namespace degldp
