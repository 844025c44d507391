#pragma once

#include <limits>

#include "degldp/protocols.hpp"
#include "degldp/randomizers.hpp"

namespace degldp {

// Closed-form error guarantees for one protocol under one poisoning side.
//
// Correctness: with probability >= 1 - delta1, every honest user is kept
// and estimated within alpha1 of their true degree. Soundness: with
// probability >= 1 - delta2, no malicious user is kept with an estimate
// farther than alpha2 from their true degree. A tight flag means the
// corresponding alpha is achieved exactly by a known strategy (reported
// with delta = 0), rather than merely bounded.
struct BoundReport {
  Protocol protocol = Protocol::check;
  PoisonMode mode = PoisonMode::response;
  double alpha1 = 0.0;
  double delta1 = 0.0;
  double alpha2 = 0.0;
  double delta2 = 0.0;
  bool tight1 = false;
  bool tight2 = false;
  // Consistency threshold baked into the guarantee (check/hybrid only).
  double tau = std::numeric_limits<double>::quiet_NaN();
  // True when the validity precondition (4/3) e^eps ln(2/delta) < n fails;
  // the formulas are still evaluated.
  bool inapplicable = false;
};

BoundReport bound_naive(PoisonMode mode, Index n, int m, double eps,
                        double delta);
BoundReport bound_check(PoisonMode mode, Index n, int m, double eps,
                        double delta);
BoundReport bound_laplace(PoisonMode mode, Index n, int m, double eps,
                          double delta);
BoundReport bound_hybrid(PoisonMode mode, Index n, int m,
                         const PrivacyParams& params);
BoundReport bound_nonprivate(Index n, int m);

// Dispatch on protocol; params.eps/delta/c feed the protocol-specific form.
BoundReport compute_bound(Protocol proto, PoisonMode mode, Index n, int m,
                          const PrivacyParams& params);

// Failure probability of the pair-sampled protocol's worst-case soundness
// skew: 1 - P[Binom(n-1, 1-rho) >= ceil((n-1)(1-rho))]. Evaluated exactly
// with log-space terms; n up to around 10^6 stays fast and stable.
double naive_soundness_delta(Index n, double rho);

}  // namespace degldp
