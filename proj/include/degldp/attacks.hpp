#pragma once

#include <vector>

#include "degldp/graph.hpp"
#include "degldp/protocols.hpp"
#include "degldp/random.hpp"

namespace degldp {

enum class AttackKind { none, inflation, deflation };

// A poisoning strategy instance. `malicious` is the sorted coalition M.
// Inflation drives the (malicious) target's estimate up with the help of
// the rest of the coalition; deflation drives an honest target's estimate
// down. `b` dials how many honest users an inflating target claims beyond
// the coalition: the forged row/list covers all of M plus a floor(b*rho)
// fraction of the target's honest non-neighbors (and, in response mode, a
// floor(b*(1-rho)) fraction of its honest neighbors).
struct AttackSpec {
  AttackKind kind = AttackKind::none;
  PoisonMode mode = PoisonMode::response;
  std::vector<Index> malicious;
  Index target = -1;
  double b = 1.0;
};

void validate(const AttackSpec& spec, Index n);

// Output of an attack op. Honest rows (and honest scalar reports) are
// always bit-identical to an honest run under the same substreams: user i's
// response is drawn from trial_rng.fork("user").fork(i) regardless of what
// the coalition does, and coalition-internal sampling uses
// trial_rng.fork("attacker").
struct PoisonedBundle {
  ResponseBundle bundle;
  // Effective randomizer inputs, row per user (honest rows equal adjacency
  // rows). Populated only when every row factors through the randomizer,
  // i.e. for input-mode attacks and for kind none; empty otherwise.
  BitMatrix inputs;
  // Pair-sampled protocol only: the reporter assignment in effect, after
  // any attack override. Empty (n = 0) for the matrix protocols.
  ReporterAssignment assignment;
  // An inflation sample was truncated to its population size.
  bool sample_capped = false;
};

// Pair-sampled protocol. Inflation reassigns every pair {target, j} to the
// target, which then reports all ones (response mode) or randomizes an
// all-ones list (input mode). Deflation reassigns each {j, target}, j in M,
// to j, which reports 0 for the target (response) or randomizes a list with
// the target bit cleared (input).
PoisonedBundle poisoned_responses_naive(const AttackSpec& spec, const Graph& g,
                                        double rho, RandomSource& trial_rng);

// Full-matrix protocol. Deflation: each malicious row is the honest row
// with the target position forced to 0 (response) or the randomization of
// the adjacency list with the target bit cleared (input). Inflation:
// accomplices force their target position to 1 (response) or randomize a
// list with the target bit set (input); the target itself reports ones
// exactly on the sampled sets plus the coalition (response) or randomizes
// the corresponding forged list (input).
PoisonedBundle poisoned_responses_check(const AttackSpec& spec, const Graph& g,
                                        double rho, RandomSource& trial_rng);

// Matrix protocol with scalar reports. Bits behave as in the check attack
// (at the bit-budget rho). Scalars: honest users and deflating users report
// their true degree plus Laplace noise; inflating accomplices likewise; the
// inflating target forges popcount(forged list) + b*tau, plus Laplace noise
// in input mode and exactly in response mode.
PoisonedBundle poisoned_responses_hybrid(const AttackSpec& spec,
                                         const Graph& g, double rho,
                                         double lap_scale, double tau,
                                         RandomSource& trial_rng,
                                         bool zero_noise = false);

// Scalar-only protocol. Inflation: the target reports n-1 (plus noise in
// input mode). Deflation: each malicious user reports its own degree with
// the target edge dropped (plus noise in input mode). Honest scalars are
// untouched.
PoisonedBundle poisoned_responses_laplace(const AttackSpec& spec,
                                          const Graph& g, double lap_scale,
                                          RandomSource& trial_rng,
                                          bool zero_noise = false);

// Attacks on the non-private audit protocol, where reports are the true
// lists except for targeted lies.
enum class NonprivateAttack {
  // Every malicious user denies its edge to an honest target. The target
  // passes the audit and loses exactly its malicious-neighbor count.
  deflate_honest_target,
  // A malicious target denies its edges to all accomplices and to m of its
  // honest neighbors; accomplices deny the edge back. The target shows
  // exactly m inconsistencies (so it passes) and loses 2m-1.
  deflate_self,
};

// Requires, for deflate_self: target adjacent to every accomplice and to at
// least m honest users (throws std::runtime_error otherwise). The honest
// neighbors to deny are sampled from trial_rng.fork("attacker").
PoisonedBundle nonprivate_attack(NonprivateAttack kind, const Graph& g,
                                 const AttackSpec& spec,
                                 RandomSource& trial_rng);

}  // namespace degldp
