#pragma once

#include <Eigen/Dense>

#include <string>

#include "degldp/graph.hpp"
#include "degldp/random.hpp"
#include "degldp/randomizers.hpp"

namespace degldp {

enum class Protocol { naive, check, hybrid, nonprivate, laplace };

const char* to_string(Protocol p);
Protocol protocol_from_string(const std::string& s);

// Which side of a protocol an adversary poisons: the input list fed to the
// randomizer, or the response sent to the aggregator.
enum class PoisonMode { input, response };

const char* to_string(PoisonMode m);

// Which user reports each unordered pair {i, j}: reports(i, j) == 1 means
// user i sends that pair's bit. Exactly one of reports(i, j), reports(j, i)
// is set for every i != j; the diagonal is zero.
struct ReporterAssignment {
  BitMatrix reports;

  Index n() const { return reports.rows(); }
  bool covers(Index i, Index j) const { return reports(i, j) != 0; }
};

// Lower index reports: Out_i = { j : j > i }.
ReporterAssignment default_assignment(Index n);

// One row per user. For the pair-sampled protocol only positions inside the
// user's reporting set are meaningful (others stay 0); for the matrix
// protocols row i carries bits for every j != i. lap_degree is per-user
// noisy scalar degrees, sized n only when the protocol uses them.
struct ResponseBundle {
  BitMatrix bits;
  Eigen::VectorXd lap_degree;

  Index n() const { return bits.rows(); }
};

// Aggregator-side tallies, exposed for audits. For user i:
//   r11 = #{ j != i : q_ij = 1 and q_ji = 1 }
//   r01 = #{ j != i : q_ij = 0 and q_ji = 1 }
//   r10 = #{ j != i : q_ij = 1 and q_ji = 0 }
// rr_estimate is the de-biased matrix estimate where the protocol has one.
struct CheckStats {
  Eigen::VectorXi r11, r01, r10;
  Eigen::VectorXd rr_estimate;
};

// Per-user degree estimates; value(i) is meaningful iff !rejected(i).
struct DegreeEstimates {
  Eigen::VectorXd value;
  Eigen::Array<bool, Eigen::Dynamic, 1> rejected;

  Index n() const { return value.size(); }
};

// ---- Per-user honest responders ------------------------------------------
//
// Each takes the substream dedicated to user i and consumes a fixed number
// of draws (one per randomized bit, plus one for a Laplace scalar where
// applicable) so that replaying a substream reproduces the response bit for
// bit. zero_noise keeps the draw count but emits noiseless values; it exists
// for exact-value tests and is never enabled by CLI defaults.

// One bit per pair in Out_i = { j : assignment.covers(i, j) }, ascending j.
BitRow naive_respond(const Graph& g, Index i, const ReporterAssignment& a,
                     double rho, RandomSource& rng);

// Full-row randomized response over [n] \ {i}.
BitRow matrix_respond(const Graph& g, Index i, double rho, RandomSource& rng);

struct HybridResponse {
  BitRow bits;
  double lap_degree;
};

// Full row at the bit budget plus a Laplace-noised degree at the scalar
// budget, in that draw order.
HybridResponse hybrid_respond(const Graph& g, Index i, double rho,
                              double lap_scale, RandomSource& rng,
                              bool zero_noise = false);

// Plain noisy degree report (no bits).
double laplace_respond(const Graph& g, Index i, double lap_scale,
                       RandomSource& rng, bool zero_noise = false);

// ---- Aggregators -----------------------------------------------------------

// d_hat_i = (r1_i - rho*n) / (1 - 2rho) where r1_i counts the 1-bits
// reported for pairs incident to i. Never rejects. rho = 1/2 is a
// degenerate denominator and is refused.
DegreeEstimates naive_aggregate(const ResponseBundle& bundle,
                                const ReporterAssignment& a, double rho);

// Acceptance threshold for the r01 consistency statistic, per protocol and
// poisoning side. m is the assumed malicious-user budget.
double tau_threshold(PoisonMode mode, Protocol proto, Index n, int m,
                     double rho, double delta);

// Validity regime of the consistency analysis: (4/3) e^eps ln(2/delta) < n.
bool precondition_ok(Index n, double eps, double delta);

// Keeps user i iff |r01_i - rho(1-rho)(n-1)| <= tau, then de-biases
// d_hat_i = (r11_i - rho^2 (n-1)) / (1 - 2rho). Rejected users carry
// rejected(i) = true.
DegreeEstimates check_aggregate(const ResponseBundle& bundle, double rho,
                                double tau, CheckStats* stats = nullptr);

// Allowed gap between the matrix estimate and the scalar report in the
// second hybrid check: m + 2tau/(1-2rho) + (2/eps_scalar) ln(2/delta).
double hybrid_second_slack(int m, double tau, double rho, double eps_scalar,
                           double delta);

// First check as in check_aggregate; survivors must also satisfy
// |rr_estimate_i - lap_degree_i| <= slack. Survivors' estimate is the
// scalar report lap_degree_i.
DegreeEstimates hybrid_aggregate(const ResponseBundle& bundle, double rho,
                                 double tau, double slack,
                                 CheckStats* stats = nullptr);

// Non-private audit: keeps user i iff r01_i + r10_i <= m, estimate r11_i.
DegreeEstimates nonprivate_aggregate(const ResponseBundle& bundle, int m,
                                     CheckStats* stats = nullptr);

// Estimates are the scalar reports; never rejects.
DegreeEstimates laplace_aggregate(const ResponseBundle& bundle);

}  // namespace degldp
