#include "degldp/protocols.hpp"

#include <cmath>
#include <stdexcept>

namespace degldp {

const char* to_string(Protocol p) {
  switch (p) {
    case Protocol::naive: return "naive";
    case Protocol::check: return "check";
    case Protocol::hybrid: return "hybrid";
    case Protocol::nonprivate: return "nonprivate";
    case Protocol::laplace: return "laplace";
  }
  return "?";
}

Protocol protocol_from_string(const std::string& s) {
  if (s == "naive") return Protocol::naive;
  if (s == "check") return Protocol::check;
  if (s == "hybrid") return Protocol::hybrid;
  if (s == "nonprivate") return Protocol::nonprivate;
  if (s == "laplace") return Protocol::laplace;
  throw std::invalid_argument("unknown protocol: " + s);
}

const char* to_string(PoisonMode m) {
  return m == PoisonMode::input ? "input" : "response";
}

ReporterAssignment default_assignment(Index n) {
  if (n < 2)
    throw std::invalid_argument("default_assignment: need at least 2 users");
  ReporterAssignment a;
  a.reports = BitMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) a.reports(i, j) = 1;
  return a;
}

BitRow naive_respond(const Graph& g, Index i, const ReporterAssignment& a,
                     double rho, RandomSource& rng) {
  const Index n = g.n();
  BitRow out = BitRow::Zero(n);
  for (Index j = 0; j < n; ++j)
    if (j != i && a.covers(i, j)) out(j) = rr_bit(g.adj(i, j), rho, rng);
  return out;
}

BitRow matrix_respond(const Graph& g, Index i, double rho,
                      RandomSource& rng) {
  const Index skip[] = {i};
  return rr_row(g.adj.row(i), skip, rho, rng);
}

namespace {

// Draws exactly one scalar either way, so zero-noise runs advance the
// stream like noisy ones.
double scalar_noise(double lap_scale, RandomSource& rng, bool zero_noise) {
  if (zero_noise) {
    rng.next_unit_open();
    return 0.0;
  }
  return laplace_sample(lap_scale, rng);
}

}  // namespace

HybridResponse hybrid_respond(const Graph& g, Index i, double rho,
                              double lap_scale, RandomSource& rng,
                              bool zero_noise) {
  HybridResponse r;
  r.bits = matrix_respond(g, i, rho, rng);
  r.lap_degree = static_cast<double>(g.degree(i)) +
                 scalar_noise(lap_scale, rng, zero_noise);
  return r;
}

double laplace_respond(const Graph& g, Index i, double lap_scale,
                       RandomSource& rng, bool zero_noise) {
  return static_cast<double>(g.degree(i)) +
         scalar_noise(lap_scale, rng, zero_noise);
}

namespace {

void check_denominator(double rho) {
  if (!(rho >= 0.0 && rho < 0.5))
    throw std::invalid_argument(
        "aggregate: 1 - 2rho is degenerate (needs rho in [0, 1/2))");
}

// Tallies r11/r01/r10 for every user from the full response matrix.
CheckStats tally(const ResponseBundle& bundle) {
  const auto q = bundle.bits.cast<int>().eval();
  CheckStats s;
  s.r11 = (q.array() * q.transpose().array()).rowwise().sum();
  s.r01 = q.colwise().sum().transpose() - s.r11;
  s.r10 = q.rowwise().sum() - s.r11;
  return s;
}

}  // namespace

DegreeEstimates naive_aggregate(const ResponseBundle& bundle,
                                const ReporterAssignment& a, double rho) {
  check_denominator(rho);
  if (bundle.n() != a.n())
    throw std::invalid_argument("naive_aggregate: size mismatch");
  const Index n = bundle.n();
  // r1_i collects the bits of every pair incident to i wherever they were
  // reported: row i holds Out_i, column i holds In_i. Positions outside the
  // assignment are zero by construction.
  const auto q = bundle.bits.cast<int>().eval();
  Eigen::VectorXi r1 = q.rowwise().sum() + q.colwise().sum().transpose();
  DegreeEstimates est;
  est.value = (r1.cast<double>().array() - rho * static_cast<double>(n)) /
              (1.0 - 2.0 * rho);
  est.rejected = Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(n, false);
  return est;
}

double tau_threshold(PoisonMode mode, Protocol proto, Index n, int m,
                     double rho, double delta) {
  if (proto != Protocol::check && proto != Protocol::hybrid)
    throw std::invalid_argument("tau_threshold: no threshold for protocol");
  if (n < 1 || m < 0 || !(delta > 0.0 && delta < 1.0) ||
      !(rho >= 0.0 && rho <= 0.5))
    throw std::invalid_argument("tau_threshold: parameter out of domain");
  const double nd = static_cast<double>(n);
  const double md = static_cast<double>(m);
  if (proto == Protocol::check) {
    if (mode == PoisonMode::input) {
      const double L = std::log(4.0 / delta);
      return md * (1.0 - 2.0 * rho) + std::sqrt(md * L) +
             std::sqrt(3.0 * nd * rho * L);
    }
    return md + std::sqrt(3.0 * nd * rho * std::log(2.0 / delta));
  }
  if (mode == PoisonMode::input) {
    const double L = std::log(8.0 / delta);
    return md * (1.0 - 2.0 * rho) + std::sqrt(md * L) +
           std::sqrt(3.0 * nd * rho * L);
  }
  return md + std::sqrt(3.0 * nd * rho * std::log(4.0 / delta));
}

bool precondition_ok(Index n, double eps, double delta) {
  if (!(eps >= 0.0) || !(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("precondition_ok: parameter out of domain");
  return (4.0 / 3.0) * std::exp(eps) * std::log(2.0 / delta) <
         static_cast<double>(n);
}

DegreeEstimates check_aggregate(const ResponseBundle& bundle, double rho,
                                double tau, CheckStats* stats) {
  check_denominator(rho);
  if (tau < 0.0) throw std::invalid_argument("check_aggregate: tau < 0");
  const Index n = bundle.n();
  CheckStats s = tally(bundle);
  const double center = rho * (1.0 - rho) * static_cast<double>(n - 1);
  s.rr_estimate =
      (s.r11.cast<double>().array() - rho * rho * static_cast<double>(n - 1)) /
      (1.0 - 2.0 * rho);
  DegreeEstimates est;
  est.value = s.rr_estimate;
  est.rejected = (s.r01.cast<double>().array() - center).abs() > tau;
  if (stats) *stats = std::move(s);
  return est;
}

double hybrid_second_slack(int m, double tau, double rho, double eps_scalar,
                           double delta) {
  check_denominator(rho);
  if (m < 0 || tau < 0.0 || !(eps_scalar > 0.0) ||
      !(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("hybrid_second_slack: parameter out of domain");
  return static_cast<double>(m) + 2.0 * tau / (1.0 - 2.0 * rho) +
         (2.0 / eps_scalar) * std::log(2.0 / delta);
}

DegreeEstimates hybrid_aggregate(const ResponseBundle& bundle, double rho,
                                 double tau, double slack, CheckStats* stats) {
  if (bundle.lap_degree.size() != bundle.n())
    throw std::invalid_argument("hybrid_aggregate: missing scalar reports");
  CheckStats s;
  DegreeEstimates first = check_aggregate(bundle, rho, tau, &s);
  DegreeEstimates est;
  est.value = bundle.lap_degree;
  est.rejected =
      first.rejected ||
      ((s.rr_estimate - bundle.lap_degree).array().abs() > slack).eval();
  if (stats) *stats = std::move(s);
  return est;
}

DegreeEstimates nonprivate_aggregate(const ResponseBundle& bundle, int m,
                                     CheckStats* stats) {
  if (m < 0) throw std::invalid_argument("nonprivate_aggregate: m < 0");
  CheckStats s = tally(bundle);
  DegreeEstimates est;
  est.value = s.r11.cast<double>();
  est.rejected = (s.r01 + s.r10).array() > m;
  if (stats) *stats = std::move(s);
  return est;
}

DegreeEstimates laplace_aggregate(const ResponseBundle& bundle) {
  if (bundle.lap_degree.size() == 0)
    throw std::invalid_argument("laplace_aggregate: missing scalar reports");
  DegreeEstimates est;
  est.value = bundle.lap_degree;
  est.rejected = Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(
      bundle.lap_degree.size(), false);
  return est;
}

}  // namespace degldp
