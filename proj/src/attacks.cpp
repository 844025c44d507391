#include "degldp/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "degldp/randomizers.hpp"

namespace degldp {
namespace {

std::vector<char> malicious_mask(const AttackSpec& spec, Index n) {
  std::vector<char> mask(static_cast<std::size_t>(n), 0);
  for (Index j : spec.malicious) mask[static_cast<std::size_t>(j)] = 1;
  return mask;
}

RandomSource user_stream(RandomSource& trial_rng, Index i) {
  return trial_rng.fork("user").fork(static_cast<std::uint64_t>(i));
}

// Sample with the requested size clamped to the population; `capped`
// records clamping.
std::vector<Index> sample_capped(std::vector<Index> pool, std::size_t k,
                                 RandomSource& rng, bool* capped) {
  if (k > pool.size()) {
    k = pool.size();
    if (capped) *capped = true;
  }
  return sample_without_replacement(std::move(pool), k, rng);
}

std::size_t scaled_count(double b, double frac, std::size_t population) {
  const double want = b * frac * static_cast<double>(population);
  if (want <= 0.0) return 0;
  return static_cast<std::size_t>(std::floor(want));
}

// Honest partition around an inflating target: neighbors and non-neighbors.
void honest_split(const Graph& g, const std::vector<char>& mask, Index t,
                  std::vector<Index>* h1, std::vector<Index>* h0) {
  for (Index j = 0; j < g.n(); ++j) {
    if (j == t || mask[static_cast<std::size_t>(j)]) continue;
    (g.has_edge(t, j) ? h1 : h0)->push_back(j);
  }
}

}  // namespace

void validate(const AttackSpec& spec, Index n) {
  if (!(spec.b >= 0.0) || !std::isfinite(spec.b))
    throw std::invalid_argument("attack: b must be finite and >= 0");
  if (!std::is_sorted(spec.malicious.begin(), spec.malicious.end()) ||
      std::adjacent_find(spec.malicious.begin(), spec.malicious.end()) !=
          spec.malicious.end())
    throw std::invalid_argument("attack: malicious set not sorted/unique");
  for (Index j : spec.malicious)
    if (j < 0 || j >= n)
      throw std::invalid_argument("attack: malicious id out of range");
  if (spec.kind == AttackKind::none) return;
  if (spec.target < 0 || spec.target >= n)
    throw std::invalid_argument("attack: target out of range");
  const bool target_malicious =
      std::binary_search(spec.malicious.begin(), spec.malicious.end(),
                         spec.target);
  if (spec.kind == AttackKind::inflation && !target_malicious)
    throw std::invalid_argument("attack: inflation target must be malicious");
  if (spec.kind == AttackKind::deflation && target_malicious)
    throw std::invalid_argument("attack: deflation target must be honest");
}

PoisonedBundle poisoned_responses_naive(const AttackSpec& spec, const Graph& g,
                                        double rho, RandomSource& trial_rng) {
  const Index n = g.n();
  validate(spec, n);
  const auto mask = malicious_mask(spec, n);
  const Index t = spec.target;

  PoisonedBundle out;
  out.assignment = default_assignment(n);
  auto& reports = out.assignment.reports;
  if (spec.kind == AttackKind::inflation) {
    for (Index j = 0; j < n; ++j) {
      if (j == t) continue;
      reports(t, j) = 1;
      reports(j, t) = 0;
    }
  } else if (spec.kind == AttackKind::deflation) {
    for (Index j : spec.malicious) {
      reports(j, t) = 1;
      reports(t, j) = 0;
    }
  }

  const bool input_mode = spec.mode == PoisonMode::input;
  const bool track_inputs = input_mode || spec.kind == AttackKind::none;
  if (track_inputs) out.inputs = g.adj;

  out.bundle.bits = BitMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    RandomSource rng = user_stream(trial_rng, i);
    const bool is_mal = mask[static_cast<std::size_t>(i)] != 0;
    if (!is_mal || spec.kind == AttackKind::none) {
      out.bundle.bits.row(i) = naive_respond(g, i, out.assignment, rho, rng);
      continue;
    }
    if (spec.kind == AttackKind::deflation) {
      if (input_mode) {
        BitRow list = g.adj.row(i);
        list(t) = 0;
        out.inputs.row(i) = list;
        BitRow row = BitRow::Zero(n);
        for (Index j = 0; j < n; ++j)
          if (j != i && out.assignment.covers(i, j))
            row(j) = rr_bit(list(j), rho, rng);
        out.bundle.bits.row(i) = row;
      } else {
        BitRow row = naive_respond(g, i, out.assignment, rho, rng);
        row(t) = 0;  // the override placed {i, target} in Out_i
        out.bundle.bits.row(i) = row;
      }
      continue;
    }
    // Inflation: only the target deviates; accomplices cannot reach pairs
    // incident to the target once it claims them all.
    if (i != t) {
      out.bundle.bits.row(i) = naive_respond(g, i, out.assignment, rho, rng);
      continue;
    }
    if (input_mode) {
      BitRow list = BitRow::Ones(n);
      list(t) = 0;
      out.inputs.row(t) = list;
      BitRow row = BitRow::Zero(n);
      for (Index j = 0; j < n; ++j)
        if (j != t) row(j) = rr_bit(1, rho, rng);
      out.bundle.bits.row(t) = row;
    } else {
      BitRow row = BitRow::Ones(n);
      row(t) = 0;
      out.bundle.bits.row(t) = row;
    }
  }
  return out;
}

namespace {

// Target row of the response-mode inflation attack: ones exactly on the
// coalition and the sampled honest sets.
BitRow inflation_response_row(const AttackSpec& spec, const Graph& g,
                              double rho, RandomSource& attacker_rng,
                              bool* capped) {
  const Index n = g.n();
  const auto mask = malicious_mask(spec, n);
  std::vector<Index> h1, h0;
  honest_split(g, mask, spec.target, &h1, &h0);
  const auto f0 = sample_capped(h0, scaled_count(spec.b, rho, h0.size()),
                                attacker_rng, capped);
  const auto f1 = sample_capped(h1, scaled_count(spec.b, 1.0 - rho, h1.size()),
                                attacker_rng, capped);
  BitRow row = BitRow::Zero(n);
  for (Index j : spec.malicious) row(j) = 1;
  for (Index j : f0) row(j) = 1;
  for (Index j : f1) row(j) = 1;
  row(spec.target) = 0;
  return row;
}

// Forged list of the input-mode inflation attack: the coalition, all honest
// neighbors, and a sampled set of honest non-neighbors.
BitRow inflation_input_list(const AttackSpec& spec, const Graph& g, double rho,
                            RandomSource& attacker_rng, bool* capped) {
  const Index n = g.n();
  const auto mask = malicious_mask(spec, n);
  std::vector<Index> h1, h0;
  honest_split(g, mask, spec.target, &h1, &h0);
  const auto f = sample_capped(h0, scaled_count(spec.b, rho, h0.size()),
                               attacker_rng, capped);
  BitRow list = BitRow::Zero(n);
  for (Index j : spec.malicious) list(j) = 1;
  for (Index j : h1) list(j) = 1;
  for (Index j : f) list(j) = 1;
  list(spec.target) = 0;
  return list;
}

}  // namespace

PoisonedBundle poisoned_responses_check(const AttackSpec& spec, const Graph& g,
                                        double rho, RandomSource& trial_rng) {
  const Index n = g.n();
  validate(spec, n);
  const auto mask = malicious_mask(spec, n);
  const Index t = spec.target;
  const bool input_mode = spec.mode == PoisonMode::input;

  PoisonedBundle out;
  const bool track_inputs = input_mode || spec.kind == AttackKind::none;
  if (track_inputs) out.inputs = g.adj;

  RandomSource attacker_rng = trial_rng.fork("attacker");
  BitRow target_row;  // response-mode inflation: the literal row
  BitRow target_list;  // input-mode inflation: the forged list
  if (spec.kind == AttackKind::inflation) {
    if (input_mode) {
      target_list =
          inflation_input_list(spec, g, rho, attacker_rng, &out.sample_capped);
      out.inputs.row(t) = target_list;
    } else {
      target_row =
          inflation_response_row(spec, g, rho, attacker_rng, &out.sample_capped);
    }
  }

  out.bundle.bits = BitMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    RandomSource rng = user_stream(trial_rng, i);
    const Index skip[] = {i};
    const bool is_mal = mask[static_cast<std::size_t>(i)] != 0;
    if (!is_mal || spec.kind == AttackKind::none) {
      out.bundle.bits.row(i) = rr_row(g.adj.row(i), skip, rho, rng);
      continue;
    }
    if (spec.kind == AttackKind::deflation) {
      if (input_mode) {
        BitRow list = g.adj.row(i);
        list(t) = 0;
        out.inputs.row(i) = list;
        out.bundle.bits.row(i) = rr_row(list, skip, rho, rng);
      } else {
        BitRow row = rr_row(g.adj.row(i), skip, rho, rng);
        row(t) = 0;
        out.bundle.bits.row(i) = row;
      }
      continue;
    }
    if (i == t) {
      out.bundle.bits.row(i) =
          input_mode ? rr_row(target_list, skip, rho, rng) : target_row;
      continue;
    }
    // Inflating accomplice: force the target bit.
    if (input_mode) {
      BitRow list = g.adj.row(i);
      list(t) = 1;
      out.inputs.row(i) = list;
      out.bundle.bits.row(i) = rr_row(list, skip, rho, rng);
    } else {
      BitRow row = rr_row(g.adj.row(i), skip, rho, rng);
      row(t) = 1;
      out.bundle.bits.row(i) = row;
    }
  }
  return out;
}

PoisonedBundle poisoned_responses_hybrid(const AttackSpec& spec,
                                         const Graph& g, double rho,
                                         double lap_scale, double tau,
                                         RandomSource& trial_rng,
                                         bool zero_noise) {
  const Index n = g.n();
  validate(spec, n);
  if (tau < 0.0)
    throw std::invalid_argument("poisoned_responses_hybrid: tau < 0");

  // Bits are exactly the matrix-protocol attack at the bit-budget rho; the
  // attacker substream is consumed identically.
  PoisonedBundle out = poisoned_responses_check(spec, g, rho, trial_rng);

  const auto mask = malicious_mask(spec, n);
  const Index t = spec.target;
  const bool input_mode = spec.mode == PoisonMode::input;
  out.bundle.lap_degree.resize(n);
  for (Index i = 0; i < n; ++i) {
    // Re-derive the user stream and advance past the row draws so the
    // scalar comes out exactly where an honest responder would draw it.
    RandomSource rng = user_stream(trial_rng, i);
    Index row_draws = n - 1;
    if (spec.kind == AttackKind::inflation && i == t && !input_mode)
      row_draws = 0;  // forged row consumed nothing
    for (Index d = 0; d < row_draws; ++d) rng.next_u64();

    const bool is_mal = mask[static_cast<std::size_t>(i)] != 0;
    const bool forging =
        spec.kind == AttackKind::inflation && is_mal && i == t;
    if (!forging) {
      double noise;
      if (zero_noise) {
        rng.next_unit_open();
        noise = 0.0;
      } else {
        noise = laplace_sample(lap_scale, rng);
      }
      out.bundle.lap_degree(i) = static_cast<double>(g.degree(i)) + noise;
      continue;
    }
    const double forged_popcount = static_cast<double>(
        (input_mode ? out.inputs.row(t) : out.bundle.bits.row(t))
            .cast<int>()
            .sum());
    double forged = forged_popcount + spec.b * tau;
    if (input_mode) {
      if (zero_noise)
        rng.next_unit_open();
      else
        forged += laplace_sample(lap_scale, rng);
    }
    out.bundle.lap_degree(t) = forged;
  }
  return out;
}

PoisonedBundle poisoned_responses_laplace(const AttackSpec& spec,
                                          const Graph& g, double lap_scale,
                                          RandomSource& trial_rng,
                                          bool zero_noise) {
  const Index n = g.n();
  validate(spec, n);
  const auto mask = malicious_mask(spec, n);
  const Index t = spec.target;
  const bool input_mode = spec.mode == PoisonMode::input;

  PoisonedBundle out;
  out.bundle.lap_degree.resize(n);
  for (Index i = 0; i < n; ++i) {
    RandomSource rng = user_stream(trial_rng, i);
    const bool is_mal = mask[static_cast<std::size_t>(i)] != 0;
    if (!is_mal || spec.kind == AttackKind::none) {
      out.bundle.lap_degree(i) = laplace_respond(g, i, lap_scale, rng,
                                                 zero_noise);
      continue;
    }
    if (spec.kind == AttackKind::inflation) {
      if (i != t) {  // accomplices report honestly here
        out.bundle.lap_degree(i) = laplace_respond(g, i, lap_scale, rng,
                                                   zero_noise);
        continue;
      }
      double forged = static_cast<double>(n - 1);
      if (input_mode)
        forged += zero_noise ? 0.0 : laplace_sample(lap_scale, rng);
      out.bundle.lap_degree(t) = forged;
      continue;
    }
    // Deflation: drop the target edge from the own-degree report.
    double forged =
        static_cast<double>(g.degree(i)) - static_cast<double>(g.adj(i, t));
    if (input_mode) forged += zero_noise ? 0.0 : laplace_sample(lap_scale, rng);
    out.bundle.lap_degree(i) = forged;
  }
  return out;
}

PoisonedBundle nonprivate_attack(NonprivateAttack kind, const Graph& g,
                                 const AttackSpec& spec,
                                 RandomSource& trial_rng) {
  const Index n = g.n();
  {
    AttackSpec shape = spec;  // shared shape checks; target side differs here
    shape.kind = AttackKind::none;
    validate(shape, n);
  }
  PoisonedBundle out;
  out.bundle.bits = g.adj;
  if (spec.malicious.empty()) {
    out.inputs = out.bundle.bits;  // identity randomizer: inputs = reports
    return out;
  }
  const Index t = spec.target;
  if (t < 0 || t >= n)
    throw std::invalid_argument("nonprivate_attack: target out of range");
  const bool target_malicious = std::binary_search(
      spec.malicious.begin(), spec.malicious.end(), t);

  if (kind == NonprivateAttack::deflate_honest_target) {
    if (target_malicious)
      throw std::invalid_argument(
          "nonprivate_attack: deflate_honest_target needs an honest target");
    for (Index j : spec.malicious) out.bundle.bits(j, t) = 0;
    out.inputs = out.bundle.bits;
    return out;
  }

  if (!target_malicious)
    throw std::invalid_argument(
        "nonprivate_attack: deflate_self needs a malicious target");
  const auto mask = malicious_mask(spec, n);
  std::vector<Index> honest_neighbors;
  for (Index j = 0; j < n; ++j) {
    if (j == t || !g.has_edge(t, j)) continue;
    if (mask[static_cast<std::size_t>(j)]) continue;
    honest_neighbors.push_back(j);
  }
  const auto m = spec.malicious.size();
  for (Index j : spec.malicious) {
    if (j == t) continue;
    if (!g.has_edge(t, j))
      throw std::runtime_error(
          "nonprivate_attack: target lacks an edge to an accomplice");
  }
  if (honest_neighbors.size() < m)
    throw std::runtime_error(
        "nonprivate_attack: target needs at least m honest neighbors");

  RandomSource attacker_rng = trial_rng.fork("attacker");
  const auto denied =
      sample_without_replacement(std::move(honest_neighbors), m, attacker_rng);
  for (Index j : spec.malicious) {
    if (j == t) continue;
    out.bundle.bits(j, t) = 0;  // accomplice denies the shared edge
    out.bundle.bits(t, j) = 0;  // and the target denies it back
  }
  for (Index j : denied) out.bundle.bits(t, j) = 0;
  out.inputs = out.bundle.bits;
  return out;
}

}  // namespace degldp
