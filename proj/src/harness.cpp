#include "degldp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>
#include <utility>

#include "degldp/randomizers.hpp"
#include "format_util.hpp"

namespace degldp {

namespace {

bool is_inflation(AttackName a) {
  return a == AttackName::inflate_input || a == AttackName::inflate_response;
}

bool is_deflation(AttackName a) {
  return a == AttackName::deflate_input || a == AttackName::deflate_response;
}

bool is_audit(AttackName a) {
  return a == AttackName::thm6_correctness || a == AttackName::thm6_soundness;
}

std::vector<Index> all_vertices(Index n) {
  std::vector<Index> v(static_cast<std::size_t>(n));
  std::iota(v.begin(), v.end(), Index{0});
  return v;
}

std::vector<Index> neighbors_of(const Graph& g, Index t) {
  std::vector<Index> out;
  for (Index j = 0; j < g.n(); ++j)
    if (j != t && g.has_edge(t, j)) out.push_back(j);
  return out;
}

std::vector<char> membership_mask(const std::vector<Index>& set, Index n) {
  std::vector<char> mask(static_cast<std::size_t>(n), 0);
  for (Index j : set) mask[static_cast<std::size_t>(j)] = 1;
  return mask;
}

// rho actually used by the bit randomizers for this run (the zero-noise
// hook replaces randomized response with the identity).
double run_rho(const ExperimentConfig& cfg) {
  if (cfg.zero_noise) return 0.0;
  if (cfg.protocol == Protocol::hybrid)
    return rho_from_eps(split_budget(cfg.privacy.eps, cfg.privacy.c).eps_bits);
  return rho_from_eps(cfg.privacy.eps);
}

int thread_count(int trials) {
  const char* env = std::getenv("DEGLDP_THREADS");
  if (env == nullptr || *env == '\0') return 1;
  char* end = nullptr;
  const long k = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || k < 1) return 1;
  return static_cast<int>(std::min<long>(k, trials));
}

MetricStats stats_over(const std::vector<double>& xs) {
  MetricStats s;
  const auto t = static_cast<double>(xs.size());
  if (xs.empty()) return s;
  s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / t;
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(ss / (t - 1.0));
    s.se = s.sd / std::sqrt(t);
  }
  return s;
}

}  // namespace

const char* to_string(AttackName a) {
  switch (a) {
    case AttackName::none: return "none";
    case AttackName::inflate_input: return "inflate-input";
    case AttackName::inflate_response: return "inflate-response";
    case AttackName::deflate_input: return "deflate-input";
    case AttackName::deflate_response: return "deflate-response";
    case AttackName::thm6_correctness: return "thm6-correctness";
    case AttackName::thm6_soundness: return "thm6-soundness";
  }
  throw std::invalid_argument("unknown attack");
}

AttackName attack_from_string(const std::string& s) {
  for (AttackName a :
       {AttackName::none, AttackName::inflate_input,
        AttackName::inflate_response, AttackName::deflate_input,
        AttackName::deflate_response, AttackName::thm6_correctness,
        AttackName::thm6_soundness})
    if (s == to_string(a)) return a;
  throw std::invalid_argument("unknown attack name: " + s);
}

bool attack_allowed(Protocol p, AttackName a) {
  if (a == AttackName::none) return true;
  if (is_audit(a)) return p == Protocol::nonprivate;
  return p != Protocol::nonprivate;
}

std::optional<PoisonMode> attack_mode(AttackName a) {
  switch (a) {
    case AttackName::inflate_input:
    case AttackName::deflate_input: return PoisonMode::input;
    case AttackName::inflate_response:
    case AttackName::deflate_response: return PoisonMode::response;
    default: return std::nullopt;
  }
}

const char* to_string(TargetRule r) {
  switch (r) {
    case TargetRule::uniform_malicious: return "uniform-malicious";
    case TargetRule::uniform_honest: return "uniform-honest";
    case TargetRule::max_degree_honest: return "max-degree-honest";
  }
  throw std::invalid_argument("unknown target rule");
}

TargetRule target_rule_from_string(const std::string& s) {
  for (TargetRule r : {TargetRule::uniform_malicious, TargetRule::uniform_honest,
                       TargetRule::max_degree_honest})
    if (s == to_string(r)) return r;
  throw std::invalid_argument("unknown target rule: " + s);
}

const char* to_string(FailureKind k) {
  switch (k) {
    case FailureKind::correctness: return "correctness";
    case FailureKind::soundness: return "soundness";
  }
  throw std::invalid_argument("unknown failure kind");
}

FailureKind failure_kind_from_string(const std::string& s) {
  for (FailureKind k : {FailureKind::correctness, FailureKind::soundness})
    if (s == to_string(k)) return k;
  throw std::invalid_argument("unknown failure kind: " + s);
}

GraphSource GraphSource::parse(const std::string& text) {
  GraphSource s;
  if (text.rfind("file:", 0) == 0) {
    s.kind = Kind::file;
    s.path = text.substr(5);
    if (s.path.empty())
      throw std::invalid_argument("graph spec: empty path in " + text);
    return s;
  }
  if (text.rfind("er:", 0) != 0)
    throw std::invalid_argument("graph spec must be er:<n>,<p> or file:<path>, got " +
                                text);
  const std::string body = text.substr(3);
  const auto comma = body.find(',');
  if (comma == std::string::npos)
    throw std::invalid_argument("graph spec: expected er:<n>,<p>, got " + text);
  s.kind = Kind::er;
  try {
    std::size_t used = 0;
    s.n = static_cast<Index>(std::stoll(body.substr(0, comma), &used));
    if (used != comma) throw std::invalid_argument("trailing characters");
    const std::string ptext = body.substr(comma + 1);
    s.p = std::stod(ptext, &used);
    if (used != ptext.size()) throw std::invalid_argument("trailing characters");
  } catch (const std::exception&) {
    throw std::invalid_argument("graph spec: cannot parse er:<n>,<p> from " +
                                text);
  }
  if (s.n < 1) throw std::invalid_argument("graph spec: n must be >= 1");
  if (!(s.p >= 0.0 && s.p <= 1.0))
    throw std::invalid_argument("graph spec: p must lie in [0, 1]");
  return s;
}

std::string GraphSource::spec_string() const {
  if (kind == Kind::file) return "file:" + path;
  return "er:" + std::to_string(n) + "," + detail::format_double(p);
}

PoisonMode ExperimentConfig::effective_mode() const {
  if (mode) return *mode;
  if (const auto pinned = attack_mode(attack)) return *pinned;
  return PoisonMode::response;
}

TargetRule ExperimentConfig::effective_target_rule() const {
  if (target_rule) return *target_rule;
  return is_inflation(attack) ? TargetRule::uniform_malicious
                              : TargetRule::uniform_honest;
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.graph.kind == GraphSource::Kind::er) {
    if (cfg.graph.n < 1)
      throw std::invalid_argument("config: er graph needs n >= 1");
    if (!(cfg.graph.p >= 0.0 && cfg.graph.p <= 1.0))
      throw std::invalid_argument("config: er graph needs p in [0, 1]");
  } else if (cfg.graph.path.empty()) {
    throw std::invalid_argument("config: file graph needs a path");
  }
  if (!attack_allowed(cfg.protocol, cfg.attack))
    throw std::invalid_argument(std::string("config: attack ") +
                                to_string(cfg.attack) +
                                " does not apply to protocol " +
                                to_string(cfg.protocol));
  if (cfg.mode && attack_mode(cfg.attack) &&
      *cfg.mode != *attack_mode(cfg.attack))
    throw std::invalid_argument(std::string("config: mode ") +
                                to_string(*cfg.mode) +
                                " contradicts attack " + to_string(cfg.attack));
  if (cfg.protocol != Protocol::nonprivate) validate(cfg.privacy);
  if (cfg.m < 0) throw std::invalid_argument("config: m must be >= 0");
  if (is_inflation(cfg.attack) && cfg.m < 1)
    throw std::invalid_argument("config: inflation needs m >= 1");
  if (!(cfg.b >= 0.0) || !std::isfinite(cfg.b))
    throw std::invalid_argument("config: b must be finite and >= 0");
  if (cfg.trials < 1) throw std::invalid_argument("config: trials must be >= 1");
  if (cfg.target_rule) {
    if (!is_inflation(cfg.attack) && !is_deflation(cfg.attack))
      throw std::invalid_argument(
          "config: target rule applies only to inflate/deflate attacks");
    if (is_inflation(cfg.attack) &&
        *cfg.target_rule != TargetRule::uniform_malicious)
      throw std::invalid_argument(
          "config: an inflation target is drawn from the coalition");
    if (is_deflation(cfg.attack) &&
        *cfg.target_rule == TargetRule::uniform_malicious)
      throw std::invalid_argument("config: a deflation target is honest");
  }
  for (const Probe& probe : cfg.probes)
    if (!(probe.alpha >= 0.0) || !std::isfinite(probe.alpha))
      throw std::invalid_argument("config: probe alpha must be finite and >= 0");
}

std::pair<std::vector<Index>, Index> select_malicious(const Graph& g, int m,
                                                      AttackName attack,
                                                      TargetRule rule,
                                                      RandomSource& rng) {
  const Index n = g.n();
  if (m < 0) throw std::invalid_argument("select_malicious: m must be >= 0");
  const auto mm = static_cast<std::size_t>(m);
  if (static_cast<Index>(m) > n)
    throw std::runtime_error("select_malicious: coalition larger than graph");

  switch (attack) {
    case AttackName::none: {
      auto mal = sample_without_replacement(all_vertices(n), mm, rng);
      std::sort(mal.begin(), mal.end());
      return {std::move(mal), Index{-1}};
    }
    case AttackName::inflate_input:
    case AttackName::inflate_response: {
      if (m < 1)
        throw std::runtime_error(
            "select_malicious: inflation needs a malicious target");
      auto mal = sample_without_replacement(all_vertices(n), mm, rng);
      const Index t = mal[rng.next_below(mal.size())];
      std::sort(mal.begin(), mal.end());
      return {std::move(mal), t};
    }
    case AttackName::deflate_input:
    case AttackName::deflate_response: {
      auto mal = sample_without_replacement(all_vertices(n), mm, rng);
      std::sort(mal.begin(), mal.end());
      const auto mask = membership_mask(mal, n);
      std::vector<Index> honest;
      for (Index i = 0; i < n; ++i)
        if (!mask[static_cast<std::size_t>(i)]) honest.push_back(i);
      if (honest.empty())
        throw std::runtime_error(
            "select_malicious: deflation needs an honest target");
      Index t;
      if (rule == TargetRule::max_degree_honest) {
        t = honest.front();
        for (Index h : honest)
          if (g.degree(h) > g.degree(t)) t = h;  // ties keep the lowest index
      } else if (rule == TargetRule::uniform_honest) {
        t = honest[rng.next_below(honest.size())];
      } else {
        throw std::invalid_argument(
            "select_malicious: a deflation target is honest");
      }
      return {std::move(mal), t};
    }
    case AttackName::thm6_correctness: {
      if (m == 0) {
        const Index t = static_cast<Index>(rng.next_below(
            static_cast<std::uint64_t>(n)));
        return {{}, t};
      }
      std::vector<Index> cands;
      for (Index v = 0; v < n; ++v)
        if (g.degree(v) >= m) cands.push_back(v);
      if (cands.empty())
        throw std::runtime_error(
            "select_malicious: no vertex has m neighbors to corrupt");
      const Index t = cands[rng.next_below(cands.size())];
      auto mal = sample_without_replacement(neighbors_of(g, t), mm, rng);
      std::sort(mal.begin(), mal.end());
      return {std::move(mal), t};
    }
    case AttackName::thm6_soundness: {
      if (m == 0) return {{}, Index{-1}};
      std::vector<Index> cands;
      for (Index v = 0; v < n; ++v)
        if (g.degree(v) >= 2 * m - 1) cands.push_back(v);
      if (cands.empty())
        throw std::runtime_error(
            "select_malicious: no vertex has degree 2m-1");
      const Index t = cands[rng.next_below(cands.size())];
      auto mal = sample_without_replacement(neighbors_of(g, t), mm - 1, rng);
      mal.push_back(t);
      std::sort(mal.begin(), mal.end());
      return {std::move(mal), t};
    }
  }
  throw std::invalid_argument("select_malicious: unknown attack");
}

Graph realize_graph(const GraphSource& source, std::uint64_t seed) {
  if (source.kind == GraphSource::Kind::er) {
    RandomSource rng = RandomSource(seed).fork("graph");
    return generate_er(source.n, source.p, rng);
  }
  return load_edge_list_file(source.path);
}

TrialRecord run_trial(const ExperimentConfig& cfg, const Graph& g,
                      const std::vector<Index>& malicious, Index target,
                      int trial_index) {
  const Index n = g.n();
  RandomSource trial_rng = RandomSource(cfg.seed)
                               .fork("trial")
                               .fork(static_cast<std::uint64_t>(trial_index));

  AttackSpec spec;
  spec.mode = cfg.effective_mode();
  spec.malicious = malicious;
  spec.target = target;
  spec.b = cfg.b;
  if (is_inflation(cfg.attack)) spec.kind = AttackKind::inflation;
  else if (is_deflation(cfg.attack)) spec.kind = AttackKind::deflation;
  else spec.kind = AttackKind::none;

  PoisonedBundle pb;
  DegreeEstimates est;
  const PrivacyParams& pp = cfg.privacy;
  switch (cfg.protocol) {
    case Protocol::naive: {
      const double rho = run_rho(cfg);
      pb = poisoned_responses_naive(spec, g, rho, trial_rng);
      est = naive_aggregate(pb.bundle, pb.assignment, rho);
      break;
    }
    case Protocol::check: {
      const double rho = run_rho(cfg);
      const double tau =
          tau_threshold(spec.mode, Protocol::check, n, cfg.m, rho, pp.delta);
      pb = poisoned_responses_check(spec, g, rho, trial_rng);
      est = check_aggregate(pb.bundle, rho, tau);
      break;
    }
    case Protocol::hybrid: {
      const auto split = split_budget(pp.eps, pp.c);
      const double rho = run_rho(cfg);
      const double lap_scale = 1.0 / split.eps_scalar;
      const double tau =
          tau_threshold(spec.mode, Protocol::hybrid, n, cfg.m, rho, pp.delta);
      const double slack =
          hybrid_second_slack(cfg.m, tau, rho, split.eps_scalar, pp.delta);
      pb = poisoned_responses_hybrid(spec, g, rho, lap_scale, tau, trial_rng,
                                     cfg.zero_noise);
      est = hybrid_aggregate(pb.bundle, rho, tau, slack);
      break;
    }
    case Protocol::laplace: {
      const double lap_scale = 1.0 / pp.eps;
      pb = poisoned_responses_laplace(spec, g, lap_scale, trial_rng,
                                      cfg.zero_noise);
      est = laplace_aggregate(pb.bundle);
      break;
    }
    case Protocol::nonprivate: {
      if (cfg.attack == AttackName::thm6_correctness) {
        pb = nonprivate_attack(NonprivateAttack::deflate_honest_target, g,
                               spec, trial_rng);
      } else if (cfg.attack == AttackName::thm6_soundness) {
        pb = nonprivate_attack(NonprivateAttack::deflate_self, g, spec,
                               trial_rng);
      } else {
        pb.bundle.bits = g.adj;  // truthful reports
        pb.inputs = pb.bundle.bits;
      }
      est = nonprivate_aggregate(pb.bundle, cfg.m);
      break;
    }
  }

  TrialRecord rec;
  rec.sample_capped = pb.sample_capped;
  rec.metrics.trial = trial_index;

  const Eigen::VectorXi degs = degrees(g);
  const auto mask = membership_mask(malicious, n);
  double honest_max = 0.0, malicious_max = 0.0;
  int honest_bottom = 0, malicious_bottom = 0;
  for (Index i = 0; i < n; ++i) {
    const bool mal = mask[static_cast<std::size_t>(i)] != 0;
    if (est.rejected(i)) {
      (mal ? malicious_bottom : honest_bottom) += 1;
      continue;
    }
    const double err = std::abs(est.value(i) - static_cast<double>(degs(i)));
    double& slot = mal ? malicious_max : honest_max;
    slot = std::max(slot, err);
  }
  rec.metrics.honest_max_err = honest_max;
  rec.metrics.honest_bottom = honest_bottom;
  rec.metrics.malicious_max_err = malicious_max;
  rec.metrics.malicious_bottom = malicious_bottom;
  if (target >= 0) {
    if (est.rejected(target)) {
      rec.metrics.target_bottom = 1;
    } else {
      rec.metrics.target_err =
          std::abs(est.value(target) - static_cast<double>(degs(target)));
    }
  }
  rec.estimates = std::move(est);
  return rec;
}

ExperimentResult run_experiment_on(const ExperimentConfig& cfg,
                                   const Graph& g) {
  validate_config(cfg);
  if (g.n() < 1)
    throw std::invalid_argument("run_experiment: graph has no vertices");

  ExperimentResult result;
  result.config = cfg;
  result.n = g.n();
  result.true_degrees = degrees(g);
  result.d95 = degree_percentile(result.true_degrees, 95.0);
  result.d80 = degree_percentile(result.true_degrees, 80.0);

  {
    RandomSource sel = RandomSource(cfg.seed).fork("malicious");
    auto [mal, tgt] = select_malicious(g, cfg.m, cfg.attack,
                                       cfg.effective_target_rule(), sel);
    result.malicious = std::move(mal);
    result.target = tgt;
  }

  const PoisonMode mode = cfg.effective_mode();
  if (cfg.protocol == Protocol::check || cfg.protocol == Protocol::hybrid)
    result.tau = tau_threshold(mode, cfg.protocol, result.n, cfg.m,
                               run_rho(cfg), cfg.privacy.delta);
  result.bound = compute_bound(cfg.protocol, mode, result.n, cfg.m,
                               cfg.privacy);

  result.records.resize(static_cast<std::size_t>(cfg.trials));
  const int workers = thread_count(cfg.trials);
  if (workers <= 1) {
    for (int t = 0; t < cfg.trials; ++t)
      result.records[static_cast<std::size_t>(t)] =
          run_trial(cfg, g, result.malicious, result.target, t);
  } else {
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    auto work = [&] {
      for (;;) {
        const int t = next.fetch_add(1);
        if (t >= cfg.trials) return;
        try {
          result.records[static_cast<std::size_t>(t)] =
              run_trial(cfg, g, result.malicious, result.target, t);
        } catch (...) {
          const std::lock_guard<std::mutex> lock(failure_mu);
          if (!failure) failure = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  }

  std::vector<double> honest, malicious_err, target_err, honest_bot,
      malicious_bot, target_bot;
  honest.reserve(result.records.size());
  for (const TrialRecord& rec : result.records) {
    result.sample_capped = result.sample_capped || rec.sample_capped;
    honest.push_back(rec.metrics.honest_max_err);
    malicious_err.push_back(rec.metrics.malicious_max_err);
    target_err.push_back(rec.metrics.target_err);
    honest_bot.push_back(rec.metrics.honest_bottom);
    malicious_bot.push_back(rec.metrics.malicious_bottom);
    target_bot.push_back(rec.metrics.target_bottom);
  }
  result.summary.honest_max_err = stats_over(honest);
  result.summary.malicious_max_err = stats_over(malicious_err);
  result.summary.target_err = stats_over(target_err);
  result.summary.honest_bottom_mean = stats_over(honest_bot).mean;
  result.summary.malicious_bottom_mean = stats_over(malicious_bot).mean;
  result.summary.target_bottom_rate = stats_over(target_bot).mean;
  for (const Probe& probe : cfg.probes)
    result.summary.probes.push_back(
        {probe, failure_rate(result, probe.alpha, probe.kind)});
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  return run_experiment_on(cfg, realize_graph(cfg.graph, cfg.seed));
}

double failure_rate(const ExperimentResult& result, double alpha,
                    FailureKind kind) {
  if (kind == FailureKind::soundness && result.malicious.empty())
    throw std::invalid_argument("failure_rate: soundness needs a coalition");
  if (result.records.empty())
    throw std::invalid_argument("failure_rate: no trials recorded");
  const auto mask = membership_mask(result.malicious, result.n);
  const auto trials = static_cast<double>(result.records.size());
  double worst = 0.0;
  for (Index i = 0; i < result.n; ++i) {
    const bool mal = mask[static_cast<std::size_t>(i)] != 0;
    if ((kind == FailureKind::correctness) == mal) continue;
    int bad = 0;
    for (const TrialRecord& rec : result.records) {
      const bool rejected = rec.estimates.rejected(i);
      const double err =
          rejected ? 0.0
                   : std::abs(rec.estimates.value(i) -
                              static_cast<double>(result.true_degrees(i)));
      const bool fail = kind == FailureKind::correctness
                            ? (rejected || err >= alpha)
                            : (!rejected && err >= alpha);
      if (fail) ++bad;
    }
    worst = std::max(worst, static_cast<double>(bad) / trials);
  }
  return worst;
}

}  // namespace degldp
