#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "degldp/attacks.hpp"
#include "degldp/bounds.hpp"
#include "degldp/graph.hpp"
#include "degldp/protocols.hpp"

namespace degldp {

// Attack vocabulary shared by CLI, config files and results. The thm6-*
// names are the audit attacks on the non-private protocol; the others pair
// a direction with the poisoned side.
enum class AttackName {
  none,
  inflate_input,
  inflate_response,
  deflate_input,
  deflate_response,
  thm6_correctness,
  thm6_soundness,
};

const char* to_string(AttackName a);
AttackName attack_from_string(const std::string& s);

// Which protocol accepts which attack: the poisoning attacks apply to the
// randomized protocols, the thm6-* audits only to nonprivate.
bool attack_allowed(Protocol p, AttackName a);

// The poisoned side baked into an attack name; nullopt for none/thm6-*.
std::optional<PoisonMode> attack_mode(AttackName a);

// Graph specification: "er:<n>,<p>" or "file:<path>".
struct GraphSource {
  enum class Kind { er, file };
  Kind kind = Kind::er;
  Index n = 0;
  double p = 0.0;
  std::string path;

  static GraphSource parse(const std::string& text);
  std::string spec_string() const;  // round-trips through parse
};

enum class TargetRule { uniform_malicious, uniform_honest, max_degree_honest };

enum class FailureKind { correctness, soundness };

// Empirical failure-rate probe evaluated over the retained per-user trial
// outcomes: correctness counts an honest user rejected or off by at least
// alpha, soundness counts a malicious user kept while off by at least
// alpha.
struct Probe {
  FailureKind kind = FailureKind::correctness;
  double alpha = 0.0;
};

const char* to_string(TargetRule r);
TargetRule target_rule_from_string(const std::string& s);
const char* to_string(FailureKind k);
FailureKind failure_kind_from_string(const std::string& s);

struct ExperimentConfig {
  GraphSource graph;
  Protocol protocol = Protocol::check;
  AttackName attack = AttackName::none;
  // Poisoned side used for thresholds and bounds. Must match the attack
  // name when that name pins one; defaults to the attack's side, or to
  // response for none/thm6-*.
  std::optional<PoisonMode> mode;
  PrivacyParams privacy;
  int m = 0;
  double b = 1.0;
  int trials = 50;
  std::uint64_t seed = 1;
  std::optional<TargetRule> target_rule;
  bool zero_noise = false;  // test hook, never a CLI default
  std::vector<Probe> probes;

  PoisonMode effective_mode() const;
  TargetRule effective_target_rule() const;
};

// Throws std::invalid_argument on contradictory or out-of-domain settings.
void validate_config(const ExperimentConfig& cfg);

struct TrialMetrics {
  int trial = 0;
  double honest_max_err = 0.0;  // max |estimate - degree| over kept honest
  int honest_bottom = 0;        // rejected honest users
  double malicious_max_err = 0.0;
  int malicious_bottom = 0;
  double target_err = 0.0;  // 0 when there is no target or it was rejected
  int target_bottom = 0;
};

// Per-trial record; estimates are retained so failure-rate probes can be
// evaluated per user after the fact.
struct TrialRecord {
  TrialMetrics metrics;
  DegreeEstimates estimates;
  bool sample_capped = false;
};

struct MetricStats {
  double mean = 0.0, sd = 0.0, se = 0.0;
};

struct ProbeResult {
  Probe probe;
  double rate = 0.0;
};

struct Summary {
  MetricStats honest_max_err, malicious_max_err, target_err;
  double honest_bottom_mean = 0.0;
  double malicious_bottom_mean = 0.0;
  double target_bottom_rate = 0.0;
  std::vector<ProbeResult> probes;
};

struct ExperimentResult {
  ExperimentConfig config;
  Index n = 0;
  Eigen::VectorXi true_degrees;
  std::vector<Index> malicious;
  Index target = -1;
  int d95 = 0, d80 = 0;
  double tau = std::numeric_limits<double>::quiet_NaN();
  BoundReport bound;
  bool sample_capped = false;
  std::vector<TrialRecord> records;
  Summary summary;
};

// Uniform coalition of size m plus a target picked by `rule`. The thm6-*
// attacks instead build the coalition around a feasible target: correctness
// picks a vertex with >= m neighbors and corrupts m of them; soundness
// picks a vertex with degree >= 2m-1, corrupts it and m-1 of its neighbors.
// Throws std::runtime_error when the graph has no feasible target.
std::pair<std::vector<Index>, Index> select_malicious(const Graph& g, int m,
                                                      AttackName attack,
                                                      TargetRule rule,
                                                      RandomSource& rng);

Graph realize_graph(const GraphSource& source, std::uint64_t seed);

// One trial, a pure function of (config, graph, coalition, trial index):
// substreams are forked as seed -> "trial" -> index -> "user" -> i.
TrialRecord run_trial(const ExperimentConfig& cfg, const Graph& g,
                      const std::vector<Index>& malicious, Index target,
                      int trial_index);

// Builds the graph from config (seed -> "graph"), selects the coalition
// (seed -> "malicious"), runs all trials (concurrently when the
// DEGLDP_THREADS environment variable asks for it; results are identical
// for any thread count) and summarizes.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Same, on a caller-supplied graph (tests drive constructed graphs).
ExperimentResult run_experiment_on(const ExperimentConfig& cfg,
                                   const Graph& g);

// Max over users of the per-user empirical failure frequency across trials.
// Soundness with an empty coalition is a domain error.
double failure_rate(const ExperimentResult& result, double alpha,
                    FailureKind kind);

// One row per trial; fixed column set; floats carry 17 significant digits;
// reruns of the same config are byte-identical.
void write_csv(std::ostream& out, const ExperimentResult& result);
void write_json(std::ostream& out, const ExperimentResult& result);

// CLI flags that reproduce this run byte for byte.
std::string effective_config_line(const ExperimentConfig& cfg);

}  // namespace degldp
