#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "degldp/harness.hpp"

namespace {

using degldp::ExperimentConfig;
using degldp::ExperimentResult;
using degldp::Graph;
using degldp::GraphSource;
using degldp::Index;
using degldp::PoisonMode;
using degldp::PrivacyParams;
using degldp::Protocol;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

int cmd_generate(long long n, double p, std::uint64_t seed,
                 const std::string& out_path) {
  if (n < 1) throw std::invalid_argument("--n must be >= 1");
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("--p must lie in [0, 1]");
  GraphSource source;
  source.kind = GraphSource::Kind::er;
  source.n = static_cast<Index>(n);
  source.p = p;
  const Graph g = degldp::realize_graph(source, seed);
  const std::string header = "degldp generate --n " + std::to_string(n) +
                             " --p " + fmt(p) + " --seed " +
                             std::to_string(seed);
  const std::string info = "graph: n=" + std::to_string(g.n()) +
                           " edges=" + std::to_string(g.edge_count());
  if (out_path.empty()) {
    degldp::write_edge_list(std::cout, g, header);
    std::cerr << info << '\n';
    return 0;
  }
  std::ofstream file(out_path);
  if (!file)
    throw std::runtime_error("cannot open " + out_path + " for writing");
  degldp::write_edge_list(file, g, header);
  file.flush();
  if (!file) throw std::runtime_error("write failed: " + out_path);
  std::cout << info << '\n';
  return 0;
}

int cmd_run(const ExperimentConfig& cfg, const std::string& format,
            const std::string& out_path) {
  const bool to_file = !out_path.empty();
  std::ostream& diag = to_file ? std::cout : std::cerr;
  diag << "config: " << degldp::effective_config_line(cfg) << '\n';

  const ExperimentResult result = degldp::run_experiment(cfg);
  if (result.bound.inapplicable)
    diag << "warning: validity precondition (4/3) e^eps ln(2/delta) < n "
            "fails; bounds are reported with inapplicable=true\n";
  if (result.sample_capped)
    diag << "warning: an inflation sample was capped at its population\n";

  std::ofstream file;
  if (to_file) {
    file.open(out_path);
    if (!file)
      throw std::runtime_error("cannot open " + out_path + " for writing");
  }
  std::ostream& data = to_file ? static_cast<std::ostream&>(file) : std::cout;
  if (format == "json")
    degldp::write_json(data, result);
  else
    degldp::write_csv(data, result);
  data.flush();
  if (!data) throw std::runtime_error("write failed");

  const degldp::Summary& s = result.summary;
  diag << "summary: honest_max_err " << s.honest_max_err.mean << " +/- "
       << s.honest_max_err.se << " | malicious_max_err "
       << s.malicious_max_err.mean << " +/- " << s.malicious_max_err.se
       << " | target_err " << s.target_err.mean << " +/- " << s.target_err.se
       << " | honest_bottom " << s.honest_bottom_mean << " | malicious_bottom "
       << s.malicious_bottom_mean << " | target_bottom_rate "
       << s.target_bottom_rate << '\n';
  return 0;
}

int cmd_bounds(Protocol proto, PoisonMode mode, long long n, int m,
               const PrivacyParams& params) {
  if (n < 1) throw std::invalid_argument("--n must be >= 1");
  const degldp::BoundReport r =
      degldp::compute_bound(proto, mode, static_cast<Index>(n), m, params);
  const nlohmann::ordered_json j{
      {"protocol", degldp::to_string(r.protocol)},
      {"mode", degldp::to_string(r.mode)},
      {"alpha1", r.alpha1},
      {"delta1", r.delta1},
      {"tight1", r.tight1},
      {"alpha2", r.alpha2},
      {"delta2", r.delta2},
      {"tight2", r.tight2},
      {"tau", std::isnan(r.tau) ? nlohmann::ordered_json(nullptr)
                                : nlohmann::ordered_json(r.tau)},
      {"inapplicable", r.inapplicable},
  };
  std::cout << j.dump(2) << '\n';
  return 0;
}

PoisonMode parse_mode(const std::string& s) {
  if (s == "input") return PoisonMode::input;
  if (s == "response") return PoisonMode::response;
  throw std::invalid_argument("mode must be input or response, got " + s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Locally private degree estimation: protocols, poisoning attacks, "
      "robust consistency checks, and theoretical error bounds."};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand(
      "generate", "Write a seeded Erdos-Renyi graph as an edge list");
  long long gen_n = 0;
  double gen_p = 0.0;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  gen->add_option("--n", gen_n, "number of vertices")->required();
  gen->add_option("--p", gen_p, "edge probability in [0, 1]")->required();
  gen->add_option("--seed", gen_seed, "RNG seed (default 1)");
  gen->add_option("--out", gen_out, "output path (default: stdout)");

  auto* run = app.add_subcommand(
      "run", "Run a seeded protocol/attack experiment and write per-trial "
             "results");
  std::string run_graph, run_protocol, run_attack = "none", run_mode;
  std::string run_out, run_format = "csv";
  double run_eps = 0.0, run_delta = 1e-6, run_c = 0.9, run_b = 1.0;
  int run_m = 0, run_trials = 50;
  std::uint64_t run_seed = 1;
  run->add_option("--graph", run_graph, "er:<n>,<p> or file:<path>")
      ->required();
  run->add_option("--protocol", run_protocol,
                  "naive | check | hybrid | nonprivate | laplace")
      ->required();
  run->add_option("--attack", run_attack,
                  "none | inflate-input | inflate-response | deflate-input | "
                  "deflate-response | thm6-correctness | thm6-soundness");
  run->add_option("--mode", run_mode,
                  "poisoned side: input | response (defaults to the attack's "
                  "side; ignored by thm6-*)")
      ->check(CLI::IsMember({"input", "response"}));
  run->add_option("--eps", run_eps,
                  "privacy budget (required except for nonprivate)");
  run->add_option("--delta", run_delta, "failure probability (default 1e-6)");
  run->add_option("--c", run_c, "hybrid budget split in (0, 1) (default 0.9)");
  run->add_option("--m", run_m, "malicious-user budget = coalition size");
  run->add_option("--b", run_b, "inflation dial (default 1)");
  run->add_option("--trials", run_trials, "repetitions (default 50)");
  run->add_option("--seed", run_seed, "RNG seed (default 1)");
  run->add_option("--out", run_out, "results path (default: stdout)");
  run->add_option("--format", run_format, "csv | json (default csv)")
      ->check(CLI::IsMember({"csv", "json"}));

  auto* bnd = app.add_subcommand(
      "bounds", "Print the closed-form correctness/soundness guarantees as "
                "JSON");
  std::string bnd_protocol, bnd_mode = "response";
  long long bnd_n = 0;
  int bnd_m = 0;
  double bnd_eps = 0.0, bnd_delta = 1e-6, bnd_c = 0.9;
  bnd->add_option("--protocol", bnd_protocol,
                  "naive | check | hybrid | nonprivate | laplace")
      ->required();
  bnd->add_option("--mode", bnd_mode, "input | response (default response)")
      ->check(CLI::IsMember({"input", "response"}));
  bnd->add_option("--n", bnd_n, "number of users")->required();
  bnd->add_option("--m", bnd_m, "malicious-user budget");
  bnd->add_option("--eps", bnd_eps,
                  "privacy budget (required except for nonprivate)");
  bnd->add_option("--delta", bnd_delta, "failure probability (default 1e-6)");
  bnd->add_option("--c", bnd_c, "hybrid budget split (default 0.9)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (gen->parsed()) return cmd_generate(gen_n, gen_p, gen_seed, gen_out);

    if (run->parsed()) {
      ExperimentConfig cfg;
      cfg.graph = GraphSource::parse(run_graph);
      cfg.protocol = degldp::protocol_from_string(run_protocol);
      cfg.attack = degldp::attack_from_string(run_attack);
      const bool audit = cfg.attack == degldp::AttackName::thm6_correctness ||
                         cfg.attack == degldp::AttackName::thm6_soundness;
      if (run->count("--mode") > 0) {
        if (audit)
          std::cerr << "note: --mode is ignored by " << run_attack << '\n';
        else
          cfg.mode = parse_mode(run_mode);
      }
      if (cfg.protocol == Protocol::nonprivate) {
        if (run->count("--eps") > 0)
          std::cerr << "note: --eps is ignored by the non-private protocol\n";
      } else {
        if (run->count("--eps") == 0)
          throw std::invalid_argument(
              "--eps is required for private protocols");
        cfg.privacy.eps = run_eps;
      }
      cfg.privacy.delta = run_delta;
      cfg.privacy.c = run_c;
      cfg.m = run_m;
      cfg.b = run_b;
      cfg.trials = run_trials;
      cfg.seed = run_seed;
      return cmd_run(cfg, run_format, run_out);
    }

    if (bnd->parsed()) {
      const Protocol proto = degldp::protocol_from_string(bnd_protocol);
      if (proto != Protocol::nonprivate && bnd->count("--eps") == 0)
        throw std::invalid_argument("--eps is required for private protocols");
      PrivacyParams params;
      params.eps = bnd->count("--eps") > 0 ? bnd_eps : params.eps;
      params.delta = bnd_delta;
      params.c = bnd_c;
      return cmd_bounds(proto, parse_mode(bnd_mode), bnd_n, bnd_m, params);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
