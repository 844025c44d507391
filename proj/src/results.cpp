#include <cmath>
#include <ostream>
#include <string>

#include <json.hpp>

#include "degldp/harness.hpp"
#include "format_util.hpp"

namespace degldp {

namespace {

using detail::format_double;
using ordered_json = nlohmann::ordered_json;

bool inflating(AttackName a) {
  return a == AttackName::inflate_input || a == AttackName::inflate_response;
}

bool deflating(AttackName a) {
  return a == AttackName::deflate_input || a == AttackName::deflate_response;
}

bool audit(AttackName a) {
  return a == AttackName::thm6_correctness || a == AttackName::thm6_soundness;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char ch : s) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  quoted += '"';
  return quoted;
}

// Shared per-run fields, with structurally inapplicable ones left empty:
// eps/delta mean nothing to the non-private audit, c only splits the hybrid
// budget, tau exists only for the checking protocols, b only dials
// inflation, and the audit attacks have no input/response side.
struct ConfigFields {
  std::string protocol, attack, mode, p_or_file, eps, delta, c, b, tau;
};

ConfigFields config_fields(const ExperimentResult& result) {
  const ExperimentConfig& cfg = result.config;
  ConfigFields f;
  f.protocol = to_string(cfg.protocol);
  f.attack = to_string(cfg.attack);
  if (!audit(cfg.attack)) f.mode = to_string(cfg.effective_mode());
  f.p_or_file = cfg.graph.kind == GraphSource::Kind::er
                    ? format_double(cfg.graph.p)
                    : cfg.graph.path;
  if (cfg.protocol != Protocol::nonprivate) {
    f.eps = format_double(cfg.privacy.eps);
    f.delta = format_double(cfg.privacy.delta);
  }
  if (cfg.protocol == Protocol::hybrid) f.c = format_double(cfg.privacy.c);
  if (inflating(cfg.attack)) f.b = format_double(cfg.b);
  if (!std::isnan(result.tau)) f.tau = format_double(result.tau);
  return f;
}

ordered_json json_or_null(bool present, const std::string& value) {
  return present ? ordered_json(value) : ordered_json(nullptr);
}

ordered_json json_or_null(bool present, double value) {
  return present ? ordered_json(value) : ordered_json(nullptr);
}

ordered_json stats_json(const MetricStats& s) {
  return ordered_json{{"mean", s.mean}, {"sd", s.sd}, {"se", s.se}};
}

}  // namespace

void write_csv(std::ostream& out, const ExperimentResult& result) {
  const ExperimentConfig& cfg = result.config;
  const ConfigFields f = config_fields(result);
  out << "trial,protocol,attack,mode,n,p_or_file,eps,delta,c,m,b,tau,"
         "honest_max_err,honest_bottom,malicious_max_err,malicious_bottom,"
         "target_err,target_bottom,d95,d95_minus_d80,bound_alpha1,"
         "bound_alpha2,seed\n";
  const std::string shared_prefix =
      csv_field(f.protocol) + ',' + csv_field(f.attack) + ',' +
      csv_field(f.mode) + ',' + std::to_string(result.n) + ',' +
      csv_field(f.p_or_file) + ',' + f.eps + ',' + f.delta + ',' + f.c + ',' +
      std::to_string(cfg.m) + ',' + f.b + ',' + f.tau;
  const std::string shared_suffix =
      std::to_string(result.d95) + ',' +
      std::to_string(result.d95 - result.d80) + ',' +
      format_double(result.bound.alpha1) + ',' +
      format_double(result.bound.alpha2) + ',' + std::to_string(cfg.seed);
  for (const TrialRecord& rec : result.records) {
    const TrialMetrics& mt = rec.metrics;
    out << mt.trial << ',' << shared_prefix << ','
        << format_double(mt.honest_max_err) << ',' << mt.honest_bottom << ','
        << format_double(mt.malicious_max_err) << ',' << mt.malicious_bottom
        << ',' << format_double(mt.target_err) << ',' << mt.target_bottom
        << ',' << shared_suffix << '\n';
  }
}

void write_json(std::ostream& out, const ExperimentResult& result) {
  const ExperimentConfig& cfg = result.config;
  const ConfigFields f = config_fields(result);
  const bool private_proto = cfg.protocol != Protocol::nonprivate;
  const bool targeted = inflating(cfg.attack) || deflating(cfg.attack);

  ordered_json root;
  root["config"] = ordered_json{
      {"graph", cfg.graph.spec_string()},
      {"protocol", f.protocol},
      {"attack", f.attack},
      {"mode", json_or_null(!audit(cfg.attack), f.mode)},
      {"eps", json_or_null(private_proto, cfg.privacy.eps)},
      {"delta", json_or_null(private_proto, cfg.privacy.delta)},
      {"c", json_or_null(cfg.protocol == Protocol::hybrid, cfg.privacy.c)},
      {"m", cfg.m},
      {"b", json_or_null(inflating(cfg.attack), cfg.b)},
      {"trials", cfg.trials},
      {"seed", cfg.seed},
      {"target_rule",
       json_or_null(targeted, to_string(cfg.effective_target_rule()))},
      {"zero_noise", cfg.zero_noise},
  };
  root["n"] = result.n;
  root["d95"] = result.d95;
  root["d80"] = result.d80;
  root["malicious"] = result.malicious;
  root["target"] =
      result.target >= 0 ? ordered_json(result.target) : ordered_json(nullptr);
  root["tau"] = json_or_null(!std::isnan(result.tau), result.tau);
  root["sample_capped"] = result.sample_capped;
  root["bound"] = ordered_json{
      {"alpha1", result.bound.alpha1},
      {"delta1", result.bound.delta1},
      {"tight1", result.bound.tight1},
      {"alpha2", result.bound.alpha2},
      {"delta2", result.bound.delta2},
      {"tight2", result.bound.tight2},
      {"tau", json_or_null(!std::isnan(result.bound.tau), result.bound.tau)},
      {"inapplicable", result.bound.inapplicable},
  };
  root["records"] = ordered_json::array();
  for (const TrialRecord& rec : result.records) {
    const TrialMetrics& mt = rec.metrics;
    root["records"].push_back(ordered_json{
        {"trial", mt.trial},
        {"honest_max_err", mt.honest_max_err},
        {"honest_bottom", mt.honest_bottom},
        {"malicious_max_err", mt.malicious_max_err},
        {"malicious_bottom", mt.malicious_bottom},
        {"target_err", mt.target_err},
        {"target_bottom", mt.target_bottom},
    });
  }
  ordered_json probes = ordered_json::array();
  for (const ProbeResult& pr : result.summary.probes)
    probes.push_back(ordered_json{{"kind", to_string(pr.probe.kind)},
                                  {"alpha", pr.probe.alpha},
                                  {"rate", pr.rate}});
  root["summary"] = ordered_json{
      {"honest_max_err", stats_json(result.summary.honest_max_err)},
      {"malicious_max_err", stats_json(result.summary.malicious_max_err)},
      {"target_err", stats_json(result.summary.target_err)},
      {"honest_bottom_mean", result.summary.honest_bottom_mean},
      {"malicious_bottom_mean", result.summary.malicious_bottom_mean},
      {"target_bottom_rate", result.summary.target_bottom_rate},
      {"probes", probes},
  };
  out << root.dump(2) << '\n';
}

std::string effective_config_line(const ExperimentConfig& cfg) {
  std::string line = "--graph " + cfg.graph.spec_string();
  line += std::string(" --protocol ") + to_string(cfg.protocol);
  line += std::string(" --attack ") + to_string(cfg.attack);
  if (!audit(cfg.attack))
    line += std::string(" --mode ") + to_string(cfg.effective_mode());
  if (cfg.protocol != Protocol::nonprivate) {
    line += " --eps " + format_double(cfg.privacy.eps);
    line += " --delta " + format_double(cfg.privacy.delta);
  }
  if (cfg.protocol == Protocol::hybrid)
    line += " --c " + format_double(cfg.privacy.c);
  line += " --m " + std::to_string(cfg.m);
  if (inflating(cfg.attack)) line += " --b " + format_double(cfg.b);
  line += " --trials " + std::to_string(cfg.trials);
  line += " --seed " + std::to_string(cfg.seed);
  return line;
}

}  // namespace degldp
