// Command-line front end: analytic tables, exact finite-population tables,
// seeded simulation, source estimation, Monte Carlo validation, and the
// exact-rational oracles. Exit codes: 0 success/pass, 1 statistical
// validation failure, 2 usage or input error.

#include <CLI11.hpp>
#include <json.hpp>

#include <rumor_locus/experiment.hpp>
#include <rumor_locus/oracle.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace rumor_locus;
using nlohmann::json;

unsigned env_threads() {
  const char* raw = std::getenv("RUMOR_LOCUS_THREADS");
  if (raw == nullptr || *raw == '\0') return 0;
  char* end = nullptr;
  const unsigned long value = std::strtoul(raw, &end, 10);
  if (end == raw || *end != '\0') {
    throw std::invalid_argument("RUMOR_LOCUS_THREADS must be a positive integer");
  }
  return static_cast<unsigned>(value);
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open output file: " + out_path);
  out << text;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open tree file: " + path);
  return json::parse(in);
}

SimMode parse_mode(const std::string& text) {
  if (text == "uniform") return SimMode::uniform;
  if (text == "clock") return SimMode::clock;
  throw std::invalid_argument("mode must be 'uniform' or 'clock'");
}

std::string format_rows_json(const std::vector<CumulativeRow>& rows) {
  json out = json::array();
  for (const CumulativeRow& row : rows) {
    json entry{{"delta", row.delta}, {"d", row.d},       {"m", row.m},
               {"lower", row.lower}, {"upper", row.upper}};
    if (row.has_exact) entry["exact"] = row.exact;
    out.push_back(std::move(entry));
  }
  return out.dump(2) + "\n";
}

int cmd_analytic(int delta, int dmax, int m, const std::string& format,
                 const std::string& out_path) {
  const std::vector<CumulativeRow> rows = figure_tables({delta}, dmax, m);
  if (format == "json") {
    emit(format_rows_json(rows), out_path);
  } else {
    std::ostringstream csv;
    write_figure_csv(rows, csv);
    emit(csv.str(), out_path);
  }
  return 0;
}

int cmd_exact(long n, int dmax, const std::string& format,
              const std::string& out_path) {
  const DistanceDistribution dist = exact_distribution_delta3(n, dmax);
  if (format == "json") {
    json masses = json::object();
    for (const auto& [d, mass] : dist.masses) {
      masses[std::to_string(d)] = mass;
    }
    emit(json{{"delta", 3}, {"n", n}, {"masses", masses}}.dump(2) + "\n", out_path);
  } else {
    std::ostringstream csv;
    csv << csv_header << '\n';
    for (const auto& [d, mass] : dist.masses) {
      csv << "3," << d << ",,,," << format_double(mass) << ",,,\n";
    }
    emit(csv.str(), out_path);
  }
  return 0;
}

int cmd_simulate(int delta, long n, uint64_t seed, const std::string& mode,
                 const std::string& out_path) {
  RandomStream stream(seed, 0);
  const InfectedTree tree =
      simulate(RegularTreeParams(delta), n, parse_mode(mode), stream);
  emit(to_json(tree).dump(2) + "\n", out_path);
  return 0;
}

int cmd_estimate(const std::string& tree_path, uint64_t seed,
                 const std::string& mode, const std::string& out_path) {
  CentralityMode centrality_mode = CentralityMode::automatic;
  if (mode == "exact") {
    centrality_mode = CentralityMode::exact;
  } else if (mode == "log") {
    centrality_mode = CentralityMode::log_space;
  } else if (mode != "auto") {
    throw std::invalid_argument("mode must be 'auto', 'exact', or 'log'");
  }
  const InfectedTree tree = tree_from_json(load_json_file(tree_path));
  RandomStream stream(seed, 0);
  const NodePath estimate = ml_estimate(tree, stream, centrality_mode);
  const CentralityTable table = rumor_centrality(tree, centrality_mode);

  json node_rows = json::array();
  for (int i = 0; i < static_cast<int>(tree.size()); ++i) {
    json row{{"node", tree.path_of(i).str()}};
    if (table.exact) {
      row["count"] = table.counts[static_cast<size_t>(i)].get_str();
    } else {
      row["log_value"] = table.log_values[static_cast<size_t>(i)];
    }
    node_rows.push_back(std::move(row));
  }
  const CenterClass cls = classify_center(tree, estimate);
  const char* label = cls == CenterClass::strict_center ? "strict"
                      : cls == CenterClass::tie_center  ? "tie"
                                                        : "not";
  json doc{{"estimate", estimate.str()},
           {"distance_to_source", estimate.length()},
           {"classification", label},
           {"n", tree.size()},
           {"tie", table.argmax.size() > 1},
           {"table", std::move(node_rows)}};
  emit(doc.dump(2) + "\n", out_path);
  return 0;
}

int cmd_validate(int delta, long n, long trials, uint64_t seed,
                 const std::string& mode, std::string target, int dmax, int m,
                 const std::string& format, const std::string& out_path) {
  if (target == "auto") target = delta == 3 ? "exact" : "bound";
  DistanceDistribution reference;
  if (target == "exact") {
    if (delta != 3) {
      throw std::invalid_argument("exact targets exist only for --delta 3");
    }
    reference = exact_distribution_delta3(n, std::min(dmax, max_support_delta3(n)));
  } else if (target == "limit") {
    if (delta != 3) {
      throw std::invalid_argument("limit targets exist only for --delta 3");
    }
    reference = limit_distribution_delta3(dmax);
  } else if (target == "bound") {
    reference = bound_distribution(delta, dmax, m);
  } else {
    throw std::invalid_argument("target must be 'auto', 'exact', 'limit', or 'bound'");
  }

  ExperimentConfig config;
  config.params = RegularTreeParams(delta);
  config.n = n;
  config.trials = trials;
  config.master_seed = seed;
  config.mode = parse_mode(mode);

  const auto started = std::chrono::steady_clock::now();
  const DistanceDistribution empirical = run_trials(config, env_threads());
  ComparisonReport report = compare(empirical, reference);
  report.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();

  if (format == "csv") {
    std::ostringstream csv;
    write_comparison_csv(report, delta, target == "bound", m, csv);
    emit(csv.str(), out_path);
  } else {
    json doc = report_to_json(report);
    doc["config"] = {{"delta", delta}, {"n", n},       {"trials", trials},
                     {"seed", seed},   {"mode", mode}, {"target", target}};
    emit(doc.dump(2) + "\n", out_path);
  }
  return report.pass ? 0 : 1;
}

int cmd_oracle(const std::string& kind, int delta, long n, int k, int d,
               const std::string& out_path) {
  const RegularTreeParams params(delta);
  if (kind == "dn") {
    const ExactDistanceDistribution dist =
        exact_distance_dist(params, static_cast<int>(n));
    json doc = json::object();
    for (const auto& [dist_d, mass] : dist.masses) {
      doc[std::to_string(dist_d)] = mass.get_str();
    }
    emit(doc.dump() + "\n", out_path);
  } else if (kind == "urn") {
    const UrnSpec spec = UrnSpec::infection(delta, k, n);
    json doc = json::object();
    for (const auto& [y, p] : exact_urn_dist(spec)) {
      std::string key;
      for (size_t i = 0; i < y.size(); ++i) {
        if (i > 0) key += ',';
        key += std::to_string(y[i]);
      }
      doc[key] = p.get_str();
    }
    emit(doc.dump() + "\n", out_path);
  } else if (kind == "arrival") {
    const Rational value = exact_arrival_prob(params, d, k);
    emit(json{{"value", value.get_str()}}.dump() + "\n", out_path);
  } else {
    throw std::invalid_argument("kind must be 'dn', 'urn', or 'arrival'");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rumor-source analysis on regular trees"};
  app.require_subcommand(1);

  int delta = 3;
  long n = 2;
  long trials = 1;
  uint64_t seed = 0;
  int dmax = 3;
  int exact_dmax = -1;  // full support
  int m = 40;
  int k = 2;
  int d = 1;
  std::string mode = "uniform";
  std::string estimate_mode = "auto";
  std::string format = "csv";
  std::string validate_format = "json";
  std::string target = "auto";
  std::string kind = "dn";
  std::string tree_path;
  std::string out_path;

  CLI::App* analytic = app.add_subcommand(
      "analytic", "cumulative within-distance table: bounds, and exact at degree 3");
  analytic->add_option("--delta", delta, "tree degree (>= 3)")->required();
  analytic->add_option("--dmax", dmax, "largest distance in the table");
  analytic->add_option("--m", m, "series truncation (> dmax)");
  analytic->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
  analytic->add_option("--out", out_path, "output file (default stdout)");

  CLI::App* exact = app.add_subcommand(
      "exact", "exact source-to-estimate distance table at degree 3, finite n");
  exact->add_option("--n", n, "population size (>= 2)")->required();
  exact->add_option("--dmax", exact_dmax, "largest distance (default: full support)");
  exact->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
  exact->add_option("--out", out_path, "output file (default stdout)");

  CLI::App* simulate_cmd =
      app.add_subcommand("simulate", "grow one seeded infection and write it as JSON");
  simulate_cmd->add_option("--delta", delta, "tree degree (>= 3)")->required();
  simulate_cmd->add_option("--n", n, "population size (>= 1)")->required();
  simulate_cmd->add_option("--seed", seed, "random seed")->required();
  simulate_cmd->add_option("--mode", mode)->check(CLI::IsMember({"uniform", "clock"}));
  simulate_cmd->add_option("--out", out_path, "output file (default stdout)");

  CLI::App* estimate =
      app.add_subcommand("estimate", "locate the likeliest source of a saved infection");
  estimate->add_option("--tree", tree_path, "tree JSON file")->required();
  estimate->add_option("--seed", seed, "tie-break seed (default 0)");
  estimate->add_option("--mode", estimate_mode)
      ->check(CLI::IsMember({"auto", "exact", "log"}));
  estimate->add_option("--out", out_path, "output file (default stdout)");

  CLI::App* validate = app.add_subcommand(
      "validate", "sample distances and test them against an analytic target");
  validate->add_option("--delta", delta, "tree degree (>= 3)")->required();
  validate->add_option("--n", n, "population size (>= 2)")->required();
  validate->add_option("--trials", trials, "number of trials")->required();
  validate->add_option("--seed", seed, "master seed")->required();
  validate->add_option("--mode", mode)->check(CLI::IsMember({"uniform", "clock"}));
  validate->add_option("--target", target)
      ->check(CLI::IsMember({"auto", "exact", "limit", "bound"}));
  validate->add_option("--dmax", dmax, "largest compared distance");
  validate->add_option("--m", m, "series truncation for bound targets");
  validate->add_option("--format", validate_format)
      ->check(CLI::IsMember({"csv", "json"}));
  validate->add_option("--out", out_path, "output file (default stdout)");

  CLI::App* oracle =
      app.add_subcommand("oracle", "exact rational ground truth at small scale");
  oracle->add_option("--kind", kind)->check(CLI::IsMember({"dn", "urn", "arrival"}));
  oracle->add_option("--delta", delta, "tree degree (>= 3)")->required();
  oracle->add_option("--n", n, "population size");
  oracle->add_option("--k", k, "infection rank");
  oracle->add_option("--d", d, "distance");
  oracle->add_option("--out", out_path, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& help) {
    return app.exit(help);
  } catch (const CLI::CallForAllHelp& help) {
    return app.exit(help);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return 2;
  }

  try {
    if (*analytic) return cmd_analytic(delta, dmax, m, format, out_path);
    if (*exact) return cmd_exact(n, exact_dmax, format, out_path);
    if (*simulate_cmd) return cmd_simulate(delta, n, seed, mode, out_path);
    if (*estimate) return cmd_estimate(tree_path, seed, estimate_mode, out_path);
    if (*validate) {
      return cmd_validate(delta, n, trials, seed, mode, target, dmax, m,
                          validate_format, out_path);
    }
    if (*oracle) return cmd_oracle(kind, delta, n, k, d, out_path);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 2;
  }
  return 2;
}
