#include "distloc/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "distloc/analysis.hpp"
#include "distloc/io.hpp"
#include "distloc/random.hpp"

namespace distloc::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string join(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) out += (out.empty() ? "" : ", ") + w;
  return out;
}

Mechanism mechanism_or_usage(const std::string& spec) {
  try {
    return parse_mechanism_spec(spec);
  } catch (const MechanismError& e) {
    throw UsageError(std::string(e.what()) + "\nvalid mechanisms: " +
                     join(mechanism_vocabulary()));
  }
}

Objective objective_or_usage(const std::string& name) {
  if (auto objective = parse_objective(name)) return *objective;
  std::vector<std::string> names;
  for (Objective o : all_objectives()) names.emplace_back(to_string(o));
  throw UsageError("unknown objective '" + name + "'\nvalid objectives: " + join(names));
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("DISTLOC_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::logic_error&) {
      throw UsageError("DISTLOC_SEED must be a non-negative integer");
    }
  }
  return 0;
}

void emit(const std::string& text, const std::string& output_path, std::ostream& out) {
  if (output_path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(output_path);
  if (!file) throw UsageError("cannot write output file '" + output_path + "'");
  file << text;
}

std::string dump(const nlohmann::json& doc) { return doc.dump(2) + "\n"; }

std::string csv_line(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + cells[i];
  return out + "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Distributed facility location on the line: mechanisms, distortion, "
               "worst-case search and strategyproofness audits",
               "distloc"};
  app.require_subcommand(1);

  std::string instance_path;
  std::string mechanism_spec;
  std::string objective_name;
  std::string output_path;
  std::string format;
  std::uint64_t seed = 0;
  std::size_t trials = 20000;
  std::size_t refine_steps = 500;
  std::size_t k_max = 6;
  std::size_t lambda_max = 4;
  unsigned threads = 0;
  bool no_families = false;
  std::vector<CLI::Option*> seed_options;

  auto add_output = [&](CLI::App* cmd) {
    cmd->add_option("--output,-o", output_path, "Write results here instead of stdout");
  };
  auto add_format = [&](CLI::App* cmd, const std::string& fallback) {
    cmd->add_option("--format", format, "Output format (" + fallback + " by default)")
        ->check(CLI::IsMember({"csv", "json"}));
  };
  auto add_budget = [&](CLI::App* cmd) {
    seed_options.push_back(
        cmd->add_option("--seed", seed, "Random seed (default: $DISTLOC_SEED or 0)"));
    cmd->add_option("--trials", trials, "Random instances per (k, lambda) cell")
        ->capture_default_str();
    cmd->add_option("--refine-steps", refine_steps, "Hill-climbing steps per incumbent")
        ->capture_default_str();
    cmd->add_option("--k-max", k_max, "Largest district count searched")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--lambda-max", lambda_max, "Largest district size searched")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--threads", threads, "Worker threads (0 = all cores)");
  };

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Run a mechanism on an instance");
  evaluate_cmd->add_option("--instance", instance_path, "Instance JSON file")->required();
  evaluate_cmd->add_option("--mechanism", mechanism_spec, "Mechanism spec")->required();
  evaluate_cmd->add_option("--objective", objective_name, "Social objective")->required();
  add_format(evaluate_cmd, "json");
  add_output(evaluate_cmd);

  auto* search_cmd = app.add_subcommand("search", "Search for high-distortion instances");
  search_cmd->add_option("--mechanism", mechanism_spec, "Mechanism spec")->required();
  search_cmd->add_option("--objective", objective_name, "Social objective")->required();
  add_budget(search_cmd);
  search_cmd->add_flag("--no-families", no_families, "Skip the structured families");
  add_format(search_cmd, "json");
  add_output(search_cmd);

  std::size_t audit_instances = 200;
  std::size_t audit_k = 3;
  std::size_t audit_lambda = 3;
  double tolerance = 1e-9;
  auto* audit_cmd = app.add_subcommand(
      "sp-audit", "Look for a profitable misreport on one instance or on random ones");
  audit_cmd->add_option("--mechanism", mechanism_spec, "Mechanism spec")->required();
  auto* audit_instance =
      audit_cmd->add_option("--instance", instance_path, "Instance JSON file");
  audit_cmd->add_option("--instances", audit_instances, "Random instances to audit")
      ->capture_default_str()
      ->excludes(audit_instance);
  audit_cmd->add_option("--k", audit_k, "Districts per random instance")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  audit_cmd->add_option("--lambda", audit_lambda, "Agents per district")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  seed_options.push_back(
      audit_cmd->add_option("--seed", seed, "Random seed (default: $DISTLOC_SEED or 0)"));
  audit_cmd->add_option("--tolerance", tolerance, "Strict-improvement margin")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  add_format(audit_cmd, "json");
  add_output(audit_cmd);

  auto* table_cmd =
      app.add_subcommand("reproduce-table", "Check every mechanism against its tight bound");
  add_budget(table_cmd);
  add_format(table_cmd, "csv");
  add_output(table_cmd);

  std::string family_name;
  std::vector<std::string> family_params;
  auto* family_cmd = app.add_subcommand("build-family", "Emit a structured instance");
  family_cmd->add_option("--family", family_name, "Family name")->required();
  family_cmd->add_option("--param", family_params, "Family parameter key=value")
      ->take_all();
  add_output(family_cmd);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    const bool seed_given = std::any_of(seed_options.begin(), seed_options.end(),
                                        [](const CLI::Option* o) { return o->count() > 0; });
    if (!seed_given) seed = default_seed();

    if (evaluate_cmd->parsed()) {
      const Mechanism mechanism = mechanism_or_usage(mechanism_spec);
      const Objective objective = objective_or_usage(objective_name);
      const Instance instance = io::read_instance(instance_path);
      const EvaluationReport report = evaluate(mechanism, objective, instance);
      if (format == "csv") {
        std::string text = "mechanism,objective,winner,winner_cost,optimal_location,"
                           "optimal_cost,distortion\n";
        text += csv_line({report.mechanism, std::string(to_string(objective)),
                          io::format_number(report.winner),
                          io::format_number(report.winner_cost),
                          io::format_number(report.optimum.location),
                          io::format_number(report.optimum.cost),
                          report.distortion.is_unbounded()
                              ? "unbounded"
                              : io::format_number(report.distortion.value())});
        emit(text, output_path, out);
      } else {
        emit(dump(io::report_to_json(report)), output_path, out);
      }
      return kOk;
    }

    if (search_cmd->parsed()) {
      const Mechanism mechanism = mechanism_or_usage(mechanism_spec);
      const Objective objective = objective_or_usage(objective_name);
      SearchConfig config;
      config.k_max = k_max;
      config.lambda_max = lambda_max;
      config.trials = trials;
      config.seed = seed;
      config.refine_steps = refine_steps;
      config.include_families = !no_families;
      config.threads = threads;
      const SearchResult result = search_worst_case(mechanism, objective, config);
      if (format == "csv") {
        std::string text = "mechanism,objective,best_distortion,trials,seed,origin\n";
        text += csv_line({mechanism.name, std::string(to_string(objective)),
                          io::format_number(result.best_distortion),
                          std::to_string(result.trials), std::to_string(result.seed),
                          result.origin});
        emit(text, output_path, out);
      } else {
        emit(dump(io::search_to_json(mechanism.name, objective, result)), output_path, out);
      }
      return kOk;
    }

    if (audit_cmd->parsed()) {
      const Mechanism mechanism = mechanism_or_usage(mechanism_spec);
      std::vector<Instance> instances;
      if (!instance_path.empty()) {
        instances.push_back(io::read_instance(instance_path));
      } else {
        for (std::size_t i = 0; i < audit_instances; ++i) {
          auto engine = make_engine({seed, i});
          const PositionLaw law = i % 2 == 0 ? PositionLaw(UniformLaw{0.0, 1.0})
                                             : PositionLaw(ClusteredLaw{3, 0.0, 1.0, 0.0});
          instances.push_back(generate_random(audit_k, audit_lambda, law, engine()));
        }
      }
      std::optional<Manipulation> found;
      std::size_t checked = 0;
      const Instance* witness = nullptr;
      for (const Instance& instance : instances) {
        ++checked;
        found = audit_strategyproofness(mechanism, instance, tolerance);
        if (found) {
          witness = &instance;
          break;
        }
      }
      if (format == "csv") {
        std::string text = "mechanism,complete,instances_checked,agent,true_position,"
                           "misreport,honest_cost,deviating_cost\n";
        std::vector<std::string> cells = {mechanism.name,
                                          mechanism.is_statistic() ? "true" : "false",
                                          std::to_string(checked)};
        if (found) {
          cells.push_back(std::to_string(found->agent));
          for (double v : {found->true_position, found->misreport, found->honest_cost,
                           found->deviating_cost}) {
            cells.push_back(io::format_number(v));
          }
        } else {
          cells.insert(cells.end(), 5, "");
        }
        emit(text + csv_line(cells), output_path, out);
      } else {
        nlohmann::json doc = {{"mechanism", mechanism.name},
                              {"complete", mechanism.is_statistic()},
                              {"instances_checked", checked},
                              {"manipulation", io::manipulation_to_json(found)}};
        if (witness) doc["instance"] = io::instance_to_json(*witness);
        emit(dump(doc), output_path, out);
      }
      return kOk;
    }

    if (table_cmd->parsed()) {
      TableConfig config;
      config.k_max = k_max;
      config.lambda_max = lambda_max;
      config.trials = trials;
      config.seed = seed;
      config.refine_steps = refine_steps;
      config.threads = threads;
      const std::vector<TableRow> rows = reproduce_table(config);
      if (format == "json") {
        emit(dump(io::table_to_json(rows)), output_path, out);
      } else {
        std::ostringstream text;
        io::write_table_csv(text, rows);
        emit(text.str(), output_path, out);
      }
      const bool all_pass =
          std::all_of(rows.begin(), rows.end(), [](const TableRow& r) { return r.pass; });
      return all_pass ? kOk : kTableFailure;
    }

    if (family_cmd->parsed()) {
      const auto& names = family_names();
      if (std::find(names.begin(), names.end(), family_name) == names.end()) {
        throw UsageError("unknown family '" + family_name + "'\nvalid families: " +
                         join(names));
      }
      InstanceFamily family{family_name, {}};
      for (const std::string& p : family_params) {
        const auto eq = p.find('=');
        if (eq == std::string::npos) throw UsageError("--param expects key=value, got " + p);
        try {
          family.params[p.substr(0, eq)] = std::stod(p.substr(eq + 1));
        } catch (const std::logic_error&) {
          throw UsageError("--param value must be a number, got " + p);
        }
      }
      emit(dump(io::instance_to_json(build_family(family))), output_path, out);
      return kOk;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    // Bad instance data, out-of-domain family parameters, ranks that do
    // not fit the instance.
    err << "error: " << e.what() << "\n";
    return kValidationFailure;
  }
  return kUsageError;
}

}  // namespace distloc::cli
