#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "modumech/cli/experiments.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_physics = 3;
constexpr int exit_numeric = 4;

void print_error(const char* type, const std::string& message) {
  nlohmann::json j = {{"error_type", type}, {"message", message}};
  std::fprintf(stderr, "%s\n", j.dump().c_str());
}

std::vector<std::pair<std::string, std::string>> parse_overrides(
    const std::vector<std::string>& sets) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const std::string& s : sets) {
    const size_t eq = s.find('=');
    if (eq == std::string::npos || eq == 0)
      throw modumech::config_error("--set expects key=value, got '" + s + "'");
    out.emplace_back(s.substr(0, eq), s.substr(eq + 1));
  }
  return out;
}

struct CommonOpts {
  std::string config_path;
  std::vector<std::string> sets;
  long long seed = 0;
  std::string out_dir;
  std::string format;
  bool seed_given = false, out_given = false, format_given = false;
};

}  // namespace

int main(int argc, char** argv) {
  using namespace modumech;
  using namespace modumech::cli;

  CLI::App app{"modumech: simulation and control of a modulated electromechanical circuit"};
  app.require_subcommand(1);

  std::map<std::string, CommonOpts> opts;
  std::vector<CLI::App*> subs;
  auto add_common = [&](CLI::App* sub, const std::string& name, bool config_required) {
    CommonOpts& o = opts[name];
    auto* c = sub->add_option("--config", o.config_path, "config file (key = value sections)");
    if (config_required) c->required();
    sub->add_option("--set", o.sets, "override: key=value in the experiment section");
    sub->add_option("--seed", o.seed, "random seed for stochastic experiments");
    sub->add_option("--out", o.out_dir, "output directory");
    sub->add_option("--format", o.format, "table format: csv or json");
  };

  for (const std::string& name : experiment_names()) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
    add_common(sub, name, true);
    subs.push_back(sub);
  }
  CLI::App* val = app.add_subcommand("validate", "schema and physics pre-flight checks");
  add_common(val, "validate", true);
  std::string val_experiment;
  val->add_option("--experiment", val_experiment,
                  "validate a single experiment section (default: all present)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("config", e.what());
    return exit_config;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  CommonOpts& o = opts[name];
  CLI::App* sub = app.get_subcommands().front();
  o.seed_given = sub->count("--seed") > 0;
  o.out_given = sub->count("--out") > 0;
  o.format_given = sub->count("--format") > 0;

  try {
    const ConfigFile file = parse_config_file(o.config_path);
    const auto overrides = parse_overrides(o.sets);

    if (name == "validate") {
      std::vector<std::string> targets;
      if (!val_experiment.empty()) {
        targets.push_back(val_experiment);
      } else {
        for (const std::string& exp : experiment_names())
          if (file.sections.count(exp)) targets.push_back(exp);
      }
      int warnings = 0;
      for (const std::string& exp : targets) {
        RunConfig rc = resolve_config(exp, file, overrides);
        for (const Diagnostic& d : validate_config(rc)) {
          std::printf("%s: %s: %s\n", exp.c_str(), d.severity.c_str(), d.message.c_str());
          ++warnings;
        }
      }
      if (warnings == 0) std::printf("ok: %zu experiment section(s) valid\n", targets.size());
      return exit_ok;
    }

    RunConfig rc = resolve_config(name, file, overrides);
    if (o.seed_given) rc.seed = o.seed;
    if (o.out_given) rc.output_dir = o.out_dir;
    if (o.format_given) rc.format = o.format;

    const RunResult res = run_experiment(rc);
    for (const Diagnostic& d : res.diagnostics)
      std::fprintf(stderr, "%s: %s\n", d.severity.c_str(), d.message.c_str());
    for (const std::string& f : res.outputs) std::printf("wrote %s/%s\n", rc.output_dir.c_str(), f.c_str());
    std::printf("wrote %s/manifest.json\n", rc.output_dir.c_str());
    return exit_ok;
  } catch (const config_error& e) {
    print_error("config", e.what());
    return exit_config;
  } catch (const truncation_error& e) {
    print_error("physics", e.what());
    return exit_physics;
  } catch (const branch_error& e) {
    print_error("physics", e.what());
    return exit_physics;
  } catch (const convergence_error& e) {
    print_error("numeric", e.what());
    return exit_numeric;
  } catch (const std::exception& e) {
    print_error("numeric", e.what());
    return exit_numeric;
  }
}
