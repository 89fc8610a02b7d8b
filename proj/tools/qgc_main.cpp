// qgc — config-driven studies of bilinear control on quantum graphs.
//
//   qgc run  <config>   run a scenario (file path or bundled name)
//   qgc audit <config>  assumption checks only
//   qgc list            catalog of bundled scenarios
//
// Exit codes: 0 all checks pass, 1 a check failed or a run error occurred,
// 2 configuration error.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "qgc/config.hpp"
#include "qgc/core.hpp"
#include "qgc/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"bilinear control studies on quantum graphs"};
  app.require_subcommand(1);

  std::string run_ref, audit_ref, out_dir;
  long long seed = 0;
  bool json = false;

  auto* run = app.add_subcommand("run", "run a scenario config");
  run->add_option("config", run_ref, "config file or bundled scenario name")->required();
  auto* audit = app.add_subcommand("audit", "run only the assumption checks of a config");
  audit->add_option("config", audit_ref, "config file or bundled scenario name")->required();
  auto* list = app.add_subcommand("list", "list the bundled scenarios");

  for (auto* sub : {run, audit}) {
    sub->add_option("--out", out_dir, "output directory (overrides the config)");
    sub->add_option("--seed", seed, "random seed (overrides the config)");
    sub->add_flag("--json", json, "machine-readable result on stdout");
  }
  list->add_flag("--json", json, "machine-readable catalog");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (list->parsed()) {
      const auto cat = qgc::list_scenarios();
      std::cout << (json ? qgc::render_catalog_json(cat) : qgc::render_catalog_text(cat));
      return 0;
    }
    qgc::ScenarioOptions opt;
    const CLI::App* sub = run->parsed() ? static_cast<CLI::App*>(run) : audit;
    if (sub->count("--out")) opt.out_dir = out_dir;
    if (sub->count("--seed")) opt.seed = seed;

    const qgc::Config cfg =
        qgc::load_scenario_config(run->parsed() ? run_ref : audit_ref);
    const qgc::ScenarioResult result =
        run->parsed() ? qgc::run_scenario(cfg, opt) : qgc::run_audit(cfg, opt);
    std::cout << (json ? qgc::render_json(result) : qgc::render_text(result));
    return result.exit_code();
  } catch (const qgc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
