// hqcsim: command-line front end. See README.md for the config schema.

#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "hqc/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Hybrid quantum-classical moment hierarchy simulator", "hqcsim"};
  app.require_subcommand(1);
  app.set_version_flag("--version", hqc::library_version());

  hqc::RunOptions opt;
  std::uint64_t seed = 0;
  const std::map<std::string, std::string> help = {
      {"trajectory", "integrate one hybrid Ehrenfest microstate"},
      {"ensemble", "propagate a sampled ensemble and estimate moment fields"},
      {"fig1", "first-moment derivative scan over (R, theta)"},
      {"maxent-check", "evaluate the second-moment closure on given first moments"},
      {"evolve-effective", "evolve the closed first-moment field on the grid"},
      {"compare", "effective evolution against the ensemble reference"},
      {"hierarchy-check", "residuals of the moment hierarchy identities"}};
  for (const auto& name : hqc::subcommand_names()) {
    CLI::App* sub = app.add_subcommand(name, help.at(name));
    sub->add_option("--config", opt.config_path, "JSON config or a previous manifest.json")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out_dir, "output directory (overrides output.directory)");
    sub->add_option("--seed", seed, "overrides ensemble.seed");
    sub->add_option("--threads", opt.threads, "worker threads, 0 for all cores")->check(CLI::NonNegativeNumber);
    sub->add_flag("--reproducible", opt.reproducible, "deterministic reductions, bitwise-identical reruns");
    sub->final_callback([&opt, sub, &seed] {
      opt.subcommand = sub->get_name();
      if (sub->count("--seed") > 0) opt.seed = seed;
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return hqc::kExitConfig;
  }

  opt.extra_versions["cli11"] = CLI11_VERSION;
  return hqc::run(opt, std::cout, std::cerr);
}
