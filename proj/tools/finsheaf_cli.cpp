#include <iostream>

#include <CLI11.hpp>

#include "finsheaf/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Sheaves, vector sheaves and Grassmann sheaves on finite spaces"};
  finsheaf::RunConfig config;
  std::string command;
  app.add_option("command", command, "What to run")
      ->required()
      ->check(CLI::IsMember(finsheaf::command_names()));
  app.add_option("--space", config.space, "Finite space (JSON)");
  app.add_option("--ring", config.ring, "Coefficient ring of the constant structure sheaf (JSON)");
  app.add_option("--presheaf", config.presheaf, "Presheaf (JSON)");
  app.add_option("--cocycle", config.cocycle, "Transition cocycle (JSON)");
  app.add_option("--weights", config.weights, "Weight family (JSON)");
  app.add_option("--map", config.map, "Continuous map into the space, for pullback (JSON)");
  app.add_option("--algebras", config.algebras, "A0, A1 and rho for demo-counterexample (JSON)");
  app.add_option("-k", config.k, "Subsheaf rank");
  app.add_option("-n", config.n, "Ambient rank");
  app.add_option("-N", config.N, "Truncation rank of the universal Grassmann sheaf");
  app.add_option("--budget", config.budget, "Search step limit")->capture_default_str();
  app.add_option("--out", config.out, "Write the report here instead of stdout");
  CLI11_PARSE(app, argc, argv);
  config.command = *finsheaf::parse_command(command);
  return finsheaf::run(config, std::cout, std::cerr);
}
