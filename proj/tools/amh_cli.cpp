#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "amh/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Adaptive step-size manifold MALA experiments"};
  app.require_subcommand(1);

  std::string config_path;
  amh::Overrides ov;
  std::uint64_t seed = 0;
  std::size_t iters = 0;
  double gamma = 0.0, eps_bar = 0.0;
  std::string out;
  auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
  run->add_option("config", config_path, "key = value config file")->required();
  auto* o_seed = run->add_option("--seed", seed, "RNG seed");
  auto* o_iters = run->add_option("--iters", iters, "Post burn-in iterations");
  auto* o_gamma = run->add_option("--gamma", gamma, "Largest accepted trial |energy error|");
  auto* o_eps = run->add_option("--eps-bar", eps_bar, "Largest step size");
  auto* o_out = run->add_option("--out", out, "Output directory");

  std::string data_path, schema;
  auto* ingest = app.add_subcommand("ingest-check", "Validate a returns or design CSV file");
  ingest->add_option("path", data_path, "CSV file")->required();
  ingest->add_option("--schema", schema, "returns or design (default: by column count)")
      ->check(CLI::IsMember({"returns", "design"}));

  std::string params, sim_out;
  std::size_t length = 0;
  std::uint64_t sim_seed = 0;
  auto* sim = app.add_subcommand("simulate-garch", "Simulate GARCH(1,1) returns with t innovations");
  sim->add_option("--params", params, "alpha0,alpha1,beta,nu")->required();
  sim->add_option("--T", length, "Series length")->required();
  sim->add_option("--seed", sim_seed, "RNG seed")->required();
  sim->add_option("--out", sim_out, "Output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return amh::cli::config_failure;
  }

  if (*run) {
    if (*o_seed) ov.seed = seed;
    if (*o_iters) ov.iters = iters;
    if (*o_gamma) ov.gamma = gamma;
    if (*o_eps) ov.eps_bar = eps_bar;
    if (*o_out) ov.out = out;
    return amh::cli::run(config_path, ov, std::cout, std::cerr);
  }
  if (*ingest) return amh::cli::ingest_check(data_path, schema, std::cout, std::cerr);
  return amh::cli::simulate_garch(params, length, sim_seed, sim_out, std::cout, std::cerr);
}
