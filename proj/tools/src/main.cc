#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "phdae_cli/commands.h"

int main(int argc, char** argv) {
  using phdae::cli::RunConfig;
  RunConfig cfg;
  CLI::App app{"Goal-oriented time adaptivity for port-Hamiltonian DAEs"};
  app.require_subcommand(1);

  std::optional<int> N, max_iter, max_N, sweeps, N_ref;
  std::optional<double> tol, theta, rho;
  std::optional<std::string> indicator, adjoint;
  std::string out = "out";

  for (const std::string& name : phdae::cli::Commands()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->callback([&cfg, name] { cfg.command = name; });
    sub->add_option("--model", cfg.model, "academic | tline | tline-reg | model.json")
        ->capture_default_str();
    sub->add_option("--out", out, "output directory")->capture_default_str();
    sub->add_option("--threads", cfg.threads, "worker threads (0: PHDAE_THREADS or hardware)");
    sub->add_option("--seed", cfg.seed, "seed for randomized structure checks");
    sub->add_option("--N", N, "initial / uniform number of intervals");
    sub->add_option("--tol", tol, "adaptive tolerance on |sum eta|");
    sub->add_option("--theta", theta, "Dorfler fraction in (0, 1)");
    sub->add_option("--rho", rho, "weight of the Hamiltonian norm term");
    sub->add_option("--max-iter", max_iter, "adaptive iteration limit");
    sub->add_option("--max-N", max_N, "interval count limit");
    sub->add_option("--indicator", indicator, "full | simplified")
        ->check(CLI::IsMember({"full", "simplified"}));
    sub->add_option("--adjoint", adjoint, "direct | jacobi")
        ->check(CLI::IsMember({"direct", "jacobi"}));
    sub->add_option("--sweeps", sweeps, "Jacobi sweeps (0: N)");
    sub->add_option("--N-ref", N_ref, "reference resolution for effectivity");
    sub->add_option("--targets", cfg.targets, "cost-to-target qoi levels")->delimiter(',');
    sub->add_option("--N-list", cfg.N_list, "uniform resolutions for converge")->delimiter(',');
    sub->add_option("--nodes", cfg.nodes, "node indices for waveform")->delimiter(',');
    sub->add_option("--adapt-iter", cfg.adapt_iter,
                    "contraction: adaptive iterations before the report");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : phdae::cli::kExitValidation;
  }
  cfg.out_dir = out;
  cfg.N = N;
  cfg.tol = tol;
  cfg.theta = theta;
  cfg.rho = rho;
  cfg.max_iter = max_iter;
  cfg.max_N = max_N;
  cfg.sweeps = sweeps;
  cfg.N_ref = N_ref;
  cfg.indicator = indicator;
  cfg.adjoint = adjoint;
  return phdae::cli::Run(cfg, std::cout, std::cerr);
}
