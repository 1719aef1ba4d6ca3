#include <cstdlib>
#include <iostream>
#include <string>

#include <omp.h>

#include "CLI11.hpp"
#include "spad/cli.hpp"

namespace {

void cap_threads() {
  const char* env = std::getenv("SPAD_THREADS");
  if (env == nullptr) return;
  try {
    const int n = std::stoi(env);
    if (n > 0) omp_set_num_threads(n);
  } catch (const std::exception&) {
    std::cerr << "spad: ignoring SPAD_THREADS=" << env << '\n';
  }
}

template <typename Args>
void common_options(CLI::App* cmd, Args& args) {
  cmd->add_option("--config", args.config, "Key=value run configuration file")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", args.seed, "Master RNG seed");
  cmd->add_option("--lux", args.lux, "Reference illuminance for a white pixel");
}

}  // namespace

int main(int argc, char** argv) {
  cap_threads();
  CLI::App app{"SPAD photon-event simulation and reconstruction"};
  app.require_subcommand(1);

  spad::cli::SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Simulate event streams from a PGM");
  simulate->add_option("image", sim.image, "Input PGM (P5, 8 or 16 bit)")
      ->required()->check(CLI::ExistingFile);
  common_options(simulate, sim);
  simulate->add_option("--fixed-count", sim.fixed_count,
                       "Record exactly N detections per pixel");
  simulate->add_option("--out", sim.out, "Output event file")->required();

  spad::cli::MleArgs mle;
  auto* mle_cmd = app.add_subcommand("mle", "Per-pixel maximum-likelihood flux");
  mle_cmd->add_option("events", mle.events, "Event file")->required()
      ->check(CLI::ExistingFile);
  mle_cmd->add_option("--out", mle.out, "Output PGM (a .csv sidecar is written)")
      ->required();

  spad::cli::VerifyArgs ver;
  auto* verify = app.add_subcommand("verify", "Self-checks of the event model");
  common_options(verify, ver);
  std::string fault;
  verify->add_option("--inject-fault", fault)->group("")->check(CLI::IsMember({"cdf"}));

  spad::cli::ReconstructArgs rec;
  auto* reconstruct = app.add_subcommand("reconstruct", "Diffusion posterior sampling");
  reconstruct->add_option("events", rec.events, "Event file")->required()
      ->check(CLI::ExistingFile);
  reconstruct->add_option("--prior", rec.prior,
                          "gaussian:MEAN,STD | smooth:WEIGHT | remote:ADDRESS")
      ->required();
  common_options(reconstruct, rec);
  reconstruct->add_option("--out", rec.out, "Output PGM")->required();
  reconstruct->add_option("--reference", rec.reference, "Ground-truth PGM for PSNR")
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  if (*simulate) return spad::cli::simulate(sim, std::cout, std::cerr);
  if (*mle_cmd) return spad::cli::mle(mle, std::cout, std::cerr);
  if (*verify) {
    ver.inject_cdf_fault = fault == "cdf";
    return spad::cli::verify(ver, std::cout, std::cerr);
  }
  return spad::cli::reconstruct(rec, std::cout, std::cerr);
}
