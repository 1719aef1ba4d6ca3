#ifndef SPAD_CLI_HPP_
#define SPAD_CLI_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>

#include "spad/config.hpp"
#include "spad/reconstruction.hpp"

namespace spad::cli {

namespace fs = std::filesystem;

struct CommonArgs {
  std::optional<fs::path> config;
  std::optional<std::uint64_t> seed;
  std::optional<double> lux;
};

struct SimulateArgs : CommonArgs {
  fs::path image;
  fs::path out;
  std::optional<std::size_t> fixed_count;
};

struct MleArgs {
  fs::path events;
  fs::path out;
};

struct VerifyArgs : CommonArgs {
  bool inject_cdf_fault = false;
};

struct ReconstructArgs : CommonArgs {
  fs::path events;
  std::string prior;
  fs::path out;
  std::optional<fs::path> reference;
};

// Each command returns the process exit code and reports on `out`/`err`.
int simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err);
int mle(const MleArgs& args, std::ostream& out, std::ostream& err);
int verify(const VerifyArgs& args, std::ostream& out, std::ostream& err);
int reconstruct(const ReconstructArgs& args, std::ostream& out, std::ostream& err);

RunConfig load_config(const CommonArgs& args);

// gaussian:MEAN,STD | smooth:WEIGHT | remote:ADDRESS
std::unique_ptr<PriorScore> make_prior(const std::string& spec,
                                       const ScheduleSet& schedule);

// Sidecar path next to `out` with the given suffix, e.g. out.pgm -> out.csv.
fs::path sidecar(const fs::path& out, const std::string& suffix);

}  // namespace spad::cli

#endif  // SPAD_CLI_HPP_
