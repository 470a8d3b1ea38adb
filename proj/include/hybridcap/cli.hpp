#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hybridcap/capacity.hpp"
#include "hybridcap/noise_params.hpp"
#include "hybridcap/quadrature.hpp"
#include "hybridcap/signal_model.hpp"

namespace hybridcap::cli {

enum class Command { kNoisePdf, kEntropy, kMutualInfo, kCapacity, kSweepMi, kSweepCapacity, kValidate };

std::string_view to_string(Command command);

enum ExitCode : int { kExitOk = 0, kExitNumerical = 1, kExitConfig = 2 };

/// Invalid or inconsistent configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  Command command = Command::kNoisePdf;
  NoiseParams params{};
  TransmitEstimate est{};
  /// Unset means the command default: normalized for sweep-capacity,
  /// paper-literal otherwise.
  std::optional<DensityMode> mode;
  /// Empty or "-" writes to the output stream.
  std::string output_path;
  std::uint64_t seed = 42;
  /// Unset means 2001 for noise-pdf and 65 for sweep-mi.
  std::optional<int> points;
  QuadratureSpec qspec{};
  OptimizerSpec ospec{};
  /// "sigma" or "lambda".
  std::string sweep_var = "sigma";
  /// Unset means 5,10,15,20,25 for sigma and 0,2.5,5,7.5,10 for lambda.
  std::optional<std::vector<double>> values;
  std::size_t samples = 1'000'000;
  std::size_t threads = 1;

  DensityMode effective_mode() const;
  int effective_points() const;
  std::vector<double> effective_values() const;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Parses `hybridcap <command> [flags]`. A `--config file.toml` supplies
/// values that explicit flags override. Throws ConfigError.
RunConfig parse_args(int argc, const char* const* argv);

/// Executes a validated configuration and writes the CSV. Returns an exit code.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Full entry point used by the executable.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Decimal with 12 significant digits.
std::string format_number(double value);

/// The leading `#` metadata line for a configuration.
std::string metadata_line(const RunConfig& config);

}  // namespace hybridcap::cli
