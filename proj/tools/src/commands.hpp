#pragma once

// The CLI subcommands as library functions; each writes its manifest line and CSV body to `out`.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "config.hpp"

namespace polar::cli {

struct RunOptions {
  std::optional<std::uint64_t> seed;  ///< --seed; overrides the config's `seed`
  unsigned threads = 0;               ///< 0 = hardware concurrency
};

inline constexpr std::uint64_t kDefaultSeed = 1;

/// Parses POLAR_TAILS_THREADS (unset or empty -> 0). Throws ConfigError on garbage.
unsigned threads_from_env();

std::string version();
void write_manifest(std::ostream& out, const std::string& model_hash, std::uint64_t seed);

/// Columns u,t,exact,thm1,thm3_default,thm3_strict,ratio_thm1,ratio_thm3.
void cmd_tail_table(const Config& config, const RunOptions& options, std::ostream& out);
/// Columns u,y,exact,limit,second_order,err_limit,err_2nd over u_grid x (y_grid or z_grid).
void cmd_cond_cdf(const Config& config, const RunOptions& options, std::ostream& out);
/// `x,y` rows of a Monte Carlo batch of size n.
void cmd_simulate(const Config& config, const RunOptions& options, std::ostream& out);
/// Estimator report (`key=value` lines) for the CSV named by `input`.
void cmd_estimate(const Config& config, const RunOptions& options, std::ostream& out);
/// Runs the model invariant suite; columns check,passed,value,limit. Returns the failure count.
int cmd_validate(const Config& config, const RunOptions& options, std::ostream& out);

}  // namespace polar::cli
