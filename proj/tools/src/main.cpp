#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "commands.hpp"
#include "polar_tails/errors.hpp"

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfigError = 2, kNumericError = 3 };

}  // namespace

int main(int argc, char** argv) {
  using namespace polar::cli;

  CLI::App app{"Exact and asymptotic tail probabilities for polar random vectors"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;

  using Command = std::function<int(const Config&, const RunOptions&, std::ostream&)>;
  auto wrap = [](void (*fn)(const Config&, const RunOptions&, std::ostream&)) -> Command {
    return [fn](const Config& c, const RunOptions& o, std::ostream& out) {
      fn(c, o, out);
      return 0;
    };
  };
  const std::vector<std::tuple<std::string, std::string, Command>> commands = {
      {"tail-table", "Exact P(X > u) against its first-order approximations", wrap(cmd_tail_table)},
      {"cond-cdf", "Exact P(Y <= y | X > u) against the limit law", wrap(cmd_cond_cdf)},
      {"simulate", "Draw a Monte Carlo sample of (X, Y)", wrap(cmd_simulate)},
      {"estimate", "Fit rho, w(u) and delta to a sample CSV", wrap(cmd_estimate)},
      {"validate", "Check the model invariants", cmd_validate},
  };

  Command selected;
  for (const auto& [name, help, fn] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "Experiment config (key = value)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_path, "Output CSV (default: stdout)");
    sub->add_option("--seed", seed, "RNG seed, overrides the config");
    sub->callback([&selected, fn = fn] { selected = fn; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    RunOptions options;
    options.seed = seed;
    options.threads = threads_from_env();
    const Config config = Config::load(config_path);

    // Build the whole output first so a failing command never leaves a partial file.
    std::ostringstream buffer;
    const int failures = selected(config, options, buffer);
    if (out_path.empty()) {
      std::cout << buffer.str();
    } else {
      std::ofstream out(out_path);
      if (!out) throw polar::ConfigError("cannot write " + out_path);
      out << buffer.str();
    }
    return failures == 0 ? kOk : kFailure;
  } catch (const polar::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << " (achieved error " << e.achieved_error() << ")\n";
    return kNumericError;
  } catch (const polar::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kConfigError;
  } catch (const polar::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::domain_error& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}
