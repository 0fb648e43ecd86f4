#include "vprisk_cli/app.hpp"

#include "vprisk_cli/commands.hpp"

#include <vprisk/errors.hpp>

#include <CLI11.hpp>

#include <ostream>

namespace vprisk::cli {

namespace {

struct Flags {
  std::string config;
  std::string out;
  unsigned threads = 0;
  std::optional<std::uint64_t> seed;
};

}  // namespace

int run_app(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Deterministic equivalents of ridge risk under variance-profile designs", "vprisk"};
  app.require_subcommand(1);
  Flags flags;
  const std::vector<std::pair<Command, const char*>> commands = {
      {Command::Profile, "generate a variance profile and its diagnostics"},
      {Command::RiskSweep, "test/train risk over a lambda grid"},
      {Command::Descent, "ridgeless risk over a p/n grid"},
      {Command::Eig, "smallest nonzero sample-covariance eigenvalue over a p/n grid"},
      {Command::Gcv, "GCV and its deterministic equivalent over a lambda grid"}};
  for (const auto& [cmd, help] : commands) {
    CLI::App* sub = app.add_subcommand(to_string(cmd), help);
    sub->add_option("--config", flags.config, "JSON experiment config")->required();
    sub->add_option("--out", flags.out, "output CSV (overrides 'out' in the config)");
    sub->add_option("--threads", flags.threads, "worker threads, 0 = all cores");
    sub->add_option("--seed", flags.seed, "overrides 'seed' in the config");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 1;
  }

  const Command command = parse_command(app.get_subcommands().front()->get_name());
  ExperimentConfig config;
  std::string target;
  try {
    config = load_config(flags.config, command);
    if (flags.seed) config.seed = *flags.seed;
    target = flags.out.empty() ? config.out : flags.out;
    if (target.empty()) throw ConfigError("no output path: give --out or 'out' in the config");
  } catch (const ConfigError& e) {
    err << "vprisk: config error: " << e.what() << '\n';
    return 1;
  }

  try {
    const RunResult r = run_command(config, target, flags.threads);
    err << "vprisk: " << to_string(command) << ": " << r.points << " points, " << r.failed << " failed\n";
    return exit_code(r);
  } catch (const ConfigError& e) {
    err << "vprisk: config error: " << e.what() << '\n';
    return 1;
  } catch (const InvalidArgument& e) {
    err << "vprisk: config error: " << e.what() << '\n';
    return 1;
  } catch (const ParseError& e) {
    err << "vprisk: config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "vprisk: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace vprisk::cli
