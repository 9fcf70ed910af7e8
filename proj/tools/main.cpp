#include <cstdint>
#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "evbma/commands.hpp"
#include "evbma/version.hpp"

namespace {

struct Cli {
  std::string config_path;
  std::string out_dir;
  std::optional<int> parallelism;
  std::optional<std::uint64_t> seed;
  std::optional<int> replications;
  std::string suite = "all";
  std::string kind;

  evbma::CommandOptions options() const { return {out_dir, parallelism, seed, replications}; }
};

void add_run_flags(CLI::App* sub, Cli& cli) {
  sub->add_option("--out", cli.out_dir, "Output directory (default: config output_dir)");
  sub->add_option("--parallelism", cli.parallelism, "Worker threads for replications");
  sub->add_option("--seed", cli.seed, "Base seed override");
  sub->add_option("--reps", cli.replications, "Replication count override");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evidence-weighted treatment-effect simulator"};
  app.set_version_flag("--version", std::string(evbma::kVersion));
  app.require_subcommand(1);
  Cli cli;

  CLI::App* simulate = app.add_subcommand("simulate", "Run the design points in a config");
  simulate->add_option("--config", cli.config_path, "JSON run configuration")
      ->required();
  add_run_flags(simulate, cli);

  CLI::App* reproduce =
      app.add_subcommand("reproduce", "Rerun the built-in benchmark grid");
  reproduce->add_option("suite", cli.suite, "table1 | figures | all")
      ->check(CLI::IsMember({"table1", "figures", "all"}));
  add_run_flags(reproduce, cli);

  CLI::App* diagnose = app.add_subcommand("diagnose", "Fit rate/decay checks or policy checks");
  diagnose->add_option("kind", cli.kind, "rates | decay | divergence | pac")
      ->required()
      ->check(CLI::IsMember({"rates", "decay", "divergence", "pac"}));
  diagnose->add_option("--config", cli.config_path, "JSON run configuration")->required();
  add_run_flags(diagnose, cli);

  CLI::App* validate =
      app.add_subcommand("validate-config", "Parse and expand a config, report problems");
  validate->add_option("--config", cli.config_path, "JSON run configuration")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (simulate->parsed()) {
      evbma::cmd_simulate(cli.config_path, cli.options());
    } else if (reproduce->parsed()) {
      evbma::cmd_reproduce(cli.suite, cli.options());
    } else if (diagnose->parsed()) {
      evbma::cmd_diagnose(cli.kind, cli.config_path, cli.options());
    } else if (validate->parsed()) {
      evbma::cmd_validate_config(cli.config_path);
    }
  } catch (const evbma::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
