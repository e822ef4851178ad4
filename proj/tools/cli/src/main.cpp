#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "simulest/cli/config.hpp"
#include "simulest/cli/run.hpp"

int main(int argc, char** argv) {
  using namespace simulest::cli;

  CLI::App app{"Simultaneous estimation of tr(O rho^k) from joint measurements on rho^(x)n"};
  std::string command;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string format = "both";
  std::size_t threads = 1;
  std::optional<std::size_t> d;
  std::optional<std::size_t> n_copies;
  std::optional<std::size_t> k_max;
  std::optional<double> epsilon;
  std::optional<std::size_t> batches;

  app.add_option("command", command, "estimate | verify | hardness | spectroscopy | cool | bench");
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--seed", seed, "Master seed");
  app.add_option("--out", out_dir, "Output directory for <command>.json and <command>.csv");
  app.add_option("--format", format, "json | csv | both")->check(CLI::IsMember({"json", "csv", "both"}));
  app.add_option("--threads", threads, "Worker threads for batch sampling")->check(CLI::PositiveNumber);
  app.add_option("--d", d, "Local dimension");
  app.add_option("--n-copies", n_copies, "Copies per batch (overrides the plan)");
  app.add_option("--k-max", k_max, "Largest power k");
  app.add_option("--epsilon", epsilon, "Additive error target");
  app.add_option("--batches", batches, "Number of batches (overrides the plan)");
  CLI11_PARSE(app, argc, argv);

  Envelope envelope;
  try {
    RunConfig cfg;
    if (!config_path.empty()) {
      cfg = load_config(config_path);
    } else if (command.empty()) {
      throw ConfigError("give a command or --config");
    } else {
      cfg = parse_config(json{{"command", command}});
    }
    if (!command.empty()) cfg.command = command_from_string(command);
    if (seed) cfg.seed = *seed;
    if (d) cfg.d = *d;
    if (n_copies) cfg.n_copies = *n_copies;
    if (k_max) cfg.k_max = *k_max;
    if (epsilon) cfg.epsilon = *epsilon;
    if (batches) cfg.batches = *batches;
    validate(cfg);
    envelope = execute(cfg, threads);
  } catch (const ConfigError& e) {
    envelope = config_error_envelope(e.what());
  }

  const std::optional<std::filesystem::path> out =
      out_dir.empty() ? std::nullopt : std::optional<std::filesystem::path>(out_dir);
  emit(envelope, out, format_from_string(format), std::cout);
  if (envelope.report["error"].is_object()) {
    std::cerr << "simulest: " << envelope.report["error"]["message"].get<std::string>() << '\n';
  }
  return static_cast<int>(envelope.exit_code);
}
