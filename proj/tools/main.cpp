#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"
#include "csas/core.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

// `--key value` and `--key=value` pairs left over after CLI11 has taken --config.
void apply_overrides(csas::app::RunConfig& cfg, const std::vector<std::string>& extras) {
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const std::string& tok = extras[i];
    if (tok.rfind("--", 0) != 0 || tok.size() == 2)
      throw csas::app::ConfigError("unexpected argument '" + tok + "' (expected --key value)");
    const std::string body = tok.substr(2);
    const auto eq = body.find('=');
    if (eq != std::string::npos) {
      cfg.set(body.substr(0, eq), body.substr(eq + 1));
    } else {
      if (i + 1 >= extras.size()) throw csas::app::ConfigError("missing value for '" + tok + "'");
      cfg.set(body, extras[++i]);
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coherent deconvolution for circular synthetic aperture sonar"};
  app.require_subcommand(1, 1);
  std::string config_path;
  std::vector<std::pair<CLI::App*, const csas::app::CommandInfo*>> subs;
  for (const auto& cmd : csas::app::commands()) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    sub->add_option("--config", config_path, "INI config file; --key value pairs override it");
    sub->allow_extras();
    subs.emplace_back(sub, &cmd);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  for (const auto& [sub, cmd] : subs) {
    if (!sub->parsed()) continue;
    try {
      csas::app::RunConfig cfg;
      if (!config_path.empty()) cfg.load_file(config_path);
      apply_overrides(cfg, sub->remaining());
      cmd->run(cfg, std::cout);
      return 0;
    } catch (const csas::app::ConfigError& e) {
      std::cerr << "csas " << cmd->name << ": config error: " << e.what() << "\n";
      return kExitConfig;
    } catch (const csas::InvalidArgument& e) {
      std::cerr << "csas " << cmd->name << ": invalid argument: " << e.what() << "\n";
      return kExitConfig;
    } catch (const csas::Diverged& e) {
      std::cerr << "csas " << cmd->name << ": diverged: " << e.what() << "\n";
      return kExitRuntime;
    } catch (const std::exception& e) {
      std::cerr << "csas " << cmd->name << ": error: " << e.what() << "\n";
      return kExitRuntime;
    }
  }
  return kExitConfig;
}
