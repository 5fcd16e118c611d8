#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "config.hpp"

namespace csas::app {

/// Each command reads a fully resolved config, writes its artifacts under
/// output.dir and reports them on `log`. Errors propagate as exceptions.
void cmd_simulate(const RunConfig& cfg, std::ostream& log);
void cmd_psf(const RunConfig& cfg, std::ostream& log);
void cmd_beamform(const RunConfig& cfg, std::ostream& log);
void cmd_deconvolve(const RunConfig& cfg, std::ostream& log);
void cmd_eval(const RunConfig& cfg, std::ostream& log);
void cmd_quadrant_demo(const RunConfig& cfg, std::ostream& log);
void cmd_sweep(const RunConfig& cfg, std::ostream& log);
void cmd_scene_gen(const RunConfig& cfg, std::ostream& log);

struct CommandInfo {
  std::string name;
  std::string help;
  void (*run)(const RunConfig&, std::ostream&);
};

const std::vector<CommandInfo>& commands();

}  // namespace csas::app
