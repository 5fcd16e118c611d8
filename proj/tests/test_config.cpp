#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "config.hpp"

using csas::app::ConfigError;
using csas::app::RunConfig;

namespace {

std::string write_ini(const std::string& name, const std::string& text) {
  const auto path = (std::filesystem::temp_directory_path() / ("csas_cfg_" + name)).string();
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST_CASE("defaults and typed access") {
  RunConfig cfg;
  CHECK(cfg.integer("scene.n") == 400);
  CHECK(cfg.num("medium.c") == 343.0);
  CHECK(std::isinf(cfg.num("noise.psnr_db")));
  CHECK(!cfg.flag("gd.real_only"));
  CHECK(cfg.list("sweep.kappas").empty());
  CHECK_THROWS_AS(cfg.str("scene.nope"), std::logic_error);  // code bug, not user input
}

TEST_CASE("overrides, aliases and validation") {
  RunConfig cfg;
  cfg.set("method", "gd-tv");
  cfg.set("n", "32");
  cfg.set("noise", "25");
  cfg.set("gd.real_only", "true");
  cfg.set("sweep.kappas", "1, 10,30");
  CHECK(cfg.str("deconv.method") == "gd-tv");
  CHECK(cfg.integer("scene.n") == 32);
  CHECK(cfg.num("noise.psnr_db") == 25.0);
  CHECK(cfg.flag("gd.real_only"));
  CHECK(cfg.num_list("sweep.kappas") == std::vector<double>{1, 10, 30});
  CHECK(RunConfig::resolve_alias("out") == "output.dir");

  CHECK_THROWS_AS(cfg.set("scene.colour", "red"), ConfigError);
  cfg.set("scene.n", "3.5");
  CHECK_THROWS_AS(cfg.integer("scene.n"), ConfigError);
  cfg.set("medium.c", "fast");
  CHECK_THROWS_AS(cfg.num("medium.c"), ConfigError);
  cfg.set("gd.real_only", "maybe");
  CHECK_THROWS_AS(cfg.flag("gd.real_only"), ConfigError);
  cfg.set("scene.seed", "-1");
  CHECK_THROWS_AS(cfg.seed("scene.seed"), ConfigError);
}

TEST_CASE("INI files") {
  const auto good = write_ini("good.ini", "[scene]\nkind = ripples\nn = 48\n\n[gd]\ntv_weight = 2e-2\n");
  RunConfig cfg;
  cfg.load_file(good);
  CHECK(cfg.str("scene.kind") == "ripples");
  CHECK(cfg.integer("scene.n") == 48);
  CHECK(cfg.num("gd.tv_weight") == 0.02);

  const auto unknown = write_ini("unknown.ini", "[scene]\nsparkle = 3\n");
  CHECK_THROWS_AS(cfg.load_file(unknown), ConfigError);
  const auto broken = write_ini("broken.ini", "[scene\nn = 4\n");
  CHECK_THROWS_AS(cfg.load_file(broken), ConfigError);
  CHECK_THROWS_AS(cfg.load_file("/nonexistent/csas.ini"), ConfigError);
  for (const auto& p : {good, unknown, broken}) std::filesystem::remove(p);
}
