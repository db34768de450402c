#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "floormatch/cli/config.hpp"
#include "floormatch/harness/artifacts.hpp"

using namespace floormatch;
namespace fs = std::filesystem;

namespace {

const std::string kCli = FLOORMATCH_CLI_PATH;

int run_cli(const std::string& argline) {
  std::string cmd = kCli + " " + argline + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string tiny_config_json(int apartments = 10) {
  nlohmann::json j;
  j["seed"] = 3;
  j["dataset"] = {{"apartments", apartments}, {"train_fraction", 0.8},
                  {"floorplan_size", 32}, {"photo_size", 16}};
  j["model"] = {{"feature_dim", 8}, {"conv_blocks", {{4, 1}, {8, 1}}}, {"init_sigma", 0.05}};
  j["problem"] = {{"kind", "pair"}, {"room_type", "bathroom"}};
  j["train"] = {{"epochs", 1}, {"batch_size", 8}, {"samples_per_epoch", 16},
                {"learning_rate", 0.001}};
  j["eval"] = {{"num_samples", 50}, {"groups", 5}};
  j["interpret"] = {{"window", 11}, {"stride", 4}, {"samples_per_window", 2}};
  return j.dump(2);
}

std::string write_config(const fs::path& dir, const std::string& text) {
  fs::path p = dir / "config.json";
  std::ofstream os(p);
  os << text;
  return p.string();
}

}  // namespace

TEST_CASE("validate_config: empty file names required fields") {
  auto validated = cli::validate_config_json("");
  CHECK_FALSE(validated.ok());
  bool names_dataset = false;
  for (const auto& e : validated.errors)
    if (e.find("dataset") != std::string::npos) names_dataset = true;
  CHECK(names_dataset);
}

TEST_CASE("validate_config: kway with k=1 cites the problem invariant") {
  nlohmann::json j = nlohmann::json::parse(tiny_config_json());
  j["problem"] = {{"kind", "kway"}, {"k", 1}, {"room_type", "bathroom"}};
  auto validated = cli::validate_config_json(j.dump());
  CHECK_FALSE(validated.ok());
  bool cites = false;
  for (const auto& e : validated.errors)
    if (e.find("problem.k") != std::string::npos && e.find("k >= 2") != std::string::npos)
      cites = true;
  CHECK(cites);
}

TEST_CASE("validate_config: default-filled config round-trips unchanged") {
  auto validated = cli::validate_config_json(tiny_config_json());
  REQUIRE(validated.ok());
  std::string once = cli::serialize_config(validated.config);
  auto again = cli::validate_config_json(once);
  REQUIRE(again.ok());
  CHECK(cli::serialize_config(again.config) == once);
}

TEST_CASE("cli: unknown subcommand exits 1") {
  CHECK(run_cli("frobnicate") == 1);
  CHECK(run_cli("") == 1);  // missing subcommand
}

TEST_CASE("cli: gen writes one directory per apartment plus a manifest") {
  auto dir = fresh_dir("fm_cli_gen");
  std::string cfg = write_config(dir, tiny_config_json(10));
  CHECK(run_cli("gen --config " + cfg + " --out " + dir.string()) == 0);
  CHECK(fs::exists(dir / "dataset" / "manifest.json"));
  int apt_dirs = 0;
  for (const auto& entry : fs::directory_iterator(dir / "dataset"))
    if (entry.is_directory()) ++apt_dirs;
  CHECK(apt_dirs == 10);
  fs::remove_all(dir);
}

TEST_CASE("cli: train then eval produces a parsable metrics csv") {
  auto dir = fresh_dir("fm_cli_train");
  std::string cfg = write_config(dir, tiny_config_json(10));
  REQUIRE(run_cli("gen --config " + cfg + " --out " + dir.string()) == 0);
  REQUIRE(run_cli("train --config " + cfg + " --out " + dir.string()) == 0);
  CHECK(fs::exists(dir / "checkpoint.fmck"));
  CHECK(fs::exists(dir / "loss_curve.csv"));
  REQUIRE(run_cli("eval --config " + cfg + " --out " + dir.string()) == 0);

  std::ifstream is(dir / "metrics.csv");
  REQUIRE(is.good());
  std::string header_seed, header_cols, row;
  std::getline(is, header_seed);
  std::getline(is, header_cols);
  std::getline(is, row);
  CHECK(header_seed == "# seed=3");
  CHECK(header_cols.rfind("problem,accuracy_mean,accuracy_std,chance,num_samples", 0) == 0);
  CHECK(row.find("pair-aware-bathroom") == 0);
  fs::remove_all(dir);
}

TEST_CASE("cli: eval without a checkpoint fails with exit 1") {
  auto dir = fresh_dir("fm_cli_nockpt");
  std::string cfg = write_config(dir, tiny_config_json(10));
  REQUIRE(run_cli("gen --config " + cfg + " --out " + dir.string()) == 0);
  CHECK(run_cli("eval --config " + cfg + " --out " + dir.string()) == 1);
  fs::remove_all(dir);
}

TEST_CASE("cli: rfviz emits the arithmetic-sized heatmap grid") {
  auto dir = fresh_dir("fm_cli_rf");
  std::string cfg = write_config(dir, tiny_config_json(10));
  REQUIRE(run_cli("gen --config " + cfg + " --out " + dir.string()) == 0);
  REQUIRE(run_cli("train --config " + cfg + " --out " + dir.string()) == 0);
  REQUIRE(run_cli("rfviz --config " + cfg + " --out " + dir.string()) == 0);
  // 32x32 floorplan, window 11, stride 4 -> grid 6x6
  std::ifstream is(dir / "heatmap.csv");
  REQUIRE(is.good());
  std::string line;
  std::getline(is, line);  // seed header
  std::getline(is, line);  // baseline header
  int rows = 0;
  int cols = -1;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    ++rows;
    int commas = static_cast<int>(std::count(line.begin(), line.end(), ','));
    if (cols < 0) cols = commas + 1;
    CHECK(commas + 1 == cols);
  }
  CHECK(rows == 6);
  CHECK(cols == 6);
  CHECK(fs::exists(dir / "heatmap.png"));
  fs::remove_all(dir);
}

TEST_CASE("cli: identical invocations produce byte-identical csv artifacts") {
  auto dir1 = fresh_dir("fm_cli_det1");
  auto dir2 = fresh_dir("fm_cli_det2");
  std::string cfg1 = write_config(dir1, tiny_config_json(10));
  std::string cfg2 = write_config(dir2, tiny_config_json(10));
  for (const auto& [cfg, dir] : {std::pair{cfg1, dir1}, std::pair{cfg2, dir2}}) {
    REQUIRE(run_cli("gen --config " + cfg + " --out " + dir.string()) == 0);
    REQUIRE(run_cli("train --config " + cfg + " --out " + dir.string()) == 0);
    REQUIRE(run_cli("eval --config " + cfg + " --out " + dir.string()) == 0);
  }
  CHECK(harness::read_text_file((dir1 / "loss_curve.csv").string()) ==
        harness::read_text_file((dir2 / "loss_curve.csv").string()));
  CHECK(harness::read_text_file((dir1 / "metrics.csv").string()) ==
        harness::read_text_file((dir2 / "metrics.csv").string()));
  fs::remove_all(dir1);
  fs::remove_all(dir2);
}

TEST_CASE("cli: sweep table is identical under --jobs 1 and --jobs 3") {
  auto dir1 = fresh_dir("fm_cli_jobs1");
  auto dir2 = fresh_dir("fm_cli_jobs2");
  nlohmann::json j = nlohmann::json::parse(tiny_config_json(8));
  j["problem"] = {{"kind", "set"}, {"photos_per_apartment", 3}, {"room_mode", "aware"}};
  j["train"]["samples_per_epoch"] = 8;
  j["model"]["conv_blocks"] = {{3, 1}, {4, 1}, {6, 1}, {6, 1}};
  j["eval"]["num_samples"] = 25;
  std::string cfg1 = write_config(dir1, j.dump());
  std::string cfg2 = write_config(dir2, j.dump());
  REQUIRE(run_cli("gen --config " + cfg1 + " --out " + dir1.string()) == 0);
  REQUIRE(run_cli("gen --config " + cfg2 + " --out " + dir2.string()) == 0);
  REQUIRE(run_cli("sweep-fusion --config " + cfg1 + " --out " + dir1.string() + " --jobs 1") == 0);
  REQUIRE(run_cli("sweep-fusion --config " + cfg2 + " --out " + dir2.string() + " --jobs 3") == 0);
  CHECK(harness::read_text_file((dir1 / "metrics.csv").string()) ==
        harness::read_text_file((dir2 / "metrics.csv").string()));
  CHECK(harness::read_text_file((dir1 / "table.txt").string()) ==
        harness::read_text_file((dir2 / "table.txt").string()));
  fs::remove_all(dir1);
  fs::remove_all(dir2);
}
