// Command-line front end: dataset generation, training, evaluation, the
// table sweeps and the interpretation tools, all driven by one JSON config.
//
// Exit codes: 0 success, 1 usage/validation failure, 2 runtime failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "floormatch/cli/config.hpp"
#include "floormatch/harness/artifacts.hpp"
#include "floormatch/match/serialize.hpp"

namespace fs = std::filesystem;
using namespace floormatch;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  int64_t seed_override = -1;
  int jobs = 1;
  bool verbose = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "path to the JSON config")->required();
  cmd->add_option("--out", args.out_dir, "output directory (created if absent)");
  cmd->add_option("--seed", args.seed_override, "override the config seed");
  cmd->add_option("--jobs", args.jobs, "worker threads for sweeps and generation");
  cmd->add_flag("--verbose", args.verbose, "chatty progress output");
}

cli::CliConfig load_or_die(const CommonArgs& args) {
  cli::ValidatedConfig validated = cli::validate_config(args.config_path);
  if (!validated.ok()) {
    std::string joined;
    for (size_t i = 0; i < validated.errors.size(); ++i)
      joined += (i ? "; " : "") + validated.errors[i];
    std::cerr << "error: config invalid: " << joined << "\n";
    std::exit(1);
  }
  cli::CliConfig cfg = validated.config;
  if (args.seed_override >= 0) {
    cfg.seed = static_cast<uint64_t>(args.seed_override);
    cfg.rf.seed = cfg.seed;
  }
  fs::create_directories(args.out_dir);
  return cfg;
}

std::string resolve(const CommonArgs& args, const std::string& path) {
  fs::path p(path);
  if (p.is_absolute()) return path;
  return (fs::path(args.out_dir) / p).string();
}

synth::Dataset load_dataset_or_die(const CommonArgs& args, const cli::CliConfig& cfg) {
  std::string dir = resolve(args, cfg.dataset_dir);
  if (!fs::exists(fs::path(dir) / "manifest.json")) {
    std::cerr << "error: dataset.dir: no dataset at '" << dir << "' (run the gen subcommand first)\n";
    std::exit(1);
  }
  return synth::load_dataset(dir);
}

std::unique_ptr<harness::Matcher> load_matcher_or_die(const CommonArgs& args,
                                                      const cli::CliConfig& cfg) {
  std::string path = resolve(args, cfg.checkpoint);
  if (!fs::exists(path)) {
    std::cerr << "error: checkpoint: no file at '" << path << "'\n";
    std::exit(1);
  }
  return harness::load_matcher(path);
}

const synth::Apartment& apartment_or_die(const synth::Dataset& data, uint64_t id) {
  try {
    return data.by_id(id);
  } catch (const ConfigError& e) {
    std::cerr << "error: interpret.apartment_id: " << e.what() << "\n";
    std::exit(1);
  }
}

synth::Sample photo_side(const cli::CliConfig& cfg, const synth::Apartment& apt) {
  synth::Sample side;
  side.floorplan = apt.floorplan;
  if (cfg.problem.photos_per_apartment == 1) {
    synth::RoomType room = *cfg.problem.room_type;
    side.photos = {apt.photo(room)};
    side.photo_rooms = {room};
  } else {
    for (synth::RoomType room : synth::kRoomTypes) {
      side.photos.push_back(apt.photo(room));
      side.photo_rooms.push_back(room);
    }
  }
  return side;
}

void write_sweep_artifacts(const CommonArgs& args, const cli::CliConfig& cfg,
                           const harness::SweepResult& sweep, const std::string& title,
                           const std::vector<std::string>& cols) {
  std::vector<harness::EvalReport> reports;
  for (const auto& cell : sweep.cells) reports.push_back(cell.report);
  harness::write_metrics_csv(resolve(args, "metrics.csv"), cfg.seed, reports);

  std::vector<std::string> rows;
  std::vector<std::vector<std::string>> cells;
  for (const auto& cell : sweep.cells) {
    if (rows.empty() || rows.back() != cell.row) {
      rows.push_back(cell.row);
      cells.emplace_back();
    }
    cells.back().push_back(harness::format_mean_std(cell.report));
    harness::write_loss_curve_csv(resolve(args, "loss_" + cell.row + "_" + cell.col + ".csv"),
                                  cfg.seed, cell.loss_curve);
  }
  harness::write_table_txt(resolve(args, "table.txt"), cfg.seed, title, cols, rows, cells);
}

int run_gen(const CommonArgs& args, const cli::CliConfig& cfg) {
  synth::Dataset data = synth::Dataset::generate(cfg.seed, cfg.generator, cfg.apartments,
                                                 cfg.train_fraction, args.jobs);
  synth::save_dataset(data, resolve(args, cfg.dataset_dir));
  if (args.verbose)
    std::cout << "generated " << data.size() << " apartments into "
              << resolve(args, cfg.dataset_dir) << "\n";
  return 0;
}

int run_train(const CommonArgs& args, const cli::CliConfig& cfg) {
  synth::Dataset data = load_dataset_or_die(args, cfg);
  harness::TrainConfig tcfg = cfg.train_config();
  harness::TrainResult result = harness::train(data, tcfg);
  harness::write_loss_curve_csv(resolve(args, "loss_curve.csv"), cfg.seed, result.epoch_loss);
  harness::save_matcher(resolve(args, cfg.checkpoint), *result.matcher,
                        harness::checkpoint_meta(tcfg));
  if (args.verbose)
    std::cout << "trained " << tcfg.problem.describe() << ", final loss "
              << result.epoch_loss.back() << "\n";
  return 0;
}

int run_eval(const CommonArgs& args, const cli::CliConfig& cfg) {
  synth::Dataset data = load_dataset_or_die(args, cfg);
  auto matcher = load_matcher_or_die(args, cfg);
  harness::EvalReport report = harness::evaluate(*matcher, data, matcher->problem(),
                                                 cfg.eval_config());
  harness::write_metrics_csv(resolve(args, "metrics.csv"), cfg.seed, {report});
  if (args.verbose)
    std::cout << report.problem << ": " << harness::format_mean_std(report) << " (chance "
              << report.chance << ")\n";
  return 0;
}

int run_sweep_fusion(const CommonArgs& args, cli::CliConfig cfg) {
  synth::Dataset data = load_dataset_or_die(args, cfg);
  cfg.problem.kind = match::MatchKind::set;
  cfg.problem.photos_per_apartment = 3;
  harness::SweepResult sweep =
      harness::fusion_sweep(data, cfg.train_config(), cfg.eval_config(), args.jobs);
  write_sweep_artifacts(args, cfg, sweep, "set matching accuracy by fusion layer and function",
                        {"averaging", "concatenation"});
  return 0;
}

int run_sweep_finetune(const CommonArgs& args, cli::CliConfig cfg) {
  synth::Dataset data = load_dataset_or_die(args, cfg);
  cfg.problem.kind = match::MatchKind::set;
  cfg.problem.photos_per_apartment = 3;
  harness::SweepResult sweep =
      harness::finetune_sweep(data, cfg.train_config(), cfg.eval_config(), args.jobs);
  write_sweep_artifacts(args, cfg, sweep, "set matching accuracy by weight-sharing variant",
                        {"accuracy"});
  return 0;
}

int run_cross_eval(const CommonArgs& args, cli::CliConfig cfg) {
  synth::Dataset data = load_dataset_or_die(args, cfg);
  cfg.problem.kind = match::MatchKind::pair;
  cfg.problem.k = 1;
  cfg.problem.photos_per_apartment = 1;
  if (!cfg.problem.room_type) cfg.problem.room_type = synth::RoomType::bathroom;
  harness::CrossEvalResult matrix =
      harness::cross_eval(data, cfg.train_config(), cfg.eval_config(), args.jobs);

  std::vector<harness::EvalReport> reports;
  std::vector<std::string> rows = {"pair", "2-way", "4-way", "8-way"};
  std::vector<std::string> cols = {"2-way", "4-way", "8-way"};
  std::vector<std::vector<std::string>> cells(rows.size());
  for (size_t r = 0; r < rows.size(); ++r) {
    for (size_t c = 0; c < cols.size(); ++c) {
      const auto& cell = matrix.cells[r * cols.size() + c];
      if (cell.not_applicable) {
        cells[r].push_back("N/A");
      } else {
        cells[r].push_back(harness::format_mean_std(cell.report));
        harness::EvalReport rep = cell.report;
        rep.problem = cell.trained_on + "->" + cell.eval_on;
        reports.push_back(rep);
      }
    }
  }
  harness::write_metrics_csv(resolve(args, "metrics.csv"), cfg.seed, reports);
  harness::write_table_txt(resolve(args, "table.txt"), cfg.seed,
                           "k-way accuracy of models trained on other problems", cols, rows,
                           cells);
  return 0;
}

int run_rfviz(const CommonArgs& args, const cli::CliConfig& cfg) {
  synth::Dataset data = load_dataset_or_die(args, cfg);
  auto matcher = load_matcher_or_die(args, cfg);
  const synth::Apartment& apt = apartment_or_die(data, cfg.apartment_id);
  cli::CliConfig effective = cfg;
  effective.problem = matcher->problem();
  interp::Heatmap map = interp::rf_map(*matcher, apt.floorplan, photo_side(effective, apt),
                                       cfg.rf);
  interp::write_heatmap_csv(resolve(args, "heatmap.csv"), cfg.seed, map);
  interp::write_heatmap_png(resolve(args, "heatmap.png"), map);
  if (args.verbose) {
    auto [row, col] = map.argmax_cell();
    auto [px, py] = map.cell_to_pixel(row, col);
    std::cout << "rf argmax at pixel (" << px << "," << py << ")\n";
  }
  return 0;
}

int run_localize(const CommonArgs& args, const cli::CliConfig& cfg) {
  synth::Dataset data = load_dataset_or_die(args, cfg);
  auto matcher = load_matcher_or_die(args, cfg);
  const synth::Apartment& apt = apartment_or_die(data, cfg.apartment_id);
  synth::RoomType room = matcher->problem().room_type.value_or(synth::RoomType::bathroom);
  interp::SimplifyConfig scfg;
  scfg.retention = cfg.localize_retention;
  interp::SimplifyResult result = interp::simplify_localize(*matcher, apt, room, scfg);

  nlohmann::json j{{"seed", cfg.seed},
                   {"apartment_id", cfg.apartment_id},
                   {"room", synth::to_string(room)},
                   {"removal_order", result.removal_order},
                   {"survivors", result.survivors},
                   {"score_trace", result.score_trace}};
  std::ofstream os(resolve(args, "localize.json"));
  os << j.dump(2) << "\n";
  return 0;
}

int run_place(const CommonArgs& args, const cli::CliConfig& cfg) {
  synth::Dataset data = load_dataset_or_die(args, cfg);
  auto matcher = load_matcher_or_die(args, cfg);
  const synth::Apartment& apt = apartment_or_die(data, cfg.apartment_id);

  std::map<synth::RoomType, synth::Image> photos;
  if (matcher->problem().room_mode == match::RoomMode::agnostic) {
    for (synth::RoomType room : synth::kRoomTypes) photos[room] = apt.photo(room);
  } else {
    synth::RoomType room = matcher->problem().room_type.value_or(synth::RoomType::bathroom);
    photos[room] = apt.photo(room);
  }
  auto placements = interp::place_photos(*matcher, apt.floorplan, photos, cfg.rf);

  nlohmann::json j{{"seed", cfg.seed}, {"apartment_id", cfg.apartment_id}};
  nlohmann::json placed = nlohmann::json::object();
  for (const auto& [room, pos] : placements)
    placed[synth::to_string(room)] = {{"x", pos.first}, {"y", pos.second}};
  j["placements"] = placed;
  std::ofstream os(resolve(args, "placement.json"));
  os << j.dump(2) << "\n";
  return 0;
}

int run_retrieve(const CommonArgs& args, const cli::CliConfig& cfg) {
  synth::Dataset data = load_dataset_or_die(args, cfg);
  auto matcher = load_matcher_or_die(args, cfg);
  const synth::Apartment& apt = apartment_or_die(data, cfg.apartment_id);
  synth::RoomType room = matcher->problem().room_type.value_or(synth::RoomType::bathroom);

  std::vector<synth::Image> corpus;
  std::vector<uint64_t> corpus_ids;
  for (uint64_t id : data.test_ids()) {
    corpus.push_back(data.by_id(id).photo(room));
    corpus_ids.push_back(id);
  }
  auto ranking = interp::retrieve(*matcher, apt.floorplan, corpus, room, cfg.retrieve_top_n);

  std::ofstream os(resolve(args, "ranking.csv"));
  os << "# seed=" << cfg.seed << "\n";
  os << "rank,apartment_id,score\n";
  char buf[64];
  for (size_t i = 0; i < ranking.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.6f", static_cast<double>(ranking[i].score));
    os << (i + 1) << "," << corpus_ids[static_cast<size_t>(ranking[i].index)] << "," << buf
       << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"floormatch: cross-modal floorplan/photograph matching"};
  app.require_subcommand(1);

  std::map<std::string, CommonArgs> args;
  std::map<std::string, std::function<int(const CommonArgs&, const cli::CliConfig&)>> handlers = {
      {"gen", run_gen},
      {"train", run_train},
      {"eval", run_eval},
      {"sweep-fusion", [](const CommonArgs& a, const cli::CliConfig& c) { return run_sweep_fusion(a, c); }},
      {"sweep-finetune", [](const CommonArgs& a, const cli::CliConfig& c) { return run_sweep_finetune(a, c); }},
      {"cross-eval", [](const CommonArgs& a, const cli::CliConfig& c) { return run_cross_eval(a, c); }},
      {"rfviz", run_rfviz},
      {"localize", run_localize},
      {"place", run_place},
      {"retrieve", run_retrieve},
  };
  std::map<std::string, std::string> descriptions = {
      {"gen", "generate a synthetic apartment dataset"},
      {"train", "train a matcher and write a checkpoint"},
      {"eval", "evaluate a checkpoint on the test split"},
      {"sweep-fusion", "train and evaluate the 10-cell fusion grid"},
      {"sweep-finetune", "train and evaluate the 4 weight-sharing variants"},
      {"cross-eval", "cross-problem evaluation matrix"},
      {"rfviz", "receptive-field heatmap for one apartment"},
      {"localize", "greedy floorplan simplification localization"},
      {"place", "photo placement by receptive-field argmax"},
      {"retrieve", "rank test photos against a floorplan"},
  };

  for (auto& [name, handler] : handlers) {
    CLI::App* cmd = app.add_subcommand(name, descriptions[name]);
    add_common(cmd, args[name]);
    cmd->callback([&, name] {
      const CommonArgs& a = args[name];
      cli::CliConfig cfg = load_or_die(a);
      std::exit(handlers[name](a, cfg));
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const NumericError& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 2;
  } catch (const GenerationError& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
