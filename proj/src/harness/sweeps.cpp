#include "floormatch/harness/sweeps.hpp"

#include <thread>

namespace floormatch::harness {

namespace {

void run_cells(std::vector<std::function<void()>>& tasks, int jobs) {
  jobs = std::max(1, jobs);
  if (jobs == 1) {
    for (auto& t : tasks) t();
    return;
  }
  std::vector<std::thread> workers;
  for (int w = 0; w < jobs; ++w) {
    workers.emplace_back([&tasks, w, jobs] {
      for (size_t i = static_cast<size_t>(w); i < tasks.size(); i += static_cast<size_t>(jobs))
        tasks[i]();
    });
  }
  for (auto& t : workers) t.join();
}

}  // namespace

SweepResult fusion_sweep(const synth::Dataset& data, const TrainConfig& base,
                         const EvalConfig& eval_cfg, int jobs) {
  if (base.problem.kind != match::MatchKind::set || base.problem.photos_per_apartment != 3)
    throw ConfigError("fusion_sweep requires a 3-photo set problem");
  using match::FusionFunc;
  using match::FusionLayer;
  const std::vector<FusionLayer> layers = {FusionLayer::image, FusionLayer::conv3,
                                           FusionLayer::conv4, FusionLayer::fc6,
                                           FusionLayer::score};
  const std::vector<FusionFunc> funcs = {FusionFunc::averaging, FusionFunc::concatenation};

  SweepResult result;
  result.cells.resize(layers.size() * funcs.size());
  std::vector<std::function<void()>> tasks;
  for (size_t li = 0; li < layers.size(); ++li) {
    for (size_t fi = 0; fi < funcs.size(); ++fi) {
      size_t idx = li * funcs.size() + fi;
      tasks.push_back([&, li, fi, idx] {
        TrainConfig cfg = base;
        cfg.problem.fusion = {layers[li], funcs[fi]};
        TrainResult trained = train(data, cfg);
        SweepCell& cell = result.cells[idx];
        cell.row = match::to_string(layers[li]);
        cell.col = match::to_string(funcs[fi]);
        cell.loss_curve = trained.epoch_loss;
        cell.report = evaluate(*trained.matcher, data, cfg.problem, eval_cfg);
      });
    }
  }
  run_cells(tasks, jobs);
  return result;
}

SweepResult finetune_sweep(const synth::Dataset& data, const TrainConfig& base,
                           const EvalConfig& eval_cfg, int jobs) {
  if (base.problem.kind != match::MatchKind::set || base.problem.photos_per_apartment != 3)
    throw ConfigError("finetune_sweep requires a 3-photo set problem");
  struct Variant {
    const char* name;
    bool freeze;
    match::RoomMode mode;
    bool fc_only;
  };
  const std::vector<Variant> variants = {
      {"frozen_encoders", true, match::RoomMode::aware, false},
      {"room_agnostic", false, match::RoomMode::agnostic, false},
      {"room_aware_fc_only", false, match::RoomMode::aware, true},
      {"room_aware_full", false, match::RoomMode::aware, false},
  };
  SweepResult result;
  result.cells.resize(variants.size());
  std::vector<std::function<void()>> tasks;
  for (size_t vi = 0; vi < variants.size(); ++vi) {
    tasks.push_back([&, vi] {
      const Variant& v = variants[vi];
      TrainConfig cfg = base;
      cfg.freeze_encoders = v.freeze;
      cfg.problem.room_mode = v.mode;
      cfg.model.fc_only_sharing = v.fc_only;
      TrainResult trained = train(data, cfg);
      SweepCell& cell = result.cells[vi];
      cell.row = v.name;
      cell.col = "accuracy";
      cell.loss_curve = trained.epoch_loss;
      cell.report = evaluate(*trained.matcher, data, cfg.problem, eval_cfg);
    });
  }
  run_cells(tasks, jobs);
  return result;
}

CrossEvalResult cross_eval(const synth::Dataset& data, const TrainConfig& base,
                           const EvalConfig& eval_cfg, int jobs) {
  if (!base.problem.room_type)
    throw ConfigError("cross_eval requires a single-photo problem with a room type");
  synth::RoomType room = *base.problem.room_type;

  // four training rows: pair + 2/4/8-way, all on the same single-photo task
  auto problem_for = [&](int k) {
    match::MatchProblem p;
    p.kind = k == 1 ? match::MatchKind::pair : match::MatchKind::kway;
    p.k = k;
    p.photos_per_apartment = 1;
    p.room_mode = match::RoomMode::aware;
    p.room_type = room;
    return p;
  };

  const std::vector<int> rows = {1, 2, 4, 8};  // 1 = pair
  const std::vector<int> cols = {2, 4, 8};

  std::vector<TrainResult> trained(rows.size());
  std::vector<std::function<void()>> tasks;
  for (size_t r = 0; r < rows.size(); ++r) {
    tasks.push_back([&, r] {
      TrainConfig cfg = base;
      cfg.problem = problem_for(rows[r]);
      trained[r] = train(data, cfg);
    });
  }
  run_cells(tasks, jobs);

  CrossEvalResult result;
  result.pair_loss_curve = trained[0].epoch_loss;
  for (size_t r = 0; r < rows.size(); ++r) {
    for (int eval_k : cols) {
      CrossEvalCell cell;
      cell.trained_on = rows[r] == 1 ? "pair" : std::to_string(rows[r]) + "-way";
      cell.eval_on = std::to_string(eval_k) + "-way";
      match::MatchProblem eval_problem = problem_for(eval_k);
      Matcher& model = *trained[r].matcher;
      if (rows[r] == 1) {
        cell.report = evaluate_kway_predictor(
            data, eval_problem, eval_cfg,
            [&model](const synth::Sample& s) { return match::solve_kway_with_pair_model<float>(model, s); });
      } else if (rows[r] == eval_k) {
        cell.report = evaluate(model, data, eval_problem, eval_cfg);
      } else if (rows[r] > eval_k && rows[r] % eval_k == 0) {
        cell.report = evaluate_kway_predictor(
            data, eval_problem, eval_cfg,
            [&model](const synth::Sample& s) { return match::solve_smallk_with_bigk_model<float>(model, s); });
      } else {
        cell.not_applicable = true;  // trained k below the evaluated k
      }
      result.cells.push_back(std::move(cell));
    }
  }
  return result;
}

}  // namespace floormatch::harness
