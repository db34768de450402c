#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "floormatch/harness/artifacts.hpp"
#include "floormatch/harness/sweeps.hpp"

using namespace floormatch;
using namespace floormatch::harness;
using synth::Dataset;
using synth::GeneratorSpec;
using synth::RoomType;

namespace {

GeneratorSpec tiny_gen() {
  GeneratorSpec s;
  s.floorplan_size = 32;
  s.photo_size = 16;
  return s;
}

TrainConfig tiny_train(const match::MatchProblem& problem, int epochs = 1) {
  TrainConfig cfg;
  cfg.epochs = epochs;
  cfg.batch_size = 8;
  cfg.samples_per_epoch = 32;
  cfg.optimizer.learning_rate = 1e-3f;
  cfg.seed = 7;
  cfg.problem = problem;
  cfg.model.feature_dim = 8;
  cfg.model.conv_blocks = {{4, 1}, {8, 1}};
  cfg.model.init_sigma = 0.02f;
  cfg.model.floorplan_size = 32;
  cfg.model.photo_size = 16;
  return cfg;
}

match::MatchProblem bathroom_pair() {
  match::MatchProblem p;
  p.kind = match::MatchKind::pair;
  p.room_type = RoomType::bathroom;
  return p;
}

const Dataset& tiny_dataset() {
  static Dataset data = Dataset::generate(50, tiny_gen(), 40, 0.75);
  return data;
}

// test double: scores +1 exactly when the label says the pair matches
struct OracleMatcher : Matcher {
  match::MatchProblem prob = bathroom_pair();
  const match::MatchProblem& problem() const override { return prob; }
  nn::Tensor<float> loss(const synth::Sample&, float) override {
    return nn::Tensor<float>::scalar(0.0f);
  }
  float score(const synth::Sample& s) override { return s.label >= 0 ? 0.5f : -0.5f; }
  std::vector<nn::NamedParam<float>> named_parameters() const override { return {}; }
  std::vector<nn::Tensor<float>> trainable_parameters() const override { return {}; }
};

}  // namespace

TEST_CASE("train rejects invalid configs") {
  auto cfg = tiny_train(bathroom_pair());
  cfg.epochs = 0;
  CHECK_THROWS_AS(train(tiny_dataset(), cfg), ConfigError);
  cfg = tiny_train(bathroom_pair());
  cfg.margin = 0.0f;
  CHECK_THROWS_AS(train(tiny_dataset(), cfg), ConfigError);
}

TEST_CASE("one-epoch checkpoint round-trips bit-exactly") {
  auto cfg = tiny_train(bathroom_pair(), 1);
  TrainResult r = train(tiny_dataset(), cfg);
  std::string path = (std::filesystem::temp_directory_path() / "fm_ckpt_rt.fmck").string();
  save_matcher(path, *r.matcher, checkpoint_meta(cfg));
  auto loaded = load_matcher(path);
  auto a = r.matcher->named_parameters();
  auto b = loaded->named_parameters();
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].name == b[i].name);
    auto da = a[i].tensor.data(), db = b[i].tensor.data();
    REQUIRE(da.size() == db.size());
    for (size_t j = 0; j < da.size(); ++j) CHECK(da[j] == db[j]);
  }
  std::filesystem::remove(path);
}

TEST_CASE("identical configs give identical loss curves") {
  auto cfg = tiny_train(bathroom_pair(), 3);
  TrainResult a = train(tiny_dataset(), cfg);
  TrainResult b = train(tiny_dataset(), cfg);
  REQUIRE(a.epoch_loss.size() == b.epoch_loss.size());
  for (size_t i = 0; i < a.epoch_loss.size(); ++i) CHECK(a.epoch_loss[i] == b.epoch_loss[i]);
  // and identical final parameters
  auto pa = a.matcher->named_parameters();
  auto pb = b.matcher->named_parameters();
  for (size_t i = 0; i < pa.size(); ++i) {
    auto da = pa[i].tensor.data(), db = pb[i].tensor.data();
    for (size_t j = 0; j < da.size(); ++j) CHECK(da[j] == db[j]);
  }
}

TEST_CASE("training reduces the loss on the tiny problem") {
  auto cfg = tiny_train(bathroom_pair(), 10);
  cfg.samples_per_epoch = 64;
  cfg.optimizer.learning_rate = 3e-3f;
  TrainResult r = train(tiny_dataset(), cfg);
  CHECK(r.epoch_loss.back() < r.epoch_loss.front());
}

TEST_CASE("oracle matcher evaluates to 100 +- 0") {
  OracleMatcher oracle;
  EvalConfig ecfg;
  ecfg.num_samples = 100;
  EvalReport rep = evaluate(oracle, tiny_dataset(), oracle.prob, ecfg);
  CHECK(rep.accuracy_mean == 100.0);
  CHECK(rep.accuracy_std == 0.0);
  CHECK(rep.chance == 50.0);
  for (double g : rep.group_accuracies) CHECK(g == 100.0);
}

TEST_CASE("untrained pair matcher sits at chance") {
  auto cfg = tiny_train(bathroom_pair());
  auto matcher = build_untrained(cfg);
  EvalConfig ecfg;
  ecfg.num_samples = 500;
  EvalReport rep = evaluate(*matcher, tiny_dataset(), cfg.problem, ecfg);
  CHECK(rep.accuracy_mean > 45.0);
  CHECK(rep.accuracy_mean < 55.0);
}

TEST_CASE("report internals: groups, mean/std recompute, chance fields") {
  auto cfg = tiny_train(bathroom_pair());
  auto matcher = build_untrained(cfg);
  EvalConfig ecfg;
  ecfg.num_samples = 250;
  EvalReport rep = evaluate(*matcher, tiny_dataset(), cfg.problem, ecfg);
  REQUIRE(rep.group_accuracies.size() == 5);
  double mean = 0;
  for (double g : rep.group_accuracies) mean += g;
  mean /= 5.0;
  CHECK(rep.accuracy_mean == mean);
  double var = 0;
  for (double g : rep.group_accuracies) var += (g - mean) * (g - mean);
  CHECK(rep.accuracy_std == std::sqrt(var / 5.0));

  // group partition is the first-20% rule: recompute group 1 by hand
  Rng rng = Rng(ecfg.seed).derive("eval");
  int right = 0;
  for (int i = 0; i < 50; ++i) {
    auto s = synth::draw_sample(tiny_dataset(), tiny_dataset().test_ids(), rng, cfg.problem);
    float sc = matcher->score(s);
    if ((sc >= 0 ? 1 : -1) == s.label) ++right;
  }
  CHECK(rep.group_accuracies[0] == doctest::Approx(100.0 * right / 50.0));

  // chance levels per problem kind
  match::MatchProblem kway;
  kway.kind = match::MatchKind::kway;
  kway.room_type = RoomType::bathroom;
  for (int k : {2, 4, 8}) {
    kway.k = k;
    CHECK(kway.chance_percent() == doctest::Approx(100.0 / k));
  }
  CHECK(bathroom_pair().chance_percent() == 50.0);

  CHECK_THROWS_AS(([&] {
                    EvalConfig bad;
                    bad.num_samples = 33;  // not a multiple of 5
                    evaluate(*matcher, tiny_dataset(), cfg.problem, bad);
                  }()),
                  ConfigError);
}

TEST_CASE("fusion sweep emits all 10 cells with their specs") {
  match::MatchProblem sp;
  sp.kind = match::MatchKind::set;
  sp.photos_per_apartment = 3;
  sp.room_mode = match::RoomMode::aware;
  auto cfg = tiny_train(sp, 1);
  cfg.samples_per_epoch = 8;
  cfg.model.conv_blocks = {{3, 1}, {4, 1}, {6, 1}, {6, 1}};  // taps need 4 blocks
  EvalConfig ecfg;
  ecfg.num_samples = 50;
  SweepResult sweep = fusion_sweep(tiny_dataset(), cfg, ecfg, 2);
  REQUIRE(sweep.cells.size() == 10);
  int idx = 0;
  for (const char* layer : {"image", "conv3", "conv4", "fc6", "score"})
    for (const char* func : {"averaging", "concatenation"}) {
      CHECK(sweep.cells[static_cast<size_t>(idx)].row == layer);
      CHECK(sweep.cells[static_cast<size_t>(idx)].col == func);
      // the report carries its fusion spec in the problem descriptor
      CHECK(sweep.cells[static_cast<size_t>(idx)].report.problem.find(layer) != std::string::npos);
      CHECK(sweep.cells[static_cast<size_t>(idx)].report.problem.find(func) != std::string::npos);
      ++idx;
    }
}

TEST_CASE("finetune sweep: freeze contract and parameter counts") {
  match::MatchProblem sp;
  sp.kind = match::MatchKind::set;
  sp.photos_per_apartment = 3;
  sp.room_mode = match::RoomMode::aware;
  sp.fusion = {match::FusionLayer::fc6, match::FusionFunc::concatenation};

  // freeze contract, checked directly against train()
  auto cfg = tiny_train(sp, 2);
  cfg.samples_per_epoch = 16;
  cfg.freeze_encoders = true;
  auto before = build_untrained(cfg);
  TrainResult trained = train(tiny_dataset(), cfg);
  auto pa = before->named_parameters();
  auto pb = trained.matcher->named_parameters();
  REQUIRE(pa.size() == pb.size());
  for (size_t i = 0; i < pa.size(); ++i) {
    bool is_head = pa[i].name.rfind("head.", 0) == 0;
    auto da = pa[i].tensor.data(), db = pb[i].tensor.data();
    bool identical = true;
    for (size_t j = 0; j < da.size(); ++j)
      if (da[j] != db[j]) identical = false;
    if (!is_head) CHECK(identical);  // encoder parameters untouched
  }

  // room_aware_full trains 3x the photo-encoder parameters of room_agnostic
  auto count_photo_params = [&](match::RoomMode mode) {
    TrainConfig c = tiny_train(sp);
    c.problem.room_mode = mode;
    auto m = build_untrained(c);
    int64_t total = 0;
    for (const auto& p : m->named_parameters())
      if (p.name.rfind("photo.", 0) == 0) total += p.tensor.size();
    return total;
  };
  CHECK(count_photo_params(match::RoomMode::aware) ==
        3 * count_photo_params(match::RoomMode::agnostic));

  // the four-variant sweep runs end to end
  EvalConfig ecfg;
  ecfg.num_samples = 50;
  auto c = tiny_train(sp, 1);
  c.samples_per_epoch = 8;
  SweepResult sweep = finetune_sweep(tiny_dataset(), c, ecfg, 2);
  REQUIRE(sweep.cells.size() == 4);
  CHECK(sweep.cells[0].row == "frozen_encoders");
  CHECK(sweep.cells[3].row == "room_aware_full");
}

TEST_CASE("cross_eval matrix has 12 cells and 3 N/A entries") {
  match::MatchProblem p = bathroom_pair();
  auto cfg = tiny_train(p, 1);
  cfg.samples_per_epoch = 8;
  EvalConfig ecfg;
  ecfg.num_samples = 50;
  CrossEvalResult matrix = cross_eval(tiny_dataset(), cfg, ecfg, 2);
  REQUIRE(matrix.cells.size() == 12);
  int na = 0;
  for (const auto& cell : matrix.cells)
    if (cell.not_applicable) ++na;
  CHECK(na == 3);
  // the N/A pattern: 2-way row misses 4/8-way, 4-way row misses 8-way
  auto find = [&](const std::string& row, const std::string& col) -> const CrossEvalCell& {
    for (const auto& cell : matrix.cells)
      if (cell.trained_on == row && cell.eval_on == col) return cell;
    throw std::runtime_error("missing cell");
  };
  CHECK(find("2-way", "4-way").not_applicable);
  CHECK(find("2-way", "8-way").not_applicable);
  CHECK(find("4-way", "8-way").not_applicable);
  CHECK_FALSE(find("pair", "2-way").not_applicable);
  CHECK_FALSE(find("8-way", "2-way").not_applicable);
}

TEST_CASE("csv artifacts are deterministic and carry the seed header") {
  auto dir = std::filesystem::temp_directory_path() / "fm_artifacts";
  std::filesystem::create_directories(dir);
  std::vector<float> losses = {0.9f, 0.5f, 0.31f};
  auto p1 = (dir / "a.csv").string();
  auto p2 = (dir / "b.csv").string();
  write_loss_curve_csv(p1, 99, losses);
  write_loss_curve_csv(p2, 99, losses);
  std::string a = read_text_file(p1);
  CHECK(a == read_text_file(p2));
  CHECK(a.rfind("# seed=99\n", 0) == 0);
  std::filesystem::remove_all(dir);
}
