//
// MolForge - Copyright 2026 The MolForge Authors
// SPDX-License-Identifier: Apache-2.0
//

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>
#include <unistd.h>

#include "molforge/conductor.hpp"
#include "molforge/config.hpp"
#include "molforge/exsmiles.hpp"
#include "test_support.hpp"

namespace molforge {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using testing::code_of;
using testing::organic;

class ConductorTest : public ::testing::Test {
protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("molforge-conductor-" + std::to_string(::getpid()) +
            "-" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  json base(const std::string &archive = "run.ndjson") const {
    return {
        {"seed", 7},
        {"fragments", {"[C](=[O])-[OH]"}},
        {"gen", {{"rules", {{"min_atoms", 2}, {"max_atoms", 12}, {"max_weight", 250}}}}},
        {"evolve", {{"population_size", 20}, {"iterations", 10}, {"elitism", 1}}},
        {"fitness", {{"target", "[CH3]-[CH2]-[OH]"}}},
        {"archive_path", (dir_ / archive).string()},
    };
  }

  static std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
};

std::string config_error(const json &j) {
  try {
    parse_run_config(j);
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfigError) << e.what();
    return e.what();
  }
  ADD_FAILURE() << "accepted " << j.dump();
  return {};
}

// --- config ----------------------------------------------------------------

TEST_F(ConductorTest, ConfigDefaultsAndFields) {
  const auto cfg = parse_run_config(base());
  EXPECT_EQ(cfg.seed, 7u);
  EXPECT_EQ(cfg.evolve.population_size, 20);
  EXPECT_EQ(cfg.evolve.mutation_rate_pct, 40.0);
  EXPECT_EQ(cfg.gen_rules.max_atoms, 12);
  EXPECT_FALSE(cfg.fitness_rules);
  EXPECT_FALSE(cfg.interaction);
  EXPECT_EQ(cfg.violation_penalty, 0.5);
}

TEST_F(ConductorTest, ConfigErrorsNameTheField) {
  auto j = base();
  j["evolve"]["bogus"] = 1;
  EXPECT_NE(config_error(j).find("evolve.bogus"), std::string::npos);

  j = base();
  j.erase("seed");
  EXPECT_NE(config_error(j).find("seed"), std::string::npos);

  j = base();
  j["gen"]["growth_stop_pct"] = 140;
  EXPECT_NE(config_error(j).find("gen.growth_stop_pct"), std::string::npos);

  j = base();
  j["evolve"]["selection_method"] = "Lottery";
  EXPECT_NE(config_error(j).find("evolve.selection_method"), std::string::npos);

  j = base();
  j["interaction"] = {{"strategy", {{"type", "TopN"}, {"param", 50}}}};
  EXPECT_NE(config_error(j).find("interaction.strategy.param"), std::string::npos);

  j = base();
  j["interaction"] = {{"score_scale", {{{"label", "x"}}}}};
  EXPECT_NE(config_error(j).find("interaction.score_scale[0].value"), std::string::npos);

  j = base();
  j["fitness"].erase("target");
  EXPECT_NE(config_error(j).find("fitness.target"), std::string::npos);
}

TEST_F(ConductorTest, ConfigFileErrors) {
  EXPECT_EQ(code_of([&] { load_run_config(dir_ / "absent.json"); }), ErrorCode::kIOFailure);
  std::ofstream(dir_ / "bad.json") << "{ not json";
  EXPECT_EQ(code_of([&] { load_run_config(dir_ / "bad.json"); }), ErrorCode::kConfigError);
  std::ofstream(dir_ / "good.json") << base().dump();
  EXPECT_EQ(load_run_config(dir_ / "good.json").seed, 7u);
}

TEST_F(ConductorTest, CanonicalFormRoundTrips) {
  auto j = base();
  j["interaction"] = {{"interval_generations", 3}, {"strategy", {{"type", "Banding"}, {"param", 4}}}};
  const auto cfg = parse_run_config(j);
  const auto again = parse_run_config(json::parse(to_json(cfg).dump()));
  EXPECT_EQ(to_json(again).dump(), to_json(cfg).dump());
  EXPECT_EQ(run_id_for(again), run_id_for(cfg));
}

TEST_F(ConductorTest, RunIdTracksTheExperimentOnly) {
  const auto a = parse_run_config(base("a.ndjson"));
  const auto b = parse_run_config(base("b.ndjson"));
  EXPECT_EQ(run_id_for(a), run_id_for(b));
  EXPECT_EQ(run_id_for(a).rfind("run-", 0), 0u);
  auto j = base();
  j["seed"] = 8;
  EXPECT_NE(run_id_for(parse_run_config(j)), run_id_for(a));
}

TEST_F(ConductorTest, ContextRejectsBadChemistry) {
  auto j = base();
  j["fragments"] = {"[C](=[O])-[OH]", "[CH5]"};
  try {
    build_context(parse_run_config(j));
    ADD_FAILURE() << "accepted [CH5]";
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfigError);
    EXPECT_NE(std::string(e.what()).find("fragments[1]"), std::string::npos) << e.what();
  }

  j = base();
  j["fitness"]["target"] = "[CH3]-[CH2";
  EXPECT_ANY_THROW(build_context(parse_run_config(j)));

  j = base();
  j["elements"] = {"C", "O"};
  j["leads"] = {"[NH3]"};
  EXPECT_EQ(code_of([&] { build_context(parse_run_config(j)); }), ErrorCode::kConfigError);

  j = base();
  j["element_overrides"] = {{"C", {{"valence", 0}}}};
  EXPECT_EQ(code_of([&] { build_context(parse_run_config(j)); }), ErrorCode::kConfigError);
}

// --- headless runs -----------------------------------------------------------

TEST_F(ConductorTest, ArchiveHoldsEveryGeneration) {
  const auto cfg = parse_run_config(base());
  const auto status = run_headless(cfg);
  EXPECT_EQ(status.state, RunState::kFinished);
  EXPECT_EQ(status.current_generation, 10);
  ASSERT_TRUE(status.best);

  Archive archive(cfg.archive_path, Archive::Mode::kReadOnly);
  EXPECT_EQ(archive.size(), 11u * 20u);
  for (int g = 0; g <= 10; ++g) {
    const auto records = archive.generation(g);
    ASSERT_EQ(records.size(), 20u) << "generation " << g;
    for (const auto &r : records) {
      EXPECT_EQ(r.run_id, status.run_id);
      EXPECT_NO_THROW(exsmiles::parse(organic(), r.genome)) << r.genome;
    }
  }
  double best = 0;
  for (const auto &r : archive.all())
    best = std::max(best, r.fitness);
  EXPECT_EQ(status.best->fitness, best);

  const auto meta = archive.read_metadata();
  ASSERT_TRUE(meta);
  EXPECT_EQ(meta->at("run_id"), status.run_id);
  EXPECT_TRUE(meta->contains("finished_at"));
}

TEST_F(ConductorTest, ZeroIterationsArchivesTheInitialPopulation) {
  auto j = base();
  j["evolve"]["iterations"] = 0;
  const auto cfg = parse_run_config(j);
  run_headless(cfg);
  Archive archive(cfg.archive_path, Archive::Mode::kReadOnly);
  EXPECT_EQ(archive.size(), 20u);
  EXPECT_EQ(archive.last_generation(), 0);
}

TEST_F(ConductorTest, RunsAreByteReproducible) {
  const auto a = parse_run_config(base("a.ndjson"));
  const auto b = parse_run_config(base("b.ndjson"));
  run_headless(a);
  run_headless(b);
  const auto bytes = slurp(a.archive_path);
  EXPECT_FALSE(bytes.empty());
  EXPECT_EQ(bytes, slurp(b.archive_path));
}

TEST_F(ConductorTest, ExistingArchiveNeedsOverwrite) {
  const auto cfg = parse_run_config(base());
  run_headless(cfg);
  const auto first = slurp(cfg.archive_path);
  EXPECT_EQ(code_of([&] { run_headless(cfg); }), ErrorCode::kIOFailure);
  EXPECT_EQ(slurp(cfg.archive_path), first);
  run_headless(cfg, {}, /*overwrite=*/true);
  EXPECT_EQ(slurp(cfg.archive_path), first);
}

TEST_F(ConductorTest, GenerationHookCanStop) {
  const auto cfg = parse_run_config(base());
  RunHooks hooks;
  hooks.on_generation = [](const RunStatus &s) { return s.current_generation < 3; };
  const auto status = run_headless(cfg, hooks);
  EXPECT_TRUE(status.stopped);
  EXPECT_EQ(status.state, RunState::kFinished);
  Archive archive(cfg.archive_path, Archive::Mode::kReadOnly);
  EXPECT_EQ(archive.last_generation(), 3);
}

TEST_F(ConductorTest, ScoreLogReplaysARun) {
  auto j = base("live.ndjson");
  j["interaction"] = {{"interval_generations", 3}, {"strategy", {{"type", "TopN"}, {"param", 4}}}};
  const auto live = parse_run_config(j);

  ScoreLog log;
  std::vector<int> seen;
  RunHooks hooks;
  hooks.on_interaction = [&](const InteractionSession &session,
                             const Population &) -> std::optional<ScoreMap> {
    seen.push_back(session.generation);
    EXPECT_EQ(session.displayed.size(), 4u);
    if (session.generation == 6)
      return std::nullopt;  // skipped
    ScoreMap scores{{session.displayed[0], 0.25}, {session.displayed[1], 1.0}};
    log[session.generation] = scores;
    return scores;
  };
  run_headless(live, hooks);
  EXPECT_EQ(seen, (std::vector<int>{0, 3, 6, 9}));

  Archive live_archive(live.archive_path, Archive::Mode::kReadOnly);
  int scored = 0;
  for (const auto &r : live_archive.all())
    if (r.user_score) {
      ++scored;
      EXPECT_EQ(r.fitness, *r.user_score);
      EXPECT_TRUE(log.at(r.generation).count(r.chromosome_id));
    }
  EXPECT_EQ(scored, 6);

  const auto reread = parse_score_log(json::parse(to_json(log).dump()));
  EXPECT_EQ(reread, log);

  j["archive_path"] = (dir_ / "replay.ndjson").string();
  const auto replay = parse_run_config(j);
  run_headless(replay, replay_hooks(reread));
  EXPECT_EQ(slurp(replay.archive_path), slurp(live.archive_path));
}

TEST_F(ConductorTest, ScoreLogRejectsGarbage) {
  EXPECT_EQ(code_of([] { parse_score_log(json{{"scores", 3}}); }), ErrorCode::kConfigError);
  EXPECT_EQ(code_of([] {
              parse_score_log(json{{"scores", {{{"generation", 0}, {"value", 1.0}}}}});
            }),
            ErrorCode::kConfigError);
}

// --- controller --------------------------------------------------------------

template <typename Pred> bool eventually(Pred pred, std::chrono::seconds limit = std::chrono::seconds(60)) {
  const auto deadline = std::chrono::steady_clock::now() + limit;
  while (std::chrono::steady_clock::now() < deadline) {
    if (pred())
      return true;
    std::this_thread::sleep_for(std::chrono::milliseconds(2));
  }
  return pred();
}

TEST_F(ConductorTest, ControllerInteractionFlow) {
  auto j = base();
  j["interaction"] = {{"interval_generations", 2}, {"strategy", {{"type", "TopN"}, {"param", 3}}}};
  const auto cfg = parse_run_config(j);

  RunController controller;
  EXPECT_EQ(controller.status().state, RunState::kIdle);
  EXPECT_FALSE(controller.pause());
  EXPECT_FALSE(controller.skip_interaction());
  EXPECT_FALSE(controller.archive());

  const auto run_id = controller.start(cfg);
  EXPECT_EQ(run_id, run_id_for(cfg));
  EXPECT_EQ(code_of([&] { controller.start(cfg); }), ErrorCode::kConflictingRun);

  ASSERT_TRUE(eventually([&] { return controller.status().state == RunState::kAwaitingScores; }));
  auto open = controller.interaction();
  ASSERT_TRUE(open);
  EXPECT_EQ(open->session.generation, 0);
  EXPECT_EQ(controller.status().awaiting_generation, 0);
  ASSERT_EQ(open->session.displayed.size(), 3u);
  const ChromosomeId shown = open->session.displayed[0];
  ChromosomeId hidden = 0;
  for (const auto &c : open->population.members)
    if (std::find(open->session.displayed.begin(), open->session.displayed.end(), c.id) ==
        open->session.displayed.end())
      hidden = c.id;

  EXPECT_EQ(code_of([&] { controller.submit_scores(1, {{shown, 1.0}}); }),
            ErrorCode::kConflictingRun);
  EXPECT_EQ(code_of([&] { controller.submit_scores(0, {{shown, 0.6}}); }),
            ErrorCode::kScoreOffScale);
  EXPECT_EQ(code_of([&] { controller.submit_scores(0, {{hidden, 1.0}}); }),
            ErrorCode::kUnknownChromosomeId);
  EXPECT_EQ(controller.status().state, RunState::kAwaitingScores);
  controller.submit_scores(0, {{shown, 0.0}});

  ASSERT_TRUE(eventually([&] {
    const auto s = controller.status();
    return s.state == RunState::kAwaitingScores && s.awaiting_generation == 2;
  }));
  EXPECT_TRUE(controller.skip_interaction());

  // Generation 0 was archived with the user's verdict.
  const auto archive = controller.archive();
  ASSERT_TRUE(archive);
  bool found = false;
  for (const auto &r : archive->generation(0))
    if (r.chromosome_id == shown) {
      found = true;
      EXPECT_EQ(r.user_score, 0.0);
      EXPECT_EQ(r.fitness, 0.0);
    }
  EXPECT_TRUE(found);

  ASSERT_TRUE(eventually([&] { return controller.status().awaiting_generation == 4; }));
  EXPECT_TRUE(controller.pause());
  EXPECT_TRUE(controller.skip_interaction());
  ASSERT_TRUE(eventually([&] { return controller.status().state == RunState::kPaused; }));
  const int paused_at = controller.status().current_generation;
  std::this_thread::sleep_for(std::chrono::milliseconds(50));
  EXPECT_EQ(controller.status().current_generation, paused_at);
  EXPECT_TRUE(controller.resume());
  EXPECT_FALSE(controller.resume());

  ASSERT_TRUE(eventually([&] { return controller.status().awaiting_generation == 6; }));
  EXPECT_TRUE(controller.stop());
  controller.wait();
  const auto done = controller.status();
  EXPECT_EQ(done.state, RunState::kFinished);
  EXPECT_TRUE(done.stopped);
  EXPECT_FALSE(controller.stop());
  EXPECT_EQ(archive->last_generation(), 6);
}

TEST_F(ConductorTest, ControllerTimesOutInteractions) {
  auto j = base();
  j["evolve"]["iterations"] = 4;
  j["interaction"] = {{"interval_generations", 1}, {"interaction_timeout_s", 0.01}};
  const auto cfg = parse_run_config(j);
  RunController controller;
  controller.start(cfg);
  controller.wait();
  EXPECT_EQ(controller.status().state, RunState::kFinished);
  EXPECT_EQ(controller.archive()->size(), 5u * 20u);
}

TEST_F(ConductorTest, ControllerRestartsAfterFinish) {
  auto j = base();
  j["evolve"]["iterations"] = 2;
  RunController controller(/*overwrite_archives=*/true);
  controller.start(parse_run_config(j));
  controller.wait();
  j["seed"] = 99;
  const auto cfg = parse_run_config(j);
  EXPECT_EQ(controller.start(cfg), run_id_for(cfg));
  controller.wait();
  EXPECT_EQ(controller.status().state, RunState::kFinished);
  EXPECT_EQ(controller.archive()->size(), 3u * 20u);
  EXPECT_EQ(controller.archive()->all().front().run_id, run_id_for(cfg));
}

TEST_F(ConductorTest, ControllerRejectsBadConfigWithoutStarting) {
  auto j = base();
  j["fragments"] = {"[CH5]"};
  RunController controller;
  EXPECT_EQ(code_of([&] { controller.start(parse_run_config(j)); }), ErrorCode::kConfigError);
  EXPECT_EQ(controller.status().state, RunState::kIdle);
}

} // namespace
} // namespace molforge
