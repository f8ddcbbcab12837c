//
// MolForge - Copyright 2026 The MolForge Authors
// SPDX-License-Identifier: Apache-2.0
//

#include <chrono>
#include <filesystem>
#include <thread>
#include <unistd.h>

#include <httplib.h>

#include "molforge/api.hpp"
#include "test_support.hpp"

namespace molforge {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using testing::code_of;

TEST(QueryParams, ParsesEveryFilter) {
  const auto q = query_from_params({{"gen_min", "2"}, {"gen_max", "5"}, {"fit_min", "0.25"},
                                    {"wt_max", "120.5"}, {"atoms_min", "3"}, {"substr", "[OH]"},
                                    {"limit", "7"}, {"order_by", "fitness_desc"}});
  ASSERT_TRUE(q.generation);
  EXPECT_EQ(q.generation->lo, 2);
  EXPECT_EQ(q.generation->hi, 5);
  ASSERT_TRUE(q.fitness);
  EXPECT_EQ(q.fitness->lo, 0.25);
  EXPECT_TRUE(q.fitness->contains(1e300));
  ASSERT_TRUE(q.weight);
  EXPECT_EQ(q.weight->hi, 120.5);
  EXPECT_TRUE(q.weight->contains(0.0));
  ASSERT_TRUE(q.heavy_atoms);
  EXPECT_EQ(q.heavy_atoms->lo, 3);
  EXPECT_EQ(q.genome_substring, "[OH]");
  EXPECT_EQ(q.limit, 7u);
  EXPECT_EQ(q.order_by, OrderBy::kFitnessDesc);

  const auto empty = query_from_params({});
  EXPECT_FALSE(empty.generation || empty.fitness || empty.weight || empty.heavy_atoms ||
               empty.genome_substring || empty.limit);
}

TEST(QueryParams, RejectsMalformedInput) {
  for (const std::multimap<std::string, std::string> &bad :
       std::vector<std::multimap<std::string, std::string>>{
           {{"gen_min", "x"}},
           {{"gen_min", "3"}, {"gen_max", "1"}},
           {{"fit_min", "nan"}},
           {{"fit_max", "0.5z"}},
           {{"limit", "0"}},
           {{"limit", "-4"}},
           {{"order_by", "random"}},
           {{"colour", "blue"}}})
    EXPECT_EQ(code_of([&] { query_from_params(bad); }), ErrorCode::kMalformedQuery)
        << bad.begin()->first;
}

TEST(HttpStatus, MapsErrorCodes) {
  EXPECT_EQ(http_status_for(ErrorCode::kMalformedQuery), 400);
  EXPECT_EQ(http_status_for(ErrorCode::kConfigError), 400);
  EXPECT_EQ(http_status_for(ErrorCode::kConflictingRun), 409);
  EXPECT_EQ(http_status_for(ErrorCode::kScoreOffScale), 422);
  EXPECT_EQ(http_status_for(ErrorCode::kUnknownChromosomeId), 422);
  EXPECT_EQ(http_status_for(ErrorCode::kIOFailure), 500);
}

TEST(GraphJson, ListsNodesAndEdges) {
  const auto j = graph_json(testing::mol("[CH3]-[CH]=[O]"));
  ASSERT_EQ(j["nodes"].size(), 3u);
  EXPECT_EQ(j["nodes"][0]["element"], "C");
  EXPECT_EQ(j["nodes"][0]["h_count"], 3);
  ASSERT_EQ(j["edges"].size(), 2u);
  int orders = 0;
  for (const auto &e : j["edges"])
    orders += e["order"].get<int>();
  EXPECT_EQ(orders, 3);
}

class ApiTest : public ::testing::Test {
protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("molforge-api-" + std::to_string(::getpid()) + "-" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    server_ = std::make_unique<ApiServer>(controller_, std::nullopt);
    port_ = server_->bind("127.0.0.1", 0);
    thread_ = std::thread([this] { server_->listen(); });
    server_->wait_until_ready();
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
    client_->set_read_timeout(30, 0);
  }
  void TearDown() override {
    controller_.stop();
    controller_.wait();
    server_->stop();
    thread_.join();
    fs::remove_all(dir_);
  }

  json config(int iterations = 6) const {
    return {
        {"seed", 11},
        {"gen", {{"rules", {{"min_atoms", 2}, {"max_atoms", 10}}}}},
        {"evolve", {{"population_size", 12}, {"iterations", iterations}}},
        {"fitness", {{"target", "[CH3]-[OH]"}}},
        {"interaction", {{"interval_generations", 3}, {"strategy", {{"type", "TopN"}, {"param", 4}}}}},
        {"archive_path", (dir_ / "run.ndjson").string()},
    };
  }

  json get(const std::string &path, int expect = 200) {
    auto res = client_->Get(path);
    EXPECT_TRUE(res) << path;
    if (!res)
      return {};
    EXPECT_EQ(res->status, expect) << path << " -> " << res->body;
    return json::parse(res->body);
  }

  json post(const std::string &path, const json &body, int expect) {
    auto res = client_->Post(path, body.is_null() ? "" : body.dump(), "application/json");
    EXPECT_TRUE(res) << path;
    if (!res)
      return {};
    EXPECT_EQ(res->status, expect) << path << " -> " << res->body;
    return json::parse(res->body);
  }

  std::string state() { return get("/api/status")["state"]; }

  bool await_state(const std::string &want) {
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(60);
    while (std::chrono::steady_clock::now() < deadline) {
      if (state() == want)
        return true;
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    return false;
  }

  bool await_generation(int g) {
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(60);
    while (std::chrono::steady_clock::now() < deadline) {
      if (get("/api/status")["awaiting_generation"] == g)
        return true;
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    return false;
  }

  fs::path dir_;
  RunController controller_;
  std::unique_ptr<ApiServer> server_;
  int port_ = 0;
  std::thread thread_;
  std::unique_ptr<httplib::Client> client_;
};

TEST_F(ApiTest, InteractiveRunOverHttp) {
  EXPECT_EQ(state(), "Idle");
  EXPECT_EQ(post("/api/run", nullptr, 400)["error"], "ConfigError");
  EXPECT_EQ(post("/api/control/pause", json::object(), 409)["error"], "ConflictingRun");

  const auto started = post("/api/run", config(), 202);
  ASSERT_TRUE(started.contains("run_id"));
  EXPECT_EQ(post("/api/run", config(), 409)["error"], "ConflictingRun");

  ASSERT_TRUE(await_state("AwaitingScores"));
  auto status = get("/api/status");
  EXPECT_EQ(status["run_id"], started["run_id"]);
  EXPECT_EQ(status["awaiting_generation"], 0);

  const auto shown = get("/api/generations/0/molecules?displayed=true");
  EXPECT_TRUE(shown["awaiting_scores"].get<bool>());
  ASSERT_EQ(shown["molecules"].size(), 4u);
  for (const auto &m : shown["molecules"]) {
    EXPECT_TRUE(m.contains("graph"));
    EXPECT_TRUE(m.contains("genome"));
    EXPECT_EQ(m["generation"], 0);
  }
  EXPECT_EQ(get("/api/generations/0/molecules")["molecules"].size(), 12u);
  const auto id = shown["molecules"][0]["chromosome_id"].get<ChromosomeId>();

  auto scores = [](ChromosomeId c, double v) {
    return json{{"scores", {{{"chromosome_id", c}, {"value", v}}}}};
  };
  EXPECT_EQ(post("/api/generations/0/scores", scores(id, 0.6), 422)["error"], "ScoreOffScale");
  EXPECT_EQ(post("/api/generations/0/scores", scores(999999, 1.0), 422)["error"],
            "UnknownChromosomeId");
  EXPECT_EQ(post("/api/generations/2/scores", scores(id, 1.0), 409)["error"], "ConflictingRun");
  EXPECT_EQ(post("/api/generations/0/scores", json{{"nope", 1}}, 400)["error"], "BadRequest");
  const auto accepted = post("/api/generations/0/scores", scores(id, 1.0), 200);
  EXPECT_EQ(accepted["accepted"], 1);

  // Generation 3 waits next; skip it and let the run finish.
  ASSERT_TRUE(await_generation(3));
  EXPECT_EQ(post("/api/control/skip-interaction", json::object(), 200)["command"],
            "skip-interaction");
  ASSERT_TRUE(await_generation(6));
  post("/api/control/skip-interaction", json::object(), 200);
  ASSERT_TRUE(await_state("Finished"));
  status = get("/api/status");
  ASSERT_TRUE(status["best"].is_object());
  EXPECT_EQ(status["current_generation"], 6);

  // Archived generation 0 carries the user's score.
  const auto archived = get("/api/generations/0/molecules");
  EXPECT_FALSE(archived["awaiting_scores"].get<bool>());
  bool found = false;
  for (const auto &m : archived["molecules"])
    if (m["chromosome_id"] == id) {
      found = true;
      EXPECT_EQ(m["user_score"], 1.0);
    }
  EXPECT_TRUE(found);
  EXPECT_EQ(get("/api/generations/42/molecules", 404)["error"], "NotFound");
}

TEST_F(ApiTest, HistorySearch) {
  auto cfg = config(4);
  cfg.erase("interaction");
  post("/api/run", cfg, 202);
  ASSERT_TRUE(await_state("Finished"));

  const auto all = get("/api/history/search");
  EXPECT_EQ(all["count"], 5 * 12);
  const auto top = get("/api/history/search?order_by=fitness_desc&limit=3&gen_min=1");
  ASSERT_EQ(top["count"], 3);
  double prev = 2;
  for (const auto &r : top["records"]) {
    EXPECT_GE(r["generation"].get<int>(), 1);
    EXPECT_LE(r["fitness"].get<double>(), prev);
    prev = r["fitness"].get<double>();
    EXPECT_TRUE(r.contains("graph"));
  }
  const auto gen2 = get("/api/history/search?gen_min=2&gen_max=2");
  EXPECT_EQ(gen2["count"], 12);
  EXPECT_EQ(get("/api/history/search?gen_min=3&gen_max=1", 400)["error"], "MalformedQuery");
  EXPECT_EQ(get("/api/history/search?colour=red", 400)["error"], "MalformedQuery");
}

TEST_F(ApiTest, PauseResumeStop) {
  auto cfg = config(100000);
  cfg.erase("interaction");
  post("/api/run", cfg, 202);
  EXPECT_EQ(post("/api/control/pause", json::object(), 200)["command"], "pause");
  ASSERT_TRUE(await_state("Paused"));
  const int at = get("/api/status")["current_generation"];
  std::this_thread::sleep_for(std::chrono::milliseconds(50));
  EXPECT_EQ(get("/api/status")["current_generation"], at);
  EXPECT_EQ(post("/api/control/skip-interaction", json::object(), 409)["error"], "ConflictingRun");
  post("/api/control/resume", json::object(), 200);
  post("/api/control/stop", json::object(), 200);
  ASSERT_TRUE(await_state("Finished"));
  EXPECT_TRUE(get("/api/status")["stopped"].get<bool>());
}

} // namespace
} // namespace molforge
