//
// MolForge - Copyright 2026 The MolForge Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "molforge/conductor.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>

#include <spdlog/spdlog.h>

#include "molforge/error.hpp"
#include "molforge/evolve.hpp"
#include "molforge/genesis.hpp"

namespace molforge {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(RunState state) {
  switch (state) {
  case RunState::kIdle: return "Idle";
  case RunState::kRunning: return "Running";
  case RunState::kPaused: return "Paused";
  case RunState::kAwaitingScores: return "AwaitingScores";
  case RunState::kFinished: return "Finished";
  case RunState::kFailed: return "Failed";
  }
  return "Unknown";
}

ordered_json to_json(const RunStatus &s) {
  ordered_json j;
  j["run_id"] = s.run_id;
  j["state"] = to_string(s.state);
  j["current_generation"] = s.current_generation;
  j["awaiting_generation"] =
      s.awaiting_generation ? ordered_json(*s.awaiting_generation) : ordered_json(nullptr);
  if (s.best)
    j["best"] = {{"chromosome_id", s.best->id},
                 {"generation", s.best->generation},
                 {"genome", s.best->genome},
                 {"fitness", s.best->fitness}};
  else
    j["best"] = nullptr;
  j["population_size"] = s.population_size;
  j["stopped"] = s.stopped;
  j["failure"] = s.failure.empty() ? ordered_json(nullptr) : ordered_json(s.failure);
  return j;
}

// --- score logs ------------------------------------------------------------

ScoreLog parse_score_log(const json &j) {
  ScoreLog log;
  try {
    for (const auto &entry : j.at("scores"))
      log[entry.at("generation").get<int>()][entry.at("chromosome_id").get<ChromosomeId>()] =
          entry.at("value").get<double>();
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kConfigError, std::string("malformed score log: ") + e.what());
  }
  return log;
}

ScoreLog load_score_log(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::kIOFailure, "cannot read score log " + path.string());
  try {
    return parse_score_log(json::parse(in));
  } catch (const json::parse_error &e) {
    throw Error(ErrorCode::kConfigError, path.string() + ": not valid JSON");
  }
}

ordered_json to_json(const ScoreLog &log) {
  ordered_json scores = ordered_json::array();
  for (const auto &[generation, map] : log)
    for (const auto &[id, value] : map)
      scores.push_back({{"generation", generation}, {"chromosome_id", id}, {"value", value}});
  return {{"scores", scores}};
}

RunHooks replay_hooks(ScoreLog log) {
  RunHooks hooks;
  hooks.on_interaction = [log = std::move(log)](const InteractionSession &session,
                                                const Population &) -> std::optional<ScoreMap> {
    auto it = log.find(session.generation);
    if (it == log.end())
      return std::nullopt;
    return it->second;
  };
  return hooks;
}

// --- run loop --------------------------------------------------------------

RunStatus run_evolution(const RunConfig &cfg, Archive &archive, const RunHooks &hooks) {
  const RunContext ctx = build_context(cfg);
  const FitnessEvaluator evaluator(ctx.spec.table, ctx.fitness);
  const FitnessFn fitness = [&](const MoleculeGraph &g) { return evaluator(g); };
  const SimilarityFn pair_similarity = [](const Chromosome &a, const Chromosome &b) {
    return similarity(fingerprint(a.graph), fingerprint(b.graph));
  };

  RunStatus status;
  status.run_id = run_id_for(cfg);
  status.state = RunState::kRunning;
  status.population_size = cfg.evolve.population_size;
  spdlog::info("run {} starting: seed {}, population {}, {} iterations", status.run_id, cfg.seed,
               cfg.evolve.population_size, cfg.evolve.iterations);
  if (cfg.interaction && !hooks.on_interaction)
    spdlog::warn("interaction configured but nobody is listening; system scores stand");

  Rng rng(cfg.seed);
  Population pop = initial_population(ctx.spec, ctx.leads, cfg.evolve.population_size, rng);
  for (auto &c : pop.members)
    c.fitness = fitness(c.graph);

  for (;;) {
    status.current_generation = pop.generation;

    if (cfg.interaction && pop.generation % cfg.interaction->interval_generations == 0) {
      auto session = select_for_display(pop, *cfg.interaction, rng);
      if (hooks.on_interaction) {
        if (auto scores = hooks.on_interaction(session, pop)) {
          session.pending_scores = std::move(*scores);
          pop = merge_user_scores(pop, session, *cfg.interaction);
          spdlog::info("generation {}: merged {} user scores", pop.generation,
                       session.pending_scores.size());
        } else {
          spdlog::info("generation {}: interaction skipped", pop.generation);
        }
      }
    }

    std::vector<GenerationRecord> records;
    records.reserve(pop.members.size());
    for (const auto &c : pop.members)
      records.push_back(make_record(ctx.spec.table, status.run_id, pop.generation, c));
    archive.append_generation(records);

    const auto &top = pop.members[fitness_order(pop).front()];
    if (!status.best || top.fitness > status.best->fitness)
      status.best = BestChromosome{top.id, pop.generation, top.genome, top.fitness};
    spdlog::debug("generation {}: best {:.4f} ({})", pop.generation, top.fitness, top.genome);

    const bool proceed = !hooks.on_generation || hooks.on_generation(status);
    if (pop.generation >= cfg.evolve.iterations)
      break;
    if (!proceed) {
      status.stopped = true;
      spdlog::info("run {} stopped after generation {}", status.run_id, pop.generation);
      break;
    }
    pop = step_generation(pop, cfg.evolve, fitness, pair_similarity, ctx.spec, rng);
  }

  status.state = RunState::kFinished;
  spdlog::info("run {} finished at generation {}; best {:.4f} {}", status.run_id,
               status.current_generation, status.best->fitness, status.best->genome);
  return status;
}

namespace {

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::shared_ptr<Archive> open_fresh_archive(const std::filesystem::path &path, bool overwrite) {
  std::error_code ec;
  if (std::filesystem::exists(path, ec) && std::filesystem::file_size(path, ec) > 0) {
    if (!overwrite)
      throw Error(ErrorCode::kIOFailure,
                  "archive " + path.string() + " already holds records (use overwrite)");
    std::filesystem::remove(path, ec);
    std::filesystem::remove(Archive::metadata_path(path), ec);
    if (ec)
      throw Error(ErrorCode::kIOFailure, "cannot remove " + path.string() + ": " + ec.message());
  }
  return std::make_shared<Archive>(path);
}

ordered_json start_metadata(const RunConfig &cfg) {
  return {{"run_id", run_id_for(cfg)}, {"config", to_json(cfg)}, {"started_at", utc_now()}};
}

void finish_metadata(const Archive &archive, ordered_json meta, const RunStatus &status) {
  meta["finished_at"] = utc_now();
  meta["status"] = to_json(status);
  archive.write_metadata(meta);
}

} // namespace

RunStatus run_headless(const RunConfig &cfg, const RunHooks &hooks, bool overwrite) {
  build_context(cfg);  // fail on config problems before touching the archive
  auto archive = open_fresh_archive(cfg.archive_path, overwrite);
  auto meta = start_metadata(cfg);
  archive->write_metadata(meta);
  RunStatus status;
  try {
    status = run_evolution(cfg, *archive, hooks);
  } catch (const std::exception &e) {
    status.run_id = meta.value("run_id", "");
    status.state = RunState::kFailed;
    status.failure = e.what();
    finish_metadata(*archive, meta, status);
    throw;
  }
  finish_metadata(*archive, meta, status);
  return status;
}

// --- controller ------------------------------------------------------------

RunController::RunController(bool overwrite_archives) : overwrite_(overwrite_archives) {}

RunController::~RunController() {
  stop();
  wait();
}

std::string RunController::start(const RunConfig &cfg) {
  std::unique_lock lock(mu_);
  const auto state = status_.state;
  if (state == RunState::kRunning || state == RunState::kPaused ||
      state == RunState::kAwaitingScores)
    throw Error(ErrorCode::kConflictingRun, "run " + status_.run_id + " is still active");
  if (thread_.joinable())
    thread_.join();  // the previous run has already ended

  const auto ctx = build_context(cfg);
  auto archive = open_fresh_archive(cfg.archive_path, overwrite_);

  status_ = {};
  status_.run_id = run_id_for(cfg);
  status_.state = RunState::kRunning;
  status_.population_size = cfg.evolve.population_size;
  pause_requested_ = stop_requested_ = skip_requested_ = false;
  interaction_.reset();
  submitted_.reset();
  interaction_cfg_ = cfg.interaction;
  interaction_timeout_s_ = cfg.interaction_timeout_s;
  archive_ = archive;
  table_ = ctx.spec.table;
  thread_ = std::thread(&RunController::worker, this, cfg, archive);
  return status_.run_id;
}

void RunController::worker(RunConfig cfg, std::shared_ptr<Archive> archive) {
  RunHooks hooks;
  hooks.on_interaction = [this](const InteractionSession &session,
                                const Population &pop) -> std::optional<ScoreMap> {
    std::unique_lock lock(mu_);
    if (stop_requested_)
      return std::nullopt;
    interaction_ = Snapshot{session, pop};
    submitted_.reset();
    skip_requested_ = false;
    status_.state = RunState::kAwaitingScores;
    status_.current_generation = session.generation;
    status_.awaiting_generation = session.generation;
    spdlog::info("generation {}: awaiting scores for {} molecules", session.generation,
                 session.displayed.size());

    auto answered = [this] { return submitted_ || skip_requested_ || stop_requested_; };
    if (interaction_timeout_s_) {
      const auto limit = std::chrono::duration<double>(*interaction_timeout_s_);
      if (!cv_.wait_for(lock, limit, answered))
        spdlog::info("generation {}: interaction timed out", session.generation);
    } else {
      cv_.wait(lock, answered);
    }
    auto scores = std::move(submitted_);
    submitted_.reset();
    interaction_.reset();
    skip_requested_ = false;
    status_.awaiting_generation.reset();
    status_.state = RunState::kRunning;
    return scores;
  };
  hooks.on_generation = [this](const RunStatus &progress) {
    std::unique_lock lock(mu_);
    status_.current_generation = progress.current_generation;
    status_.best = progress.best;
    if (pause_requested_ && !stop_requested_) {
      status_.state = RunState::kPaused;
      spdlog::info("paused after generation {}", progress.current_generation);
      cv_.wait(lock, [this] { return !pause_requested_ || stop_requested_; });
      status_.state = RunState::kRunning;
    }
    return !stop_requested_;
  };

  auto meta = start_metadata(cfg);
  try {
    archive->write_metadata(meta);
    auto final_status = run_evolution(cfg, *archive, hooks);
    finish_metadata(*archive, meta, final_status);
    std::lock_guard lock(mu_);
    status_ = final_status;
  } catch (const std::exception &e) {
    spdlog::error("run {} failed: {}", status_.run_id, e.what());
    std::lock_guard lock(mu_);
    status_.state = RunState::kFailed;
    status_.failure = e.what();
    status_.awaiting_generation.reset();
    interaction_.reset();
  }
  cv_.notify_all();
}

bool RunController::pause() {
  std::lock_guard lock(mu_);
  if (status_.state != RunState::kRunning && status_.state != RunState::kAwaitingScores)
    return false;
  pause_requested_ = true;
  return true;
}

bool RunController::resume() {
  std::lock_guard lock(mu_);
  if (!pause_requested_)
    return false;
  pause_requested_ = false;
  cv_.notify_all();
  return true;
}

bool RunController::stop() {
  std::lock_guard lock(mu_);
  const auto state = status_.state;
  if (state != RunState::kRunning && state != RunState::kPaused &&
      state != RunState::kAwaitingScores)
    return false;
  stop_requested_ = true;
  cv_.notify_all();
  return true;
}

bool RunController::skip_interaction() {
  std::lock_guard lock(mu_);
  if (status_.state != RunState::kAwaitingScores)
    return false;
  skip_requested_ = true;
  cv_.notify_all();
  return true;
}

void RunController::submit_scores(int generation, const ScoreMap &scores) {
  std::lock_guard lock(mu_);
  if (status_.state != RunState::kAwaitingScores || !interaction_ ||
      status_.awaiting_generation != generation)
    throw Error(ErrorCode::kConflictingRun,
                "not awaiting scores for generation " + std::to_string(generation));
  for (const auto &[id, value] : scores)
    check_user_score(interaction_->session, *interaction_cfg_, id, value);
  submitted_ = scores;
  cv_.notify_all();
}

RunStatus RunController::status() const {
  std::lock_guard lock(mu_);
  return status_;
}

std::optional<RunController::Snapshot> RunController::interaction() const {
  std::lock_guard lock(mu_);
  return interaction_;
}

std::shared_ptr<const Archive> RunController::archive() const {
  std::lock_guard lock(mu_);
  return archive_;
}

ElementTable RunController::table() const {
  std::lock_guard lock(mu_);
  return table_;
}

void RunController::wait() {
  std::thread worker;
  {
    std::lock_guard lock(mu_);
    worker = std::move(thread_);
  }
  if (worker.joinable())
    worker.join();
}

// --- logging ---------------------------------------------------------------

void init_logging() {
  spdlog::set_level(spdlog::level::info);
  const char *env = std::getenv("MOLFORGE_LOG");
  if (!env || !*env)
    return;
  const std::string name(env);
  const auto level = spdlog::level::from_str(name);
  if (level == spdlog::level::off && name != "off") {
    spdlog::warn("MOLFORGE_LOG: unknown level '{}', keeping info", name);
    return;
  }
  spdlog::set_level(level);
}

} // namespace molforge
