//
// MolForge - Copyright 2026 The MolForge Authors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLFORGE_CONDUCTOR_HPP_
#define MOLFORGE_CONDUCTOR_HPP_

#include <condition_variable>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>

#include "molforge/archive.hpp"
#include "molforge/config.hpp"
#include "molforge/fitness.hpp"
#include "molforge/population.hpp"

namespace molforge {

enum class RunState { kIdle, kRunning, kPaused, kAwaitingScores, kFinished, kFailed };

std::string_view to_string(RunState state);

struct BestChromosome {
  ChromosomeId id = 0;
  int generation = 0;
  std::string genome;
  double fitness = 0;
};

struct RunStatus {
  std::string run_id;
  RunState state = RunState::kIdle;
  int current_generation = 0;
  std::optional<int> awaiting_generation;
  std::optional<BestChromosome> best;
  int population_size = 0;
  bool stopped = false;  // finished early on request
  std::string failure;   // set in kFailed
};

nlohmann::ordered_json to_json(const RunStatus &status);

using ScoreMap = std::map<ChromosomeId, double>;

// Callbacks through which a caller steers the run loop. All optional.
struct RunHooks {
  // Called at every interaction point. Returns the user's scores, or nullopt
  // to skip (system scores stand). Absent: every interaction is skipped.
  std::function<std::optional<ScoreMap>(const InteractionSession &, const Population &)>
      on_interaction;
  // Called at each generation boundary after archiving; return false to stop.
  std::function<bool(const RunStatus &)> on_generation;
};

// Recorded submissions keyed by generation, for replaying a steered run.
using ScoreLog = std::map<int, ScoreMap>;

// {"scores":[{"generation":g,"chromosome_id":id,"value":v},...]}
ScoreLog parse_score_log(const nlohmann::json &j);
ScoreLog load_score_log(const std::filesystem::path &path);
nlohmann::ordered_json to_json(const ScoreLog &log);

// Hooks that answer each interaction from a recorded log (skip when the
// generation has no entry).
RunHooks replay_hooks(ScoreLog log);

// The whole run: initial population, then per generation
//   evaluate -> interaction -> merge -> archive -> step.
// Returns the kFinished status; kConfigError, kGenerationExhausted and
// kIOFailure propagate.
RunStatus run_evolution(const RunConfig &cfg, Archive &archive, const RunHooks &hooks = {});

// Opens (creating or, with overwrite, truncating) the config's archive and
// runs. kIOFailure when the archive exists and is non-empty without overwrite.
RunStatus run_headless(const RunConfig &cfg, const RunHooks &hooks = {}, bool overwrite = false);

// Owns one background run at a time and mediates between it and API callers.
// Control commands take effect at generation boundaries; interaction points
// block until scores are submitted, the interaction is skipped, the run is
// stopped, or the configured timeout passes.
class RunController {
public:
  explicit RunController(bool overwrite_archives = false);
  ~RunController();

  RunController(const RunController &) = delete;
  RunController &operator=(const RunController &) = delete;

  // kConflictingRun while a run is active; kConfigError for a bad config.
  std::string start(const RunConfig &cfg);

  // Each returns false when the command does not apply in the current state.
  bool pause();
  bool resume();
  bool stop();
  bool skip_interaction();

  // kConflictingRun unless awaiting scores for `generation`;
  // kUnknownChromosomeId / kScoreOffScale from the session checks.
  void submit_scores(int generation, const ScoreMap &scores);

  RunStatus status() const;

  struct Snapshot {
    InteractionSession session;
    Population population;
  };
  // The open interaction, if any.
  std::optional<Snapshot> interaction() const;

  // Archive of the current (or last) run; null before the first start.
  std::shared_ptr<const Archive> archive() const;
  ElementTable table() const;

  // Blocks until the background run (if any) has ended.
  void wait();

private:
  void worker(RunConfig cfg, std::shared_ptr<Archive> archive);

  bool overwrite_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  RunStatus status_;
  bool pause_requested_ = false;
  bool stop_requested_ = false;
  std::optional<Snapshot> interaction_;
  std::optional<ScoreMap> submitted_;
  bool skip_requested_ = false;
  std::optional<InteractionConfig> interaction_cfg_;
  std::optional<double> interaction_timeout_s_;
  std::shared_ptr<Archive> archive_;
  ElementTable table_ = ElementTable::organic();
  std::thread thread_;
};

// MOLFORGE_LOG (trace|debug|info|warn|error|critical|off) sets the level;
// default info.
void init_logging();

} // namespace molforge

#endif // MOLFORGE_CONDUCTOR_HPP_
