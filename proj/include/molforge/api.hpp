//
// MolForge - Copyright 2026 The MolForge Authors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLFORGE_API_HPP_
#define MOLFORGE_API_HPP_

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "molforge/archive.hpp"
#include "molforge/conductor.hpp"
#include "molforge/error.hpp"

namespace molforge {

// {"nodes":[{"id","element","h_count"}], "edges":[{"source","target","order"}]}
nlohmann::ordered_json graph_json(const MoleculeGraph &g);

// Record fields plus the graph payload used for client-side depiction.
nlohmann::ordered_json molecule_json(const GenerationRecord &r, const MoleculeGraph &g);

// gen_min/gen_max, fit_min/fit_max, wt_min/wt_max, atoms_min/atoms_max,
// substr, limit, order_by. A lone bound leaves the other end open.
// kMalformedQuery on unparsable values or unknown parameters.
ArchiveQuery query_from_params(const std::multimap<std::string, std::string> &params);

int http_status_for(ErrorCode code);

// HTTP/JSON front end for a RunController:
//   GET  /api/status
//   POST /api/run                              (202, 409 while a run is active)
//   POST /api/control/{pause|resume|stop|skip-interaction}
//   GET  /api/generations/{g}/molecules[?displayed=true]
//   POST /api/generations/{g}/scores           {"scores":[{"chromosome_id","value"}]}
//   GET  /api/history/search?...
// Errors are {"error": <code name>, "message": ...}.
class ApiServer {
public:
  ApiServer(RunController &controller, std::optional<RunConfig> default_config,
            std::optional<std::filesystem::path> static_dir = std::nullopt);
  ~ApiServer();

  ApiServer(const ApiServer &) = delete;
  ApiServer &operator=(const ApiServer &) = delete;

  // Port 0 picks a free port. Returns the bound port; kBindFailure otherwise.
  int bind(const std::string &host, int port);
  // Serves until stop(); call after bind().
  void listen();
  // For callers running listen() on another thread.
  void wait_until_ready() const;
  void stop();

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

} // namespace molforge

#endif // MOLFORGE_API_HPP_
