//
// MolForge - Copyright 2026 The MolForge Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "molforge/api.hpp"

#include <charconv>
#include <limits>
#include <set>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "molforge/exsmiles.hpp"

namespace molforge {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json graph_json(const MoleculeGraph &g) {
  ordered_json nodes = ordered_json::array(), edges = ordered_json::array();
  for (int i = 0; i < static_cast<int>(g.atom_count()); ++i)
    nodes.push_back({{"id", i}, {"element", g.atom(i).element}, {"h_count", g.atom(i).h_count}});
  for (const auto &b : g.bonds())
    edges.push_back({{"source", b.a}, {"target", b.b}, {"order", b.order}});
  return {{"nodes", nodes}, {"edges", edges}};
}

ordered_json molecule_json(const GenerationRecord &r, const MoleculeGraph &g) {
  auto j = to_json(r);
  j["graph"] = graph_json(g);
  return j;
}

namespace {

[[noreturn]] void bad_query(const std::string &what) {
  throw Error(ErrorCode::kMalformedQuery, what);
}

template <typename T> T number(const std::string &name, const std::string &text) {
  T value{};
  if constexpr (std::is_floating_point_v<T>) {
    std::size_t used = 0;
    try {
      value = static_cast<T>(std::stod(text, &used));
    } catch (const std::exception &) {
      used = 0;
    }
    if (used == 0 || used != text.size())
      bad_query(name + ": not a number: '" + text + "'");
  } else {
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || end != text.data() + text.size())
      bad_query(name + ": not an integer: '" + text + "'");
  }
  return value;
}

template <typename T>
std::optional<Range<T>> range(const std::multimap<std::string, std::string> &params,
                              const std::string &lo_name, const std::string &hi_name) {
  auto lo = params.find(lo_name), hi = params.find(hi_name);
  if (lo == params.end() && hi == params.end())
    return std::nullopt;
  Range<T> r{std::numeric_limits<T>::lowest(), std::numeric_limits<T>::max()};
  if (lo != params.end())
    r.lo = number<T>(lo_name, lo->second);
  if (hi != params.end())
    r.hi = number<T>(hi_name, hi->second);
  return r;
}

} // namespace

ArchiveQuery query_from_params(const std::multimap<std::string, std::string> &params) {
  static const std::set<std::string> kKnown = {"gen_min", "gen_max", "fit_min", "fit_max",
                                               "wt_min",  "wt_max",  "atoms_min", "atoms_max",
                                               "substr",  "limit",   "order_by"};
  for (const auto &[name, value] : params)
    if (!kKnown.count(name))
      bad_query("unknown parameter '" + name + "'");
  ArchiveQuery q;
  q.generation = range<int>(params, "gen_min", "gen_max");
  q.fitness = range<double>(params, "fit_min", "fit_max");
  q.weight = range<double>(params, "wt_min", "wt_max");
  q.heavy_atoms = range<int>(params, "atoms_min", "atoms_max");
  if (auto it = params.find("substr"); it != params.end())
    q.genome_substring = it->second;
  if (auto it = params.find("limit"); it != params.end()) {
    const long limit = number<long>("limit", it->second);
    if (limit < 1)
      bad_query("limit must be >= 1");
    q.limit = static_cast<std::size_t>(limit);
  }
  if (auto it = params.find("order_by"); it != params.end()) {
    auto order = order_by_from_string(it->second);
    if (!order)
      bad_query("order_by must be fitness_desc, generation_asc or weight_asc");
    q.order_by = *order;
  }
  check_query(q);
  return q;
}

int http_status_for(ErrorCode code) {
  switch (code) {
  case ErrorCode::kConfigError:
  case ErrorCode::kMalformedQuery:
  case ErrorCode::kInvalidArgument:
  case ErrorCode::kStrategyParamTooLarge:
    return 400;
  case ErrorCode::kConflictingRun:
    return 409;
  case ErrorCode::kScoreOffScale:
  case ErrorCode::kUnknownChromosomeId:
    return 422;
  default:
    return 500;
  }
}

// --- server ----------------------------------------------------------------

struct ApiServer::Impl {
  RunController &controller;
  std::optional<RunConfig> default_config;
  httplib::Server server;

  Impl(RunController &c, std::optional<RunConfig> cfg) : controller(c), default_config(std::move(cfg)) {}

  static void reply(httplib::Response &res, int status, const ordered_json &body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  static void fail(httplib::Response &res, int status, std::string_view code,
                   const std::string &message) {
    reply(res, status, {{"error", code}, {"message", message}});
  }

  // Runs a handler, translating library errors into JSON error responses.
  template <typename F> static void guarded(httplib::Response &res, F &&body) {
    try {
      body();
    } catch (const Error &e) {
      fail(res, http_status_for(e.code()), to_string(e.code()), e.what());
    } catch (const ParseError &e) {
      fail(res, 400, "ParseError", e.what());
    } catch (const json::exception &e) {
      fail(res, 400, "BadRequest", e.what());
    } catch (const std::exception &e) {
      spdlog::error("request failed: {}", e.what());
      fail(res, 500, "Internal", e.what());
    }
  }

  void routes() {
    server.Get("/api/status", [this](const httplib::Request &, httplib::Response &res) {
      reply(res, 200, to_json(controller.status()));
    });

    server.Post("/api/run", [this](const httplib::Request &req, httplib::Response &res) {
      guarded(res, [&] {
        RunConfig cfg;
        if (req.body.empty()) {
          if (!default_config)
            throw Error(ErrorCode::kConfigError, "no config given and none loaded at startup");
          cfg = *default_config;
        } else {
          cfg = parse_run_config(json::parse(req.body));
        }
        const auto run_id = controller.start(cfg);
        reply(res, 202, {{"run_id", run_id}});
      });
    });

    server.Post(R"(/api/control/(pause|resume|stop|skip-interaction))",
                [this](const httplib::Request &req, httplib::Response &res) {
                  const std::string command = req.matches[1];
                  bool applied = false;
                  if (command == "pause")
                    applied = controller.pause();
                  else if (command == "resume")
                    applied = controller.resume();
                  else if (command == "stop")
                    applied = controller.stop();
                  else
                    applied = controller.skip_interaction();
                  const auto state = controller.status().state;
                  if (!applied)
                    return fail(res, 409, "ConflictingRun",
                                command + " does not apply in state " +
                                    std::string(to_string(state)));
                  reply(res, 200, {{"command", command}, {"state", to_string(state)}});
                });

    server.Get(R"(/api/generations/(\d+)/molecules)",
               [this](const httplib::Request &req, httplib::Response &res) {
                 guarded(res, [&] { molecules(req, res); });
               });

    server.Post(R"(/api/generations/(\d+)/scores)",
                [this](const httplib::Request &req, httplib::Response &res) {
                  guarded(res, [&] {
                    const int generation = number<int>("generation", req.matches[1]);
                    const auto body = json::parse(req.body);
                    ScoreMap scores;
                    for (const auto &s : body.at("scores"))
                      scores[s.at("chromosome_id").get<ChromosomeId>()] =
                          s.at("value").get<double>();
                    controller.submit_scores(generation, scores);
                    reply(res, 200, {{"generation", generation}, {"accepted", scores.size()}});
                  });
                });

    server.Get("/api/history/search", [this](const httplib::Request &req, httplib::Response &res) {
      guarded(res, [&] {
        std::multimap<std::string, std::string> params(req.params.begin(), req.params.end());
        const auto q = query_from_params(params);
        const auto archive = controller.archive();
        ordered_json records = ordered_json::array();
        if (archive) {
          const auto table = controller.table();
          for (const auto &r : archive->search(q))
            records.push_back(molecule_json(r, exsmiles::parse(table, r.genome)));
        }
        reply(res, 200, {{"count", records.size()}, {"records", records}});
      });
    });
  }

  void molecules(const httplib::Request &req, httplib::Response &res) {
    const int generation = number<int>("generation", req.matches[1]);
    const bool displayed_only = req.get_param_value("displayed") == "true";
    const auto status = controller.status();
    const auto table = controller.table();
    ordered_json out = ordered_json::array();
    bool awaiting = false;

    if (auto open = controller.interaction(); open && open->session.generation == generation) {
      // Not archived yet: the population is held until scores are merged.
      awaiting = true;
      auto emit = [&](const Chromosome &c) {
        out.push_back(molecule_json(make_record(table, status.run_id, generation, c), c.graph));
      };
      if (displayed_only) {
        for (ChromosomeId id : open->session.displayed)
          if (const auto *c = open->population.find(id))
            emit(*c);
      } else {
        for (const auto &c : open->population.members)
          emit(c);
      }
    } else {
      const auto archive = controller.archive();
      const auto records = archive ? archive->generation(generation)
                                   : std::vector<GenerationRecord>{};
      if (records.empty())
        return fail(res, 404, "NotFound", "no generation " + std::to_string(generation));
      for (const auto &r : records)
        out.push_back(molecule_json(r, exsmiles::parse(table, r.genome)));
    }
    reply(res, 200, {{"generation", generation}, {"awaiting_scores", awaiting},
                     {"molecules", out}});
  }
};

ApiServer::ApiServer(RunController &controller, std::optional<RunConfig> default_config,
                     std::optional<std::filesystem::path> static_dir)
    : impl_(std::make_unique<Impl>(controller, std::move(default_config))) {
  impl_->routes();
  if (static_dir && !impl_->server.set_mount_point("/", static_dir->string()))
    throw Error(ErrorCode::kIOFailure, "cannot serve " + static_dir->string());
}

ApiServer::~ApiServer() { stop(); }

int ApiServer::bind(const std::string &host, int port) {
  int bound = -1;
  if (port == 0)
    bound = impl_->server.bind_to_any_port(host);
  else if (impl_->server.bind_to_port(host, port))
    bound = port;
  if (bound < 0)
    throw Error(ErrorCode::kBindFailure, "cannot bind " + host + ":" + std::to_string(port));
  spdlog::info("listening on {}:{}", host, bound);
  return bound;
}

void ApiServer::listen() { impl_->server.listen_after_bind(); }

void ApiServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

void ApiServer::stop() { impl_->server.stop(); }

} // namespace molforge
