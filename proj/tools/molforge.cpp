//
// MolForge - Copyright 2026 The MolForge Authors
// SPDX-License-Identifier: Apache-2.0
//
// molforge: run, serve, browse and export evolutionary molecule searches.

#include <csignal>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <pthread.h>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "molforge/api.hpp"
#include "molforge/archive.hpp"
#include "molforge/conductor.hpp"
#include "molforge/config.hpp"

namespace mf = molforge;

namespace {

// Exit codes: 0 ok, 1 bad config / query / input, 2 I/O, 3 anything else.
int exit_code_for(mf::ErrorCode code) {
  switch (code) {
  case mf::ErrorCode::kConfigError:
  case mf::ErrorCode::kMalformedQuery:
  case mf::ErrorCode::kInvalidArgument:
  case mf::ErrorCode::kStrategyParamTooLarge:
    return 1;
  case mf::ErrorCode::kIOFailure:
  case mf::ErrorCode::kBindFailure:
    return 2;
  default:
    return 3;
  }
}

struct Filters {
  std::optional<std::string> gen_min, gen_max, fit_min, fit_max, wt_min, wt_max, atoms_min,
      atoms_max, substr, limit, order_by;

  // Reuses the HTTP query grammar so both front ends validate identically.
  mf::ArchiveQuery query() const {
    std::multimap<std::string, std::string> params;
    auto put = [&](const char *name, const std::optional<std::string> &v) {
      if (v)
        params.emplace(name, *v);
    };
    put("gen_min", gen_min);
    put("gen_max", gen_max);
    put("fit_min", fit_min);
    put("fit_max", fit_max);
    put("wt_min", wt_min);
    put("wt_max", wt_max);
    put("atoms_min", atoms_min);
    put("atoms_max", atoms_max);
    put("substr", substr);
    put("limit", limit);
    put("order_by", order_by);
    return mf::query_from_params(params);
  }
};

void print_table(const std::vector<mf::GenerationRecord> &records) {
  std::printf("%5s %8s %8s %6s %9s  %s\n", "gen", "id", "fitness", "atoms", "weight", "smiles");
  for (const auto &r : records)
    std::printf("%5d %8llu %8.4f %6d %9.3f  %s\n", r.generation,
                static_cast<unsigned long long>(r.chromosome_id), r.fitness, r.heavy_atoms,
                r.weight, r.standard_smiles.c_str());
}

void print_ndjson(const std::vector<mf::GenerationRecord> &records) {
  for (const auto &r : records)
    std::cout << mf::to_json(r).dump() << '\n';
}

int cmd_run(const std::string &config_path, const std::optional<std::string> &scores,
            bool overwrite) {
  const auto cfg = mf::load_run_config(config_path);
  mf::RunHooks hooks;
  if (scores)
    hooks = mf::replay_hooks(mf::load_score_log(*scores));
  const auto status = mf::run_headless(cfg, hooks, overwrite);
  std::cout << mf::to_json(status).dump(2) << '\n';
  return 0;
}

int cmd_serve(const std::optional<std::string> &config_path, std::optional<std::string> bind,
              std::optional<int> port, const std::optional<std::string> &ui_dir, bool overwrite,
              bool autostart) {
  std::optional<mf::RunConfig> cfg;
  if (config_path)
    cfg = mf::load_run_config(*config_path);
  if (autostart && !cfg)
    throw mf::Error(mf::ErrorCode::kConfigError, "--autostart needs a config");
  const mf::ApiConfig api = cfg && cfg->api ? *cfg->api : mf::ApiConfig{};

  // Signals go to a dedicated thread so shutdown runs outside a handler.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  mf::RunController controller(overwrite);
  mf::ApiServer server(controller, cfg,
                       ui_dir ? std::optional<std::filesystem::path>(*ui_dir) : std::nullopt);
  server.bind(bind.value_or(api.bind), port.value_or(api.port));
  if (autostart)
    controller.start(*cfg);

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    spdlog::info("signal {}: shutting down", sig);
    controller.stop();
    server.stop();
  });
  server.listen();
  // listen() only returns after stop(); make sure the waiter is not left blocked.
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  controller.wait();
  return 0;
}

int cmd_browse(const std::string &archive_path, const Filters &filters,
               const std::string &format) {
  const auto q = filters.query();
  const mf::Archive archive(archive_path, mf::Archive::Mode::kReadOnly);
  const auto records = archive.search(q);
  if (format == "ndjson")
    print_ndjson(records);
  else
    print_table(records);
  return 0;
}

int cmd_export(const std::string &archive_path, int generation, const std::string &format) {
  const mf::Archive archive(archive_path, mf::Archive::Mode::kReadOnly);
  const auto records = archive.generation(generation);
  if (records.empty())
    throw mf::Error(mf::ErrorCode::kInvalidArgument,
                    "no generation " + std::to_string(generation) + " in " + archive_path);
  if (format == "ndjson") {
    print_ndjson(records);
  } else {
    for (const auto &r : records)
      std::cout << r.standard_smiles << '\n';
  }
  return 0;
}

int cmd_validate(const std::string &config_path) {
  const auto cfg = mf::load_run_config(config_path);
  const auto ctx = mf::build_context(cfg);
  std::cout << "ok " << mf::run_id_for(cfg) << ": " << ctx.spec.table.heavy_elements().size() << " elements, "
            << ctx.spec.fragments.size() << " fragments, " << ctx.leads.size() << " leads\n";
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  // Logs go to stderr; stdout carries results.
  spdlog::set_default_logger(spdlog::stderr_color_mt("molforge"));
  mf::init_logging();

  CLI::App app{"Evolutionary molecule design"};
  app.require_subcommand(1);

  std::string config_path, archive_path, format = "table";
  std::optional<std::string> config_opt, scores, ui_dir, bind;
  std::optional<int> port;
  bool overwrite = false, autostart = false;
  int generation = 0;
  Filters filters;

  auto *run = app.add_subcommand("run", "Run a configured search without interaction");
  run->add_option("config", config_path, "Run configuration (JSON)")->required();
  run->add_option("--scores", scores, "Replay user scores from a score log");
  run->add_flag("--overwrite", overwrite, "Replace an existing archive");

  auto *serve = app.add_subcommand("serve", "Serve the HTTP/JSON API");
  serve->add_option("config", config_opt, "Default run configuration");
  serve->add_option("--bind", bind, "Address to bind (default from config or 127.0.0.1)");
  serve->add_option("--port", port, "Port (default from config or 8080; 0 picks one)")
      ->check(CLI::Range(0, 65535));
  serve->add_option("--ui-dir", ui_dir, "Static files served at /")->check(CLI::ExistingDirectory);
  serve->add_flag("--overwrite", overwrite, "Replace existing archives");
  serve->add_flag("--autostart", autostart, "Start the configured run immediately");

  auto *browse = app.add_subcommand("browse", "Search an archive");
  browse->add_option("archive", archive_path, "Archive (NDJSON)")->required();
  browse->add_option("--gen-min", filters.gen_min);
  browse->add_option("--gen-max", filters.gen_max);
  browse->add_option("--fit-min", filters.fit_min);
  browse->add_option("--fit-max", filters.fit_max);
  browse->add_option("--wt-min", filters.wt_min);
  browse->add_option("--wt-max", filters.wt_max);
  browse->add_option("--atoms-min", filters.atoms_min);
  browse->add_option("--atoms-max", filters.atoms_max);
  browse->add_option("--substr", filters.substr, "Genome substring");
  browse->add_option("--limit", filters.limit);
  browse->add_option("--order-by", filters.order_by, "fitness_desc | generation_asc | weight_asc");
  browse->add_option("--format", format)->check(CLI::IsMember({"table", "ndjson"}));

  auto *exp = app.add_subcommand("export", "Dump one generation");
  exp->add_option("archive", archive_path, "Archive (NDJSON)")->required();
  exp->add_option("--generation,-g", generation)->required()->check(CLI::NonNegativeNumber);
  exp->add_option("--format", format, "ndjson | smiles")
      ->check(CLI::IsMember({"ndjson", "smiles"}))
      ->default_str("ndjson");

  auto *validate = app.add_subcommand("validate", "Check a run configuration");
  validate->add_option("config", config_path, "Run configuration (JSON)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run)
      return cmd_run(config_path, scores, overwrite);
    if (*serve)
      return cmd_serve(config_opt, bind, port, ui_dir, overwrite, autostart);
    if (*browse)
      return cmd_browse(archive_path, filters, format);
    if (*exp)
      return cmd_export(archive_path, generation, format == "table" ? "ndjson" : format);
    if (*validate)
      return cmd_validate(config_path);
  } catch (const mf::Error &e) {
    spdlog::error("{}: {}", mf::to_string(e.code()), e.what());
    return exit_code_for(e.code());
  } catch (const mf::ParseError &e) {
    spdlog::error("ParseError: {}", e.what());
    return 1;
  } catch (const std::exception &e) {
    spdlog::error("{}", e.what());
    return 3;
  }
  return 0;
}
