//
// MolForge - Copyright 2026 The MolForge Authors
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance runner: one PASS/FAIL line per release criterion, exit status 1
// if any fails. Runs headless against the core and conductor libraries only.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "molforge/archive.hpp"
#include "molforge/conductor.hpp"
#include "molforge/config.hpp"
#include "molforge/evolve.hpp"
#include "molforge/exsmiles.hpp"
#include "molforge/fitness.hpp"
#include "molforge/genesis.hpp"
#include "molecule_fixtures.hpp"

#ifndef MOLFORGE_CONFIG_DIR
#error "MOLFORGE_CONFIG_DIR must point at the sample configs"
#endif

namespace mf = molforge;
namespace fs = std::filesystem;
using mf::testing::organic;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char *f, auto... args) {
  char buf[1024];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

fs::path scratch_dir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("molforge-acceptance-" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

mf::RunConfig fixture(std::uint64_t seed, const std::string &archive_name) {
  auto cfg = mf::load_run_config(fs::path(MOLFORGE_CONFIG_DIR) / "paracetamol.json");
  cfg.seed = seed;
  cfg.archive_path = scratch_dir() / archive_name;
  return cfg;
}

// --- criteria ----------------------------------------------------------------

Outcome convergence() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> best;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto cfg = fixture(seed, "converge-" + std::to_string(seed) + ".ndjson");
    const auto ctx = mf::build_context(cfg);
    if (cfg.evolve.population_size != 50 || cfg.evolve.iterations != 100 ||
        cfg.evolve.selection_method != mf::SelectionMethod::kRoulette ||
        cfg.evolve.mutation_rate_pct != 40 || cfg.evolve.crossover_rate_pct != 80 ||
        cfg.evolve.elitism != 1)
      return {false, "fixture config drifted from the criterion's parameters"};
    const int target_atoms = static_cast<int>(mf::exsmiles::parse(ctx.spec.table, cfg.target).atom_count());
    if (target_atoms < 8 || target_atoms > 12)
      return {false, fmt("target has %d heavy atoms", target_atoms)};

    mf::run_headless(cfg, {}, /*overwrite=*/true);
    const mf::FitnessEvaluator eval(ctx.spec.table, ctx.fitness);
    const mf::Archive archive(cfg.archive_path, mf::Archive::Mode::kReadOnly);
    double top = 0;
    for (const auto &r : archive.all())
      top = std::max(top, eval.similarity_to_target(mf::exsmiles::parse(ctx.spec.table, r.genome)));
    best.push_back(top);
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  auto sorted = best;
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted[2], max = sorted.back();
  std::string per_seed;
  for (double b : best)
    per_seed += fmt("%.3f ", b);
  return {median >= 0.90 && max >= 0.95 && secs <= 120.0,
          fmt("median %.3f, max %.3f over seeds [%s], %.1fs", median, max, per_seed.c_str(), secs)};
}

Outcome round_trip() {
  mf::Rng rng(20240601);
  int ok = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto g = mf::testing::random_complete_molecule(rng);
    const auto text = mf::exsmiles::serialize(g);
    const auto back = mf::exsmiles::parse(organic(), text);
    if (mf::isomorphic(g, back) && mf::exsmiles::serialize(back) == text)
      ++ok;
  }
  return {ok == 1000, fmt("%d/1000 isomorphic with a fixed-point serialization", ok)};
}

Outcome fuzz() {
  mf::Rng rng(424242);
  const std::string alphabet = "[]()-=#{}0123456789CHNOSPFBrlIXx ";
  int graphs = 0, errors = 0, bad = 0;
  for (int trial = 0; trial < 100000; ++trial) {
    std::string s;
    if (trial % 2 == 0) {
      s = mf::exsmiles::serialize(mf::testing::random_complete_molecule(rng, 8));
      const int edits = rng.between(1, 4);
      for (int k = 0; k < edits && !s.empty(); ++k)
        s[rng.index(s.size())] = alphabet[rng.index(alphabet.size())];
    } else {
      const std::size_t len = rng.index(48);
      for (std::size_t k = 0; k < len; ++k)
        s += static_cast<char>(rng.index(256));
    }
    try {
      mf::exsmiles::parse(organic(), s);
      ++graphs;
    } catch (const mf::ParseError &e) {
      ++errors;
      bad += e.position() > s.size();
    } catch (...) {
      ++bad;
    }
  }
  return {bad == 0, fmt("%d graphs, %d parse errors, %d out-of-range or foreign failures", graphs,
                        errors, bad)};
}

Outcome operator_closure() {
  mf::GenSpec spec;
  spec.fragments = mf::load_fragments(spec.table, {"[C](=[O])-[OH]", "[C]=[O]", "[OH]",
                                                   "[C](=[O])-[NH]"});
  spec.rules = {1, 40, 1000.0, true};
  mf::Rng rng(777);
  const int n = 10000;
  std::map<std::string, int> applied, invalid;

  auto valid_input = [&] {
    return mf::exsmiles::canonicalize(spec.table, mf::testing::random_complete_molecule(rng));
  };
  auto check = [&](const std::string &name, const mf::MoleculeGraph &g) {
    if (!mf::validate(spec.table, spec.rules, g).valid() || mf::handshake_residual(g) != 0)
      ++invalid[name];
  };

  for (mf::MutationOp op : mf::kAllMutationOps) {
    const std::string name(mf::to_string(op));
    for (int i = 0; i < n; ++i) {
      try {
        if (auto out = mf::apply_mutation(op, valid_input(), spec, rng)) {
          ++applied[name];
          check(name, *out);
        }
      } catch (...) {
        ++invalid[name];
      }
    }
  }
  mf::EvolveParams params;
  mf::ChromosomeId next = 0;
  for (int i = 0; i < n; ++i) {
    try {
      auto a = mf::make_chromosome(spec.table, valid_input(), next++);
      auto b = mf::make_chromosome(spec.table, valid_input(), next++);
      auto [x, y] = mf::crossover(a, b, spec, params, next, rng);
      if (x.op_log.front() == "crossover")
        ++applied["crossover"];
      check("crossover", x.graph);
      check("crossover", y.graph);
    } catch (...) {
      ++invalid["crossover"];
    }
  }
  int total_invalid = 0;
  std::string counts;
  for (const auto &[name, c] : applied)
    counts += fmt("%s=%d ", name.c_str(), c);
  for (const auto &[name, c] : invalid) {
    total_invalid += c;
    counts += fmt("[%s invalid=%d] ", name.c_str(), c);
  }
  return {total_invalid == 0 && applied.size() == 11,
          fmt("%d applications each, %d invalid outputs; applied: %s", n, total_invalid,
              counts.c_str())};
}

Outcome selection_statistics() {
  const int draws = 100000;
  std::string detail;
  bool pass = true;

  const std::vector<double> weights{0.1, 0.2, 0.3, 0.4};
  mf::Rng rng(31337);
  std::vector<int> hits(4);
  for (int i = 0; i < draws; ++i)
    ++hits[mf::roulette_draw(weights, rng)];
  double worst = 0;
  for (int i = 0; i < 4; ++i)
    worst = std::max(worst, std::abs(hits[i] / double(draws) - weights[i]));
  pass &= worst <= 0.01;
  detail += fmt("roulette max dev %.4f; ", worst);

  mf::Population pop;
  for (double f : {0.3, 0.9, 0.1, 0.8, 0.5}) {
    pop.members.push_back(
        mf::make_chromosome(organic(), mf::testing::mol("[CH4]"), pop.allocate_id()));
    pop.members.back().fitness = f;
  }
  mf::EvolveParams params;
  params.selection_method = mf::SelectionMethod::kRandom;
  std::vector<int> picks(pop.members.size());
  for (int i = 0; i < draws; ++i)
    ++picks[mf::select_parents(pop, params, {}, 0, rng).first];
  worst = 0;
  for (int c : picks)
    worst = std::max(worst, std::abs(c / double(draws) - 1.0 / pop.members.size()));
  pass &= worst <= 0.01;
  detail += fmt("random max dev %.4f; ", worst);

  params.selection_method = mf::SelectionMethod::kTournament;
  params.tournament_size = static_cast<int>(pop.members.size());
  int top_two = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto p = mf::select_parents(pop, params, {}, 0, rng);
    top_two += p.first == 1 && p.second == 3;
  }
  pass &= top_two == 1000;
  detail += fmt("full tournament top-two %d/1000", top_two);
  return {pass, detail};
}

Outcome inverse_operators() {
  const auto propane = mf::testing::mol("[CH3]-[CH2]-[CH3]");
  const auto cyclopropane = mf::testing::mol("[CH2](-{1})-[CH2]-[CH2]-{1}");
  const auto ring = mf::edits::add_ring(propane, 0, 2);
  std::optional<mf::MoleculeGraph> reopened;
  if (ring)
    reopened = mf::edits::cut_ring(*ring, mf::exsmiles::ring_closure_bonds(*ring).at(0));
  const int closure = mf::exsmiles::ring_closure_bonds(cyclopropane).at(0);
  const auto cut = mf::edits::cut_ring(cyclopropane, closure);
  std::optional<mf::MoleculeGraph> closed;
  if (cut)
    closed = mf::edits::add_ring(*cut, cyclopropane.bond(closure).a, cyclopropane.bond(closure).b);
  const auto text = [](const std::optional<mf::MoleculeGraph> &g) {
    return g ? mf::exsmiles::serialize(*g) : std::string("<none>");
  };
  const bool a = text(reopened) == mf::exsmiles::serialize(propane);
  const bool b = text(closed) == mf::exsmiles::serialize(cyclopropane);
  return {a && b, fmt("CutRing(AddRing(propane)) = %s; AddRing(CutRing(cyclopropane)) = %s",
                      text(reopened).c_str(), text(closed).c_str())};
}

Outcome determinism() {
  auto a = fixture(99, "determinism-a.ndjson");
  auto b = fixture(99, "determinism-b.ndjson");
  a.evolve.iterations = b.evolve.iterations = 30;
  mf::run_headless(a, {}, true);
  mf::run_headless(b, {}, true);
  const auto x = slurp(a.archive_path), y = slurp(b.archive_path);
  return {!x.empty() && x == y,
          fmt("%zu vs %zu bytes, %s", x.size(), y.size(), x == y ? "identical" : "different")};
}

// Written independently of Archive::search: filter, stable sort by the
// documented key, truncate.
std::vector<mf::GenerationRecord> scan(const std::vector<mf::GenerationRecord> &all,
                                       const mf::ArchiveQuery &q) {
  std::vector<mf::GenerationRecord> out;
  for (const auto &r : all) {
    if (q.generation && (r.generation < q.generation->lo || r.generation > q.generation->hi))
      continue;
    if (q.fitness && (r.fitness < q.fitness->lo || r.fitness > q.fitness->hi))
      continue;
    if (q.weight && (r.weight < q.weight->lo || r.weight > q.weight->hi))
      continue;
    if (q.heavy_atoms && (r.heavy_atoms < q.heavy_atoms->lo || r.heavy_atoms > q.heavy_atoms->hi))
      continue;
    if (q.genome_substring && r.genome.find(*q.genome_substring) == std::string::npos)
      continue;
    out.push_back(r);
  }
  auto key = [&](const mf::GenerationRecord &r) {
    double primary = 0;
    if (q.order_by == mf::OrderBy::kFitnessDesc)
      primary = -r.fitness;
    else if (q.order_by == mf::OrderBy::kWeightAsc)
      primary = r.weight;
    return std::make_tuple(primary, r.generation, r.chromosome_id);
  };
  std::stable_sort(out.begin(), out.end(),
                   [&](const auto &l, const auto &r) { return key(l) < key(r); });
  if (q.limit && out.size() > *q.limit)
    out.resize(*q.limit);
  return out;
}

Outcome archive_oracle() {
  const auto path = scratch_dir() / "oracle.ndjson";
  fs::remove(path);
  mf::Rng rng(5000);
  {
    mf::Archive archive(path);
    mf::ChromosomeId next = 0;
    for (int g = 0; g < 50; ++g) {
      std::vector<mf::GenerationRecord> batch;
      for (int i = 0; i < 100; ++i) {
        auto c = mf::make_chromosome(organic(), mf::testing::random_complete_molecule(rng, 10),
                                     next++);
        c.fitness = rng.between(0, 20) / 20.0;
        batch.push_back(mf::make_record(organic(), "run-oracle", g, c));
      }
      archive.append_generation(batch);
    }
  }
  const mf::Archive archive(path, mf::Archive::Mode::kReadOnly);
  const auto all = archive.all();
  int agree = 0;
  static const char *kSubs[] = {"[OH]", "=", "{1}", "[N", "Cl", "[CH3]-[CH2]", "#"};
  for (int i = 0; i < 200; ++i) {
    mf::ArchiveQuery q;
    if (rng.chance(50)) {
      const int a = rng.between(0, 49), b = rng.between(0, 49);
      q.generation = mf::Range<int>{std::min(a, b), std::max(a, b)};
    }
    if (rng.chance(40)) {
      const double a = rng.between(0, 20) / 20.0, b = rng.between(0, 20) / 20.0;
      q.fitness = mf::Range<double>{std::min(a, b), std::max(a, b)};
    }
    if (rng.chance(30)) {
      const double a = rng.between(0, 300), b = rng.between(0, 300);
      q.weight = mf::Range<double>{std::min(a, b), std::max(a, b)};
    }
    if (rng.chance(30)) {
      const int a = rng.between(1, 10), b = rng.between(1, 10);
      q.heavy_atoms = mf::Range<int>{std::min(a, b), std::max(a, b)};
    }
    if (rng.chance(30))
      q.genome_substring = kSubs[rng.index(std::size(kSubs))];
    if (rng.chance(50))
      q.limit = static_cast<std::size_t>(rng.between(1, 200));
    q.order_by = static_cast<mf::OrderBy>(rng.between(0, 2));
    agree += archive.search(q) == scan(all, q);
  }
  return {all.size() == 5000 && agree == 200,
          fmt("%d/200 queries match a linear scan over %zu records", agree, all.size())};
}

Outcome known_values() {
  const double sim = mf::similarity(mf::fingerprint(mf::testing::mol("[CH4]")),
                                    mf::fingerprint(mf::testing::mol("[CH3]-[CH3]")));
  const double weight = mf::molecular_weight(organic(), mf::testing::mol("[CH4]"));
  const auto smiles = mf::exsmiles::to_standard_smiles(mf::testing::mol("[CH2](-{1})-[CH2]-[CH2]-{1}"));
  const bool pass = std::abs(sim - 5.0 / 9.0) <= 1e-12 && std::abs(weight - 16.043) <= 0.001 &&
                    smiles == "C1CC1";
  return {pass, fmt("similarity %.15f, weight %.4f, smiles %s", sim, weight, smiles.c_str())};
}

} // namespace

int main() {
  setenv("MOLFORGE_LOG", "warn", /*overwrite=*/0);
  mf::init_logging();

  const std::vector<std::pair<const char *, std::function<Outcome()>>> criteria = {
      {"convergence", convergence},
      {"parser round-trip", round_trip},
      {"parser robustness", fuzz},
      {"operator closure", operator_closure},
      {"selection statistics", selection_statistics},
      {"inverse operators", inverse_operators},
      {"determinism", determinism},
      {"archive oracle", archive_oracle},
      {"known values", known_values},
  };
  int failed = 0;
  for (const auto &[name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception &e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s  %-22s %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  fs::remove_all(scratch_dir());
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
