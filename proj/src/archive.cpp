//
// MolForge - Copyright 2026 The MolForge Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "molforge/archive.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <tuple>

#include "molforge/error.hpp"
#include "molforge/exsmiles.hpp"

namespace molforge {

using nlohmann::json;
using nlohmann::ordered_json;

GenerationRecord make_record(const ElementTable &table, const std::string &run_id,
                             int generation, const Chromosome &c) {
  GenerationRecord r;
  r.run_id = run_id;
  r.generation = generation;
  r.chromosome_id = c.id;
  r.genome = c.genome;
  r.standard_smiles = exsmiles::to_standard_smiles(c.graph);
  r.fitness = c.fitness;
  r.user_score = c.user_score;
  r.heavy_atoms = static_cast<int>(c.graph.atom_count());
  r.weight = molecular_weight(table, c.graph);
  r.parent_ids = c.parent_ids;
  r.op_log = c.op_log;
  return r;
}

ordered_json to_json(const GenerationRecord &r) {
  ordered_json j;
  j["run_id"] = r.run_id;
  j["generation"] = r.generation;
  j["chromosome_id"] = r.chromosome_id;
  j["genome"] = r.genome;
  j["standard_smiles"] = r.standard_smiles;
  j["fitness"] = r.fitness;
  j["user_score"] = r.user_score ? ordered_json(*r.user_score) : ordered_json(nullptr);
  j["heavy_atoms"] = r.heavy_atoms;
  j["weight"] = r.weight;
  j["parent_ids"] = r.parent_ids;
  j["op_log"] = r.op_log;
  return j;
}

GenerationRecord record_from_json(const json &j) {
  try {
    GenerationRecord r;
    j.at("run_id").get_to(r.run_id);
    j.at("generation").get_to(r.generation);
    j.at("chromosome_id").get_to(r.chromosome_id);
    j.at("genome").get_to(r.genome);
    j.at("standard_smiles").get_to(r.standard_smiles);
    j.at("fitness").get_to(r.fitness);
    if (const auto &u = j.at("user_score"); !u.is_null())
      r.user_score = u.get<double>();
    j.at("heavy_atoms").get_to(r.heavy_atoms);
    j.at("weight").get_to(r.weight);
    j.at("parent_ids").get_to(r.parent_ids);
    j.at("op_log").get_to(r.op_log);
    return r;
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kIOFailure, std::string("malformed archive record: ") + e.what());
  }
}

std::string_view to_string(OrderBy order) {
  switch (order) {
  case OrderBy::kFitnessDesc: return "fitness_desc";
  case OrderBy::kGenerationAsc: return "generation_asc";
  case OrderBy::kWeightAsc: return "weight_asc";
  }
  return "unknown";
}

std::optional<OrderBy> order_by_from_string(std::string_view name) {
  for (auto o : {OrderBy::kFitnessDesc, OrderBy::kGenerationAsc, OrderBy::kWeightAsc})
    if (to_string(o) == name)
      return o;
  return std::nullopt;
}

void check_query(const ArchiveQuery &q) {
  auto fail = [](const std::string &what) { throw Error(ErrorCode::kMalformedQuery, what); };
  auto check = [&](const auto &range, const char *name) {
    if (!range)
      return;
    if constexpr (std::is_floating_point_v<decltype(range->lo)>) {
      if (!std::isfinite(range->lo) || !std::isfinite(range->hi))
        fail(std::string(name) + " range must be finite");
    }
    if (range->hi < range->lo)
      fail(std::string(name) + " range is inverted");
  };
  check(q.generation, "generation");
  check(q.fitness, "fitness");
  check(q.weight, "weight");
  check(q.heavy_atoms, "atom");
  if (q.limit && *q.limit == 0)
    fail("limit must be >= 1");
}

bool matches(const ArchiveQuery &q, const GenerationRecord &r) {
  if (q.generation && !q.generation->contains(r.generation))
    return false;
  if (q.fitness && !q.fitness->contains(r.fitness))
    return false;
  if (q.weight && !q.weight->contains(r.weight))
    return false;
  if (q.heavy_atoms && !q.heavy_atoms->contains(r.heavy_atoms))
    return false;
  if (q.genome_substring && r.genome.find(*q.genome_substring) == std::string::npos)
    return false;
  return true;
}

bool precedes(OrderBy order, const GenerationRecord &a, const GenerationRecord &b) {
  const auto tail = [](const GenerationRecord &r) {
    return std::make_tuple(r.generation, r.chromosome_id);
  };
  switch (order) {
  case OrderBy::kFitnessDesc:
    if (a.fitness != b.fitness)
      return a.fitness > b.fitness;
    break;
  case OrderBy::kWeightAsc:
    if (a.weight != b.weight)
      return a.weight < b.weight;
    break;
  case OrderBy::kGenerationAsc:
    break;
  }
  return tail(a) < tail(b);
}

// --- store -----------------------------------------------------------------

Archive::Archive(std::filesystem::path path, Mode mode) : path_(std::move(path)), mode_(mode) {
  std::error_code ec;
  if (mode_ == Mode::kReadOnly && !std::filesystem::exists(path_, ec))
    throw Error(ErrorCode::kIOFailure, "no archive at " + path_.string());
  if (mode_ == Mode::kReadWrite && path_.has_parent_path())
    std::filesystem::create_directories(path_.parent_path(), ec);

  std::size_t complete_bytes = 0;
  if (std::filesystem::exists(path_)) {
    std::ifstream in(path_, std::ios::binary);
    if (!in)
      throw Error(ErrorCode::kIOFailure, "cannot read " + path_.string());
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::size_t start = 0;
    for (std::size_t nl; (nl = content.find('\n', start)) != std::string::npos; start = nl + 1) {
      const std::string_view line(content.data() + start, nl - start);
      if (line.empty())
        continue;
      json j;
      try {
        j = json::parse(line);
      } catch (const json::exception &e) {
        throw Error(ErrorCode::kIOFailure, path_.string() + ": unreadable line at byte " +
                                               std::to_string(start));
      }
      auto r = record_from_json(j);
      ids_.emplace(r.run_id, r.chromosome_id);
      auto [it, fresh] = by_generation_.try_emplace(r.generation, records_.size(),
                                                    records_.size());
      if (!fresh && it->second.second != records_.size())
        throw Error(ErrorCode::kIOFailure, path_.string() + ": generation " +
                                               std::to_string(r.generation) + " is not contiguous");
      ++it->second.second;
      records_.push_back(std::move(r));
    }
    complete_bytes = start;
    if (complete_bytes != content.size() && mode_ == Mode::kReadWrite)
      std::filesystem::resize_file(path_, complete_bytes);
  }
  if (mode_ == Mode::kReadOnly)
    return;
  out_.open(path_, std::ios::binary | std::ios::app);
  if (!out_)
    throw Error(ErrorCode::kIOFailure, "cannot open " + path_.string() + " for append");
}

std::size_t Archive::append_generation(const std::vector<GenerationRecord> &records) {
  if (mode_ == Mode::kReadOnly)
    throw Error(ErrorCode::kIOFailure, path_.string() + " is open read-only");
  if (records.empty())
    return 0;
  std::unique_lock lock(mu_);
  const auto &head = records.front();
  std::set<std::pair<std::string, ChromosomeId>> batch;
  for (const auto &r : records) {
    if (r.run_id != head.run_id || r.generation != head.generation)
      throw Error(ErrorCode::kInvalidArgument, "a batch must share run_id and generation");
    const auto key = std::make_pair(r.run_id, r.chromosome_id);
    if (ids_.count(key) || !batch.insert(key).second)
      throw Error(ErrorCode::kDuplicateId,
                  "chromosome " + std::to_string(r.chromosome_id) + " already archived");
  }
  if (auto it = by_generation_.find(head.generation);
      it != by_generation_.end() && it->second.second != records_.size())
    throw Error(ErrorCode::kInvalidArgument, "generation " + std::to_string(head.generation) +
                                                 " was closed by a later generation");

  std::string chunk;
  for (const auto &r : records) {
    chunk += to_json(r).dump();
    chunk += '\n';
  }
  out_.write(chunk.data(), static_cast<std::streamsize>(chunk.size()));
  out_.flush();
  if (!out_)
    throw Error(ErrorCode::kIOFailure, "write to " + path_.string() + " failed");

  auto [it, fresh] =
      by_generation_.try_emplace(head.generation, records_.size(), records_.size());
  for (const auto &r : records) {
    ids_.emplace(r.run_id, r.chromosome_id);
    records_.push_back(r);
  }
  it->second.second = records_.size();
  return records.size();
}

std::vector<GenerationRecord> Archive::search(const ArchiveQuery &q) const {
  check_query(q);
  std::shared_lock lock(mu_);
  // The generation index narrows the scan; every other filter is a linear pass.
  std::size_t begin = 0, end = records_.size();
  if (q.generation) {
    auto lo = by_generation_.lower_bound(q.generation->lo);
    auto hi = by_generation_.upper_bound(q.generation->hi);
    if (lo == hi)
      return {};
    begin = lo->second.first;
    end = std::prev(hi)->second.second;
  }
  std::vector<GenerationRecord> out;
  for (std::size_t i = begin; i < end; ++i)
    if (matches(q, records_[i]))
      out.push_back(records_[i]);
  lock.unlock();

  auto less = [&](const GenerationRecord &a, const GenerationRecord &b) {
    return precedes(q.order_by, a, b);
  };
  if (q.limit && *q.limit < out.size()) {
    const auto cut = out.begin() + static_cast<std::ptrdiff_t>(*q.limit);
    std::partial_sort(out.begin(), cut, out.end(), less);
    out.erase(cut, out.end());
  } else {
    std::sort(out.begin(), out.end(), less);
  }
  return out;
}

std::vector<GenerationRecord> Archive::generation(int g) const {
  std::shared_lock lock(mu_);
  auto it = by_generation_.find(g);
  if (it == by_generation_.end())
    return {};
  return {records_.begin() + static_cast<std::ptrdiff_t>(it->second.first),
          records_.begin() + static_cast<std::ptrdiff_t>(it->second.second)};
}

std::vector<GenerationRecord> Archive::all() const {
  std::shared_lock lock(mu_);
  return records_;
}

std::size_t Archive::size() const {
  std::shared_lock lock(mu_);
  return records_.size();
}

std::optional<int> Archive::last_generation() const {
  std::shared_lock lock(mu_);
  if (by_generation_.empty())
    return std::nullopt;
  return by_generation_.rbegin()->first;
}

std::filesystem::path Archive::metadata_path(const std::filesystem::path &path) {
  auto p = path;
  p += ".meta.json";
  return p;
}

void Archive::write_metadata(const json &meta) const {
  const auto target = metadata_path(path_);
  auto tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << meta.dump(2) << '\n';
    if (!out)
      throw Error(ErrorCode::kIOFailure, "cannot write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec)
    throw Error(ErrorCode::kIOFailure, "cannot replace " + target.string() + ": " + ec.message());
}

std::optional<json> Archive::read_metadata() const {
  std::ifstream in(metadata_path(path_));
  if (!in)
    return std::nullopt;
  try {
    return json::parse(in);
  } catch (const json::exception &) {
    throw Error(ErrorCode::kIOFailure, "malformed " + metadata_path(path_).string());
  }
}

} // namespace molforge
