//
// MolForge - Copyright 2026 The MolForge Authors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLFORGE_ARCHIVE_HPP_
#define MOLFORGE_ARCHIVE_HPP_

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "molforge/chem_model.hpp"
#include "molforge/population.hpp"

namespace molforge {

struct GenerationRecord {
  std::string run_id;
  int generation = 0;
  ChromosomeId chromosome_id = 0;
  std::string genome;
  std::string standard_smiles;
  double fitness = 0;
  std::optional<double> user_score;
  int heavy_atoms = 0;
  double weight = 0;
  std::vector<ChromosomeId> parent_ids;
  std::vector<std::string> op_log;

  friend bool operator==(const GenerationRecord &, const GenerationRecord &) = default;
};

GenerationRecord make_record(const ElementTable &table, const std::string &run_id,
                             int generation, const Chromosome &c);

// One NDJSON line's worth, fields in declaration order.
nlohmann::ordered_json to_json(const GenerationRecord &r);
// Throws kIOFailure on missing or mistyped fields.
GenerationRecord record_from_json(const nlohmann::json &j);

enum class OrderBy { kFitnessDesc, kGenerationAsc, kWeightAsc };

std::string_view to_string(OrderBy order);  // "fitness_desc", ...
std::optional<OrderBy> order_by_from_string(std::string_view name);

template <typename T> struct Range {
  T lo{};
  T hi{};

  bool contains(T v) const { return lo <= v && v <= hi; }
};

struct ArchiveQuery {
  std::optional<Range<int>> generation;
  std::optional<Range<double>> fitness;
  std::optional<Range<double>> weight;
  std::optional<Range<int>> heavy_atoms;
  std::optional<std::string> genome_substring;
  std::optional<std::size_t> limit;
  OrderBy order_by = OrderBy::kGenerationAsc;
};

// Throws kMalformedQuery for inverted or non-finite ranges and limit 0.
void check_query(const ArchiveQuery &q);
bool matches(const ArchiveQuery &q, const GenerationRecord &r);
// Strict weak order used by search: the order_by key, then (generation, id).
bool precedes(OrderBy order, const GenerationRecord &a, const GenerationRecord &b);

// Append-only NDJSON store for one run. Opening replays the file into memory;
// a trailing line without a newline (an interrupted write) is dropped from
// the file. One writer, any number of concurrent readers.
class Archive {
public:
  enum class Mode { kReadWrite, kReadOnly };

  // kReadOnly never creates or modifies the file (kIOFailure when missing) and
  // merely skips an incomplete tail; appends then fail with kIOFailure.
  explicit Archive(std::filesystem::path path, Mode mode = Mode::kReadWrite);

  Archive(const Archive &) = delete;
  Archive &operator=(const Archive &) = delete;

  // All records must share run_id and generation (kInvalidArgument).
  // kDuplicateId when a (run_id, chromosome_id) pair was already written;
  // nothing is written in that case.
  std::size_t append_generation(const std::vector<GenerationRecord> &records);

  std::vector<GenerationRecord> search(const ArchiveQuery &q) const;
  std::vector<GenerationRecord> generation(int g) const;
  std::vector<GenerationRecord> all() const;
  std::size_t size() const;
  std::optional<int> last_generation() const;

  const std::filesystem::path &path() const { return path_; }

  // Run metadata (wall-clock times etc.) lives beside the record file so the
  // records themselves stay byte-reproducible.
  static std::filesystem::path metadata_path(const std::filesystem::path &path);
  void write_metadata(const nlohmann::json &meta) const;
  std::optional<nlohmann::json> read_metadata() const;

private:
  std::filesystem::path path_;
  Mode mode_;
  mutable std::shared_mutex mu_;
  std::vector<GenerationRecord> records_;
  std::map<int, std::pair<std::size_t, std::size_t>> by_generation_;  // [begin, end)
  std::set<std::pair<std::string, ChromosomeId>> ids_;
  std::ofstream out_;
};

} // namespace molforge

#endif // MOLFORGE_ARCHIVE_HPP_
