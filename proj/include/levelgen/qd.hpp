#pragma once

// MAP-Elites: archive, generate-evaluate-insert loop, run configuration and dumps.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "levelgen/cppn.hpp"
#include "levelgen/encodings.hpp"
#include "levelgen/mario.hpp"
#include "levelgen/rng.hpp"
#include "levelgen/tensor_gen.hpp"
#include "levelgen/zelda.hpp"

namespace levelgen {

enum class Domain { Mario, Zelda };
enum class EncodingKind { Cppn2Gan, Direct2Gan };

const char* domain_name(Domain d);
const char* encoding_name(EncodingKind e);

using BinKey = std::variant<mario::MarioBinKey, zelda::ZeldaBinKey>;
using Genome = std::variant<CppnGenome, DirectGenome>;

std::vector<int> bin_fields(const BinKey& bin);

struct Elite {
  Genome genome;
  double fitness = 0.0;
  BinKey bin;
  std::uint64_t birth_index = 0;
};

struct LogEntry {
  std::uint64_t evaluations = 0;
  std::size_t filled_bins = 0;
  bool operator==(const LogEntry&) const = default;
};

struct InsertEvent {
  std::uint64_t evaluation = 0;
  BinKey bin;
  double fitness = 0.0;
  bool accepted = false;
};

class QdArchive {
 public:
  /// Accepts iff the bin is empty or the candidate is strictly fitter.
  bool insert(Elite candidate);

  std::size_t filled() const noexcept { return elites_.size(); }
  const std::map<BinKey, Elite>& elites() const noexcept { return elites_; }
  const Elite* find(const BinKey& bin) const;
  /// Uniform over occupied bins.
  const Elite& sample(Rng& rng) const;
  const Elite* best() const;

  std::uint64_t evaluations = 0;
  std::vector<LogEntry> log;
  std::vector<InsertEvent> events;

 private:
  std::map<BinKey, Elite> elites_;
  std::vector<BinKey> order_;  // insertion order of first occupation
};

bool archive_insert(QdArchive& archive, Elite candidate);
std::size_t filled_bin_count(const QdArchive& archive);

struct RunConfig {
  Domain domain = Domain::Zelda;
  EncodingKind encoding = EncodingKind::Cppn2Gan;
  /// "stub" or a path to a GANW weights file.
  std::string decoder = "stub";
  std::uint64_t seed = 0;
  int init_count = 100;
  int generated_count = 50000;
  int segments = 10;
  int grid_rows = 10;
  int grid_cols = 10;
  /// Stub decoder only; weights files carry their own latent size.
  std::optional<int> latent_size;
  /// Keep unsolvable (fitness 0) individuals when their bin is empty.
  bool archive_unsolvable = true;
  bool soft_locked_open = true;
  std::size_t search_budget = zelda::kDefaultSearchBudget;
  /// Offspring per batch; parents are drawn from the archive as it stood at batch start.
  int batch_size = 32;
  int threads = 1;
  int log_interval = 100;
};

/// key = value lines after a "levelgen-config 1" header; '#' starts a comment.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& path);
std::string format_run_config(const RunConfig& config);

/// Decoder named by the config, with latent size checked against the domain.
std::shared_ptr<const Decoder> make_decoder(const RunConfig& config);

struct Evaluation {
  std::optional<BinKey> bin;  // nullopt: discarded (no reachable rooms)
  double fitness = 0.0;
};

class Evaluator {
 public:
  Evaluator(const RunConfig& config, std::shared_ptr<const Decoder> decoder);

  Evaluation evaluate(const Genome& genome) const;
  Genome random_genome(Rng& rng) const;
  Genome offspring(const QdArchive& archive, Rng& rng, InnovationCounter& counter) const;
  InnovationCounter innovation_counter() const;

  const MarioGenomeSpec& mario_spec() const noexcept { return mario_; }
  const DungeonGenomeSpec& dungeon_spec() const noexcept { return dungeon_; }
  const Decoder& decoder() const noexcept { return *decoder_; }

  std::vector<TileGrid> mario_level(const Genome& genome) const;
  DungeonLayout dungeon(const Genome& genome) const;

 private:
  RunConfig config_;
  std::shared_ptr<const Decoder> decoder_;
  MarioGenomeSpec mario_;
  DungeonGenomeSpec dungeon_;
};

using ProgressFn = std::function<void(const QdArchive&)>;

QdArchive run_map_elites(const RunConfig& config, const ProgressFn& progress = {});
QdArchive run_map_elites(const RunConfig& config, std::shared_ptr<const Decoder> decoder,
                         const ProgressFn& progress = {});

void write_archive_dump(const QdArchive& archive, const RunConfig& config, std::ostream& out);
void write_filled_log_csv(const QdArchive& archive, std::ostream& out);

struct DumpRecord {
  std::vector<int> bin;
  double fitness = 0.0;
  std::uint64_t birth_index = 0;
};

struct ArchiveDump {
  Domain domain = Domain::Zelda;
  EncodingKind encoding = EncodingKind::Cppn2Gan;
  std::vector<DumpRecord> records;
};

ArchiveDump read_archive_dump(std::istream& in);

/// One 10x10 fitness grid per slice (Mario: leniency bin, rows decoration,
/// columns space; Zelda: reachable-room count, rows water, columns wall).
void write_heatmap_csv(const ArchiveDump& dump, std::ostream& out);

}  // namespace levelgen
