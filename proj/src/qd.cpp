#include "levelgen/qd.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <exception>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

#include "levelgen/errors.hpp"
#include "levelgen/serialization.hpp"

namespace levelgen {

namespace {

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

long long parse_integer(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used == value.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("config key '" + key + "' needs an integer, got '" + value + "'");
}

std::uint64_t parse_seed(const std::string& value) {
  std::uint64_t v = 0;
  const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || end != value.data() + value.size() || value.empty()) {
    throw ConfigError("config key 'seed' needs a non-negative integer, got '" + value + "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("config key '" + key + "' needs true/false, got '" + value + "'");
}

Json genome_to_json(const Genome& g) {
  return std::visit([](const auto& x) -> Json {
    if constexpr (std::is_same_v<std::decay_t<decltype(x)>, CppnGenome>) {
      return cppn_to_json(x);
    } else {
      return direct_to_json(x);
    }
  }, g);
}

Domain domain_from_name(const std::string& s) {
  if (s == "mario") return Domain::Mario;
  if (s == "zelda") return Domain::Zelda;
  throw ConfigError("unknown domain '" + s + "' (mario|zelda)");
}

EncodingKind encoding_from_name(const std::string& s) {
  if (s == "cppn2gan") return EncodingKind::Cppn2Gan;
  if (s == "direct2gan") return EncodingKind::Direct2Gan;
  throw ConfigError("unknown encoding '" + s + "' (cppn2gan|direct2gan)");
}

int tileset_for(Domain d) { return d == Domain::Mario ? mario::kTileCount : zelda::kTileCount; }

void validate_config(const RunConfig& c) {
  const auto positive = [](long long v, const char* what) {
    if (v < 1) throw ConfigError(std::string(what) + " must be positive");
  };
  if (c.init_count < 0 || c.generated_count < 0) throw ConfigError("individual counts must be non-negative");
  positive(c.segments, "segments");
  positive(c.grid_rows, "grid_rows");
  positive(c.grid_cols, "grid_cols");
  positive(c.batch_size, "batch_size");
  positive(c.threads, "threads");
  positive(c.log_interval, "log_interval");
  positive(static_cast<long long>(c.search_budget), "search_budget");
  if (c.latent_size) positive(*c.latent_size, "latent_size");
  if (c.decoder.empty()) throw ConfigError("decoder must be 'stub' or a weights path");
}

}  // namespace

const char* domain_name(Domain d) { return d == Domain::Mario ? "mario" : "zelda"; }
const char* encoding_name(EncodingKind e) { return e == EncodingKind::Cppn2Gan ? "cppn2gan" : "direct2gan"; }

std::vector<int> bin_fields(const BinKey& bin) {
  if (const auto* m = std::get_if<mario::MarioBinKey>(&bin)) return {m->decoration, m->space, m->leniency};
  const auto& z = std::get<zelda::ZeldaBinKey>(bin);
  return {z.water, z.wall, z.rooms};
}

bool QdArchive::insert(Elite candidate) {
  InsertEvent event{candidate.birth_index, candidate.bin, candidate.fitness, false};
  auto it = elites_.find(candidate.bin);
  if (it == elites_.end()) {
    order_.push_back(candidate.bin);
    elites_.emplace(candidate.bin, std::move(candidate));
    event.accepted = true;
  } else if (candidate.fitness > it->second.fitness) {
    it->second = std::move(candidate);
    event.accepted = true;
  }
  events.push_back(std::move(event));
  return events.back().accepted;
}

const Elite* QdArchive::find(const BinKey& bin) const {
  auto it = elites_.find(bin);
  return it == elites_.end() ? nullptr : &it->second;
}

const Elite& QdArchive::sample(Rng& rng) const {
  if (order_.empty()) throw InputError("cannot sample from an empty archive");
  return elites_.at(order_[rng.index(order_.size())]);
}

const Elite* QdArchive::best() const {
  const Elite* best = nullptr;
  for (const auto& [bin, e] : elites_) {
    if (!best || e.fitness > best->fitness) best = &e;
  }
  return best;
}

bool archive_insert(QdArchive& archive, Elite candidate) { return archive.insert(std::move(candidate)); }

std::size_t filled_bin_count(const QdArchive& archive) { return archive.filled(); }

RunConfig parse_run_config(const std::string& text) {
  RunConfig c;
  std::istringstream in(text);
  std::string line;
  bool header = false;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    line = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (line.empty()) continue;
    if (!header) {
      if (line != "levelgen-config 1") throw ConfigError("config must start with 'levelgen-config 1'");
      header = true;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "domain") {
      c.domain = domain_from_name(value);
    } else if (key == "encoding") {
      c.encoding = encoding_from_name(value);
    } else if (key == "decoder") {
      c.decoder = value;
    } else if (key == "seed") {
      c.seed = parse_seed(value);
    } else if (key == "init_count") {
      c.init_count = static_cast<int>(parse_integer(key, value));
    } else if (key == "generated_count") {
      c.generated_count = static_cast<int>(parse_integer(key, value));
    } else if (key == "segments") {
      c.segments = static_cast<int>(parse_integer(key, value));
    } else if (key == "grid_rows") {
      c.grid_rows = static_cast<int>(parse_integer(key, value));
    } else if (key == "grid_cols") {
      c.grid_cols = static_cast<int>(parse_integer(key, value));
    } else if (key == "latent_size") {
      c.latent_size = static_cast<int>(parse_integer(key, value));
    } else if (key == "archive_unsolvable") {
      c.archive_unsolvable = parse_bool(key, value);
    } else if (key == "soft_locked_open") {
      c.soft_locked_open = parse_bool(key, value);
    } else if (key == "search_budget") {
      c.search_budget = static_cast<std::size_t>(parse_integer(key, value));
    } else if (key == "batch_size") {
      c.batch_size = static_cast<int>(parse_integer(key, value));
    } else if (key == "threads") {
      c.threads = static_cast<int>(parse_integer(key, value));
    } else if (key == "log_interval") {
      c.log_interval = static_cast<int>(parse_integer(key, value));
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  if (!header) throw ConfigError("config must start with 'levelgen-config 1'");
  validate_config(c);
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_run_config(ss.str());
}

std::string format_run_config(const RunConfig& c) {
  std::ostringstream out;
  out << "levelgen-config 1\n"
      << "domain = " << domain_name(c.domain) << "\n"
      << "encoding = " << encoding_name(c.encoding) << "\n"
      << "decoder = " << c.decoder << "\n"
      << "seed = " << c.seed << "\n"
      << "init_count = " << c.init_count << "\n"
      << "generated_count = " << c.generated_count << "\n"
      << "segments = " << c.segments << "\n"
      << "grid_rows = " << c.grid_rows << "\n"
      << "grid_cols = " << c.grid_cols << "\n";
  if (c.latent_size) out << "latent_size = " << *c.latent_size << "\n";
  out << "archive_unsolvable = " << (c.archive_unsolvable ? "true" : "false") << "\n"
      << "soft_locked_open = " << (c.soft_locked_open ? "true" : "false") << "\n"
      << "search_budget = " << c.search_budget << "\n"
      << "batch_size = " << c.batch_size << "\n"
      << "threads = " << c.threads << "\n"
      << "log_interval = " << c.log_interval << "\n";
  return out.str();
}

std::shared_ptr<const Decoder> make_decoder(const RunConfig& config) {
  validate_config(config);
  if (config.decoder == "stub") {
    const int latent = config.latent_size.value_or(config.domain == Domain::Mario ? 30 : 10);
    return std::make_shared<StubDecoder>(latent, tileset_for(config.domain));
  }
  std::shared_ptr<const GeneratorWeights> weights;
  try {
    weights = std::make_shared<GeneratorWeights>(load_generator_weights(config.decoder));
  } catch (const Error& e) {
    throw ConfigError("cannot load decoder weights: " + std::string(e.what()));
  }
  if (weights->out_channels() != tileset_for(config.domain)) {
    throw ConfigError("weights produce " + std::to_string(weights->out_channels()) + " tile channels, " +
                      domain_name(config.domain) + " needs " + std::to_string(tileset_for(config.domain)));
  }
  const int need_w = config.domain == Domain::Mario ? kMarioSegmentWidth : kZeldaRoomWidth;
  const int need_h = config.domain == Domain::Mario ? kMarioSegmentHeight : kZeldaRoomHeight;
  if (weights->out_width() < need_w || weights->out_height() < need_h) {
    throw ConfigError("generator output is smaller than a " + std::string(domain_name(config.domain)) + " segment");
  }
  if (config.latent_size && *config.latent_size != weights->latent_size()) {
    throw ConfigError("latent_size does not match the weights file");
  }
  return std::make_shared<GanDecoder>(std::move(weights));
}

Evaluator::Evaluator(const RunConfig& config, std::shared_ptr<const Decoder> decoder)
    : config_(config), decoder_(std::move(decoder)) {
  if (!decoder_) throw ConfigError("missing decoder");
  if (decoder_->tileset_size() != tileset_for(config.domain)) {
    throw ConfigError("decoder tileset does not match the domain");
  }
  mario_ = {config.segments, decoder_->latent_size()};
  dungeon_ = {config.grid_rows, config.grid_cols, decoder_->latent_size()};
}

InnovationCounter Evaluator::innovation_counter() const {
  if (config_.domain == Domain::Mario) return InnovationCounter(1, mario_.latent_size);
  return InnovationCounter(3, dungeon_.latent_size + kZeldaAuxOutputs);
}

Genome Evaluator::random_genome(Rng& rng) const {
  if (config_.encoding == EncodingKind::Cppn2Gan) {
    if (config_.domain == Domain::Mario) return minimal_genome(1, mario_.latent_size, rng);
    return minimal_genome(3, dungeon_.latent_size + kZeldaAuxOutputs, rng);
  }
  const std::size_t n = config_.domain == Domain::Mario ? direct_mario_length(mario_) : direct_zelda_length(dungeon_);
  return random_direct_genome(n, rng);
}

Genome Evaluator::offspring(const QdArchive& archive, Rng& rng, InnovationCounter& counter) const {
  if (archive.filled() == 0) return random_genome(rng);
  const Elite& first = archive.sample(rng);
  if (config_.encoding == EncodingKind::Cppn2Gan) {
    CppnGenome child = std::get<CppnGenome>(first.genome);
    if (rng.bernoulli(0.5)) {
      const Elite& second = archive.sample(rng);
      const Parent fitter = first.fitness >= second.fitness ? Parent::A : Parent::B;
      child = crossover(child, std::get<CppnGenome>(second.genome), fitter, rng);
    }
    return mutate(child, rng, counter);
  }
  const Elite& second = archive.sample(rng);
  return direct_variation(std::get<DirectGenome>(first.genome), std::get<DirectGenome>(second.genome), rng);
}

std::vector<TileGrid> Evaluator::mario_level(const Genome& genome) const {
  if (const auto* c = std::get_if<CppnGenome>(&genome)) return cppn_to_mario_level(*c, *decoder_, mario_);
  return direct_to_mario(std::get<DirectGenome>(genome), *decoder_, mario_);
}

DungeonLayout Evaluator::dungeon(const Genome& genome) const {
  if (const auto* c = std::get_if<CppnGenome>(&genome)) return cppn_to_zelda_dungeon(*c, *decoder_, dungeon_);
  return direct_to_zelda(std::get<DirectGenome>(genome), *decoder_, dungeon_);
}

Evaluation Evaluator::evaluate(const Genome& genome) const {
  if (config_.domain == Domain::Mario) {
    const auto segments = mario_level(genome);
    return {mario::mario_bin(mario::level_scores(segments)), mario::mario_fitness(segments)};
  }
  const DungeonLayout layout = dungeon(genome);
  const auto reachable = zelda::reachable_rooms(layout);
  if (reachable.empty()) return {};
  const auto pct = zelda::water_wall_percentages(layout);
  const zelda::SolveOptions options{config_.search_budget, config_.soft_locked_open};
  return {zelda::zelda_bin(pct.water, pct.wall, static_cast<int>(reachable.size())),
          zelda::zelda_fitness(layout, options)};
}

QdArchive run_map_elites(const RunConfig& config, const ProgressFn& progress) {
  return run_map_elites(config, make_decoder(config), progress);
}

QdArchive run_map_elites(const RunConfig& config, std::shared_ptr<const Decoder> decoder, const ProgressFn& progress) {
  validate_config(config);
  const Evaluator evaluator(config, std::move(decoder));
  InnovationCounter counter = evaluator.innovation_counter();
  QdArchive archive;

  const auto init = static_cast<std::uint64_t>(config.init_count);
  const std::uint64_t total = init + static_cast<std::uint64_t>(config.generated_count);
  const auto interval = static_cast<std::uint64_t>(config.log_interval);
  std::uint64_t next = 0;

  while (next < total) {
    // Batches never straddle the end of the initial population.
    const std::uint64_t boundary = next < init ? init : total;
    const std::size_t size = static_cast<std::size_t>(std::min<std::uint64_t>(config.batch_size, boundary - next));

    std::vector<Genome> genomes;
    genomes.reserve(size);
    for (std::size_t k = 0; k < size; ++k) {
      Rng rng(derive_seed(config.seed, next + k));
      genomes.push_back(next + k < init ? evaluator.random_genome(rng) : evaluator.offspring(archive, rng, counter));
    }

    std::vector<Evaluation> results(size);
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(config.threads), size);
    if (workers <= 1) {
      for (std::size_t k = 0; k < size; ++k) results[k] = evaluator.evaluate(genomes[k]);
    } else {
      std::vector<std::exception_ptr> errors(workers);
      {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
          pool.emplace_back([&, w] {
            try {
              for (std::size_t k = w; k < size; k += workers) results[k] = evaluator.evaluate(genomes[k]);
            } catch (...) {
              errors[w] = std::current_exception();
            }
          });
        }
      }
      for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }
    }

    for (std::size_t k = 0; k < size; ++k) {
      ++archive.evaluations;
      const Evaluation& r = results[k];
      if (r.bin && (r.fitness > 0.0 || config.archive_unsolvable)) {
        archive.insert(Elite{std::move(genomes[k]), r.fitness, *r.bin, next + k});
      }
      if (archive.evaluations % interval == 0) archive.log.push_back({archive.evaluations, archive.filled()});
    }
    next += size;
    if (progress) progress(archive);
  }
  if (archive.log.empty() || archive.log.back().evaluations != archive.evaluations) {
    archive.log.push_back({archive.evaluations, archive.filled()});
  }
  return archive;
}

void write_archive_dump(const QdArchive& archive, const RunConfig& config, std::ostream& out) {
  const Json header = {{"format", "levelgen-archive"},
                       {"version", 1},
                       {"domain", domain_name(config.domain)},
                       {"encoding", encoding_name(config.encoding)},
                       {"seed", config.seed},
                       {"evaluations", archive.evaluations},
                       {"filled_bins", archive.filled()}};
  out << header.dump() << "\n";
  for (const auto& [bin, elite] : archive.elites()) {
    const Json rec = {{"bin", bin_fields(bin)},
                      {"fitness", elite.fitness},
                      {"birth", elite.birth_index},
                      {"genome", genome_to_json(elite.genome)}};
    out << rec.dump() << "\n";
  }
}

void write_filled_log_csv(const QdArchive& archive, std::ostream& out) {
  out << "# levelgen-filled-bins 1\n";
  out << "evaluations,filled_bins\n";
  for (const auto& e : archive.log) out << e.evaluations << "," << e.filled_bins << "\n";
}

ArchiveDump read_archive_dump(std::istream& in) {
  ArchiveDump dump;
  std::string line;
  if (!std::getline(in, line)) throw InputError("empty archive dump");
  try {
    const Json header = Json::parse(line);
    if (header.value("format", "") != "levelgen-archive" || header.value("version", 0) != 1) {
      throw InputError("not a levelgen-archive v1 dump");
    }
    dump.domain = domain_from_name(header.at("domain").get<std::string>());
    dump.encoding = encoding_from_name(header.at("encoding").get<std::string>());
    while (std::getline(in, line)) {
      if (trim(line).empty()) continue;
      const Json rec = Json::parse(line);
      dump.records.push_back(
          {rec.at("bin").get<std::vector<int>>(), rec.at("fitness").get<double>(), rec.at("birth").get<std::uint64_t>()});
      if (dump.records.back().bin.size() != 3) throw InputError("archive record bin must have 3 fields");
    }
  } catch (const Json::exception& e) {
    throw InputError(std::string("malformed archive dump: ") + e.what());
  } catch (const ConfigError& e) {
    throw InputError(std::string("malformed archive dump: ") + e.what());
  }
  return dump;
}

void write_heatmap_csv(const ArchiveDump& dump, std::ostream& out) {
  // Slice is the last bin field for both domains.
  std::map<int, std::map<std::pair<int, int>, double>> slices;
  for (const auto& r : dump.records) slices[r.bin[2]][{r.bin[0], r.bin[1]}] = r.fitness;
  if (dump.domain == Domain::Mario) {
    for (int l = 0; l < mario::kMarioBinsPerDim; ++l) slices[l];
  }
  const bool is_mario = dump.domain == Domain::Mario;
  out << "# levelgen-heatmap 1 domain=" << domain_name(dump.domain) << " encoding=" << encoding_name(dump.encoding)
      << "\n";
  out << (is_mario ? "leniency_bin,decoration_bin" : "reachable_rooms,water_bin");
  for (int c = 0; c < 10; ++c) out << "," << (is_mario ? "space_" : "wall_") << c;
  out << "\n";
  for (const auto& [slice, cells] : slices) {
    for (int row = 0; row < 10; ++row) {
      out << slice << "," << row;
      for (int col = 0; col < 10; ++col) {
        out << ",";
        auto it = cells.find({row, col});
        if (it != cells.end()) out << format_real(it->second);
      }
      out << "\n";
    }
  }
}

}  // namespace levelgen
