#include "levelgen/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "levelgen/corpus.hpp"
#include "levelgen/errors.hpp"
#include "levelgen/qd.hpp"
#include "levelgen/render.hpp"
#include "levelgen/serialization.hpp"

namespace levelgen {

namespace {

namespace fs = std::filesystem;

class UsageError : public Error {
 public:
  using Error::Error;
};

std::ofstream open_output(const fs::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write " + path.string());
  return f;
}

struct RunArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string out_dir = ".";
  bool progress = false;
};

void cmd_run(const RunArgs& a, std::ostream& out, std::ostream& err) {
  RunConfig config = load_run_config(a.config);
  if (a.seed) config.seed = *a.seed;
  if (a.threads) config.threads = *a.threads;
  const auto decoder = make_decoder(config);

  std::uint64_t last_report = 0;
  const auto progress = [&](const QdArchive& archive) {
    if (!a.progress || archive.evaluations - last_report < 1000) return;
    last_report = archive.evaluations;
    err << "evaluations " << archive.evaluations << ", filled bins " << archive.filled() << "\n";
  };
  const QdArchive archive = run_map_elites(config, decoder, progress);

  const fs::path dir(a.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw UsageError("cannot create output directory " + dir.string());

  std::ostringstream dump;
  write_archive_dump(archive, config, dump);
  open_output(dir / "archive.jsonl") << dump.str();
  std::ofstream log_file = open_output(dir / "filled_bins.csv");
  write_filled_log_csv(archive, log_file);
  std::istringstream reread(dump.str());
  std::ofstream heat_file = open_output(dir / "heatmap.csv");
  write_heatmap_csv(read_archive_dump(reread), heat_file);

  out << "domain " << domain_name(config.domain) << ", encoding " << encoding_name(config.encoding) << ", seed "
      << config.seed << "\n";
  out << "evaluations " << archive.evaluations << ", filled bins " << archive.filled() << "\n";
  if (const Elite* best = archive.best()) {
    const Evaluator evaluator(config, decoder);
    Json doc = config.domain == Domain::Mario ? mario_level_to_json(evaluator.mario_level(best->genome))
                                              : dungeon_to_json(evaluator.dungeon(best->genome));
    open_output(dir / "best_level.json") << doc.dump(1) << "\n";
    out << "best fitness " << best->fitness << " in bin";
    for (int f : bin_fields(best->bin)) out << " " << f;
    out << "\n";
  }
  out << "wrote " << (dir / "archive.jsonl").string() << ", filled_bins.csv, heatmap.csv\n";
}

void cmd_render(const std::string& file, const std::string& game, bool show_path, std::ostream& out) {
  if (!game.empty()) {
    std::ifstream f(file, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    if (game == "mario") {
      const TileGrid level = parse_mario(ss.str());
      const auto path = show_path ? mario::solve_level(level) : std::nullopt;
      out << render_mario_text(level, path ? &*path : nullptr);
      if (show_path) out << (path ? "path length " + std::to_string(path->length()) : std::string("unsolvable")) << "\n";
    } else {
      for (const auto& room : parse_zelda_rooms(ss.str())) out << render_zelda_room(room) << "\n";
    }
    return;
  }
  const Json doc = read_json_file(file);
  const std::string format = doc.is_object() ? doc.value("format", "") : "";
  if (format == "levelgen-mario-level") {
    const auto segments = mario_level_from_json(doc);
    const TileGrid level = mario::stitch_level(segments);
    const auto path = show_path ? mario::solve_level(level) : std::nullopt;
    out << render_mario_text(level, path ? &*path : nullptr);
    if (show_path) out << (path ? "path length " + std::to_string(path->length()) : std::string("unsolvable")) << "\n";
  } else if (format == "levelgen-dungeon") {
    const DungeonLayout layout = dungeon_from_json(doc);
    const auto path = show_path ? zelda::solve_dungeon(layout) : std::nullopt;
    out << render_dungeon_text(layout, path ? &*path : nullptr);
    if (show_path) {
      out << (path ? "path rooms " + std::to_string(path->distinct_rooms()) + ", steps " + std::to_string(path->steps)
                   : std::string("unsolvable"))
          << "\n";
    }
  } else {
    throw InputError(file + ": expected a levelgen-mario-level or levelgen-dungeon document");
  }
}

void cmd_corpus_stats(const std::string& game, const std::string& dir, std::ostream& out) {
  if (game == "mario") {
    const auto stats = mario_corpus_stats(dir);
    out << "levels " << stats.levels.size() << "\n";
    for (const auto& l : stats.levels) out << "  " << l.name << " width " << l.width << " windows " << l.windows << "\n";
    out << "windows " << stats.total_windows << "\n";
    out << "tile histogram";
    for (std::size_t t = 0; t < stats.tile_histogram.size(); ++t) {
      out << " " << mario_symbol(static_cast<int>(t)) << "=" << stats.tile_histogram[t];
    }
    out << "\n";
  } else {
    const auto stats = zelda_corpus_stats(dir);
    out << "files " << stats.files.size() << "\n";
    out << "rooms " << stats.rooms << "\n";
    out << "unique rooms " << stats.unique_rooms << "\n";
    out << "tile histogram floor=" << stats.tile_histogram[0] << " wall=" << stats.tile_histogram[1]
        << " water=" << stats.tile_histogram[2] << "\n";
  }
}

void cmd_heatmap(const std::string& archive, const std::string& out_path, std::ostream& out) {
  std::ifstream f(archive, std::ios::binary);
  if (!f) throw UsageError("cannot read " + archive);
  const ArchiveDump dump = read_archive_dump(f);
  if (out_path.empty()) {
    write_heatmap_csv(dump, out);
  } else {
    std::ofstream f_out = open_output(out_path);
    write_heatmap_csv(dump, f_out);
  }
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Level generation with CPPN and direct latent encodings under MAP-Elites", "levelgen"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run MAP-Elites from a config file");
  run->add_option("--config", run_args.config, "Run config (levelgen-config 1)")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", run_args.seed, "Override the config seed");
  run->add_option("--threads", run_args.threads, "Override the evaluation thread count")->check(CLI::PositiveNumber);
  run->add_option("--out", run_args.out_dir, "Output directory")->capture_default_str();
  run->add_flag("--progress", run_args.progress, "Report progress on stderr");

  std::string render_file;
  std::string render_game;
  bool render_path = false;
  auto* render = app.add_subcommand("render", "Render a level or dungeon file as text");
  render->add_option("file", render_file, "levelgen JSON document, or VGLC text with --game")
      ->required()
      ->check(CLI::ExistingFile);
  render->add_option("--game", render_game, "Treat the file as VGLC text")->check(CLI::IsMember({"mario", "zelda"}));
  render->add_flag("--path", render_path, "Solve and overlay the path");

  std::string stats_game;
  std::string stats_dir;
  auto* stats = app.add_subcommand("corpus-stats", "Window counts, unique rooms and tile histograms");
  stats->add_option("--game", stats_game, "mario or zelda")->required()->check(CLI::IsMember({"mario", "zelda"}));
  stats->add_option("--dir", stats_dir, "Directory of VGLC .txt files")->required()->check(CLI::ExistingDirectory);

  std::string heat_archive;
  std::string heat_out;
  auto* heat = app.add_subcommand("heatmap", "Archive dump to heatmap CSV");
  heat->add_option("--archive", heat_archive, "archive.jsonl from a run")->required()->check(CLI::ExistingFile);
  heat->add_option("--out", heat_out, "CSV path (default: standard output)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "levelgen: " << e.what() << "\n";
    return 2;
  }

  try {
    if (run->parsed()) {
      cmd_run(run_args, out, err);
    } else if (render->parsed()) {
      cmd_render(render_file, render_game, render_path, out);
    } else if (stats->parsed()) {
      cmd_corpus_stats(stats_game, stats_dir, out);
    } else if (heat->parsed()) {
      cmd_heatmap(heat_archive, heat_out, out);
    }
  } catch (const UsageError& e) {
    err << "levelgen: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "levelgen: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace levelgen
