#pragma once

// VGLC text ingestion for both games, training-window extraction and corpus statistics.

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "levelgen/tensor_gen.hpp"
#include "levelgen/tile_grid.hpp"

namespace levelgen {

inline constexpr int kVglcMarioHeight = 14;

/// Symbol for a Mario tile identity, e.g. 'X' for 0.
char mario_symbol(int tile);

/// Fourteen equal-width rows of Mario symbols; pipe indicators are extended
/// downward. Throws ParseError with the 0-based row/column of the first bad symbol.
TileGrid parse_mario(const std::string& text);

/// Inverse of parse_mario. Extended pipe cells below a pipe tile of the same
/// kind are written back as '-', so stacked pipe indicators do not round-trip.
std::string render_mario(const TileGrid& level);

/// All w x h windows sliding one column at a time; empty when the level is narrower than w.
std::vector<TileGrid> extract_windows(const TileGrid& level, int w = 28, int h = kVglcMarioHeight);

/// Collapsed identity of a VGLC Zelda symbol, or -1 when the symbol is unknown.
int zelda_symbol_identity(char symbol);

/// Rooms of one dungeon file in lattice order (row-major). Lattice cells made
/// only of '-' are gaps and are skipped.
std::vector<TileGrid> parse_zelda_rooms(const std::string& text);

/// Rooms of every file, exact duplicates removed, first occurrence kept.
std::vector<TileGrid> parse_zelda_dungeons(std::span<const std::string> texts);

/// Writes identities back as F, W and P.
std::string render_zelda_room(const TileGrid& room);

/// Channel-major one-hot volume; argmax_tiles on the result returns the grid.
ChannelScores one_hot(const TileGrid& grid, int depth);

struct MarioLevelStats {
  std::string name;
  int width = 0;
  std::size_t windows = 0;
};

struct MarioCorpusStats {
  std::vector<MarioLevelStats> levels;
  std::size_t total_windows = 0;
  std::vector<std::size_t> tile_histogram;
};

struct ZeldaCorpusStats {
  std::vector<std::string> files;
  std::size_t rooms = 0;
  std::size_t unique_rooms = 0;
  std::vector<std::size_t> tile_histogram;  // over unique rooms
};

/// Reads every regular *.txt file in the directory, sorted by file name.
std::vector<std::pair<std::string, std::string>> read_text_files(const std::filesystem::path& dir);

MarioCorpusStats mario_corpus_stats(const std::filesystem::path& dir);
ZeldaCorpusStats zelda_corpus_stats(const std::filesystem::path& dir);

}  // namespace levelgen
