#include "levelgen/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "levelgen/errors.hpp"
#include "levelgen/mario.hpp"
#include "levelgen/zelda.hpp"

namespace levelgen {

namespace {

constexpr char kMarioSymbols[] = "Xx-qQotpbgkrs";

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.pop_back();
    lines.push_back(line);
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot read " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

char mario_symbol(int tile) {
  if (tile < 0 || tile >= mario::kTileCount) throw InputError("Mario tile identity out of range: " + std::to_string(tile));
  return kMarioSymbols[tile];
}

TileGrid parse_mario(const std::string& text) {
  const auto lines = split_lines(text);
  if (lines.size() != static_cast<std::size_t>(kVglcMarioHeight)) {
    throw ParseError("Mario level must have 14 rows, found " + std::to_string(lines.size()),
                     static_cast<int>(std::min(lines.size(), std::size_t{kVglcMarioHeight})), 0);
  }
  const std::size_t width = lines[0].size();
  if (width == 0) throw ParseError("Mario level has an empty row", 0, 0);
  std::vector<int> tiles;
  tiles.reserve(width * lines.size());
  for (std::size_t y = 0; y < lines.size(); ++y) {
    if (lines[y].size() != width) {
      throw ParseError("Mario row width differs from the first row", static_cast<int>(y),
                       static_cast<int>(std::min(width, lines[y].size())));
    }
    for (std::size_t x = 0; x < width; ++x) {
      const char* hit = std::char_traits<char>::find(kMarioSymbols, mario::kTileCount, lines[y][x]);
      if (!hit) {
        throw ParseError(std::string("unknown Mario symbol '") + lines[y][x] + "'", static_cast<int>(y),
                         static_cast<int>(x));
      }
      tiles.push_back(static_cast<int>(hit - kMarioSymbols));
    }
  }
  return mario::extend_pipes(TileGrid(static_cast<int>(width), kVglcMarioHeight, mario::kTileCount, std::move(tiles)));
}

std::string render_mario(const TileGrid& level) {
  std::string out;
  out.reserve(static_cast<std::size_t>(level.width() + 1) * static_cast<std::size_t>(level.height()));
  for (int y = 0; y < level.height(); ++y) {
    for (int x = 0; x < level.width(); ++x) {
      const int t = level.at(x, y);
      const bool pipe_body = (t == mario::Pipe || t == mario::PiranhaPipe) && y > 0 && level.at(x, y - 1) == t;
      out += pipe_body ? mario_symbol(mario::Empty) : mario_symbol(t);
    }
    out += '\n';
  }
  return out;
}

std::vector<TileGrid> extract_windows(const TileGrid& level, int w, int h) {
  if (w < 1 || h < 1) throw InputError("window size must be positive");
  if (level.height() != h) throw InputError("level height must equal the window height");
  std::vector<TileGrid> windows;
  for (int x = 0; x + w <= level.width(); ++x) windows.push_back(level.crop(x, 0, w, h));
  return windows;
}

int zelda_symbol_identity(char symbol) {
  switch (symbol) {
    case 'F':
      return zelda::Floor;
    case 'W':
    case 'B':
    case 'D':
    case 'S':
    case 'M':
      return zelda::Wall;
    case 'P':
    case 'O':
    case 'I':
      return zelda::Water;
    default:
      return -1;
  }
}

std::vector<TileGrid> parse_zelda_rooms(const std::string& text) {
  const auto lines = split_lines(text);
  if (lines.empty()) return {};
  std::size_t width = 0;
  for (const auto& l : lines) width = std::max(width, l.size());
  if (lines.size() % kZeldaRoomHeight != 0) {
    throw ParseError("dungeon height is not a multiple of 11", static_cast<int>(lines.size()), 0);
  }
  if (width % kZeldaRoomWidth != 0) throw ParseError("dungeon width is not a multiple of 16", 0, static_cast<int>(width));
  const auto cell = [&](std::size_t y, std::size_t x) { return x < lines[y].size() ? lines[y][x] : '-'; };

  std::vector<TileGrid> rooms;
  for (std::size_t ry = 0; ry < lines.size() / kZeldaRoomHeight; ++ry) {
    for (std::size_t rx = 0; rx < width / kZeldaRoomWidth; ++rx) {
      const std::size_t y0 = ry * kZeldaRoomHeight;
      const std::size_t x0 = rx * kZeldaRoomWidth;
      bool gap = true;
      for (std::size_t y = y0; y < y0 + kZeldaRoomHeight && gap; ++y) {
        for (std::size_t x = x0; x < x0 + kZeldaRoomWidth; ++x) {
          if (cell(y, x) != '-') {
            gap = false;
            break;
          }
        }
      }
      if (gap) continue;
      std::vector<int> tiles;
      tiles.reserve(kZeldaRoomWidth * kZeldaRoomHeight);
      for (std::size_t y = y0; y < y0 + kZeldaRoomHeight; ++y) {
        for (std::size_t x = x0; x < x0 + kZeldaRoomWidth; ++x) {
          const int id = zelda_symbol_identity(cell(y, x));
          if (id < 0) {
            throw ParseError(std::string("unknown Zelda symbol '") + cell(y, x) + "'", static_cast<int>(y),
                             static_cast<int>(x));
          }
          tiles.push_back(id);
        }
      }
      rooms.emplace_back(kZeldaRoomWidth, kZeldaRoomHeight, zelda::kTileCount, std::move(tiles));
    }
  }
  return rooms;
}

std::vector<TileGrid> parse_zelda_dungeons(std::span<const std::string> texts) {
  std::vector<TileGrid> unique;
  for (const auto& text : texts) {
    for (auto& room : parse_zelda_rooms(text)) {
      if (std::find(unique.begin(), unique.end(), room) == unique.end()) unique.push_back(std::move(room));
    }
  }
  return unique;
}

std::string render_zelda_room(const TileGrid& room) {
  static constexpr char kGlyphs[] = {'F', 'W', 'P'};
  std::string out;
  for (int y = 0; y < room.height(); ++y) {
    for (int x = 0; x < room.width(); ++x) {
      const int t = room.at(x, y);
      if (t < 0 || t >= zelda::kTileCount) throw InputError("Zelda tile identity out of range");
      out += kGlyphs[t];
    }
    out += '\n';
  }
  return out;
}

ChannelScores one_hot(const TileGrid& grid, int depth) {
  if (depth < 1) throw InputError("one-hot depth must be positive");
  ChannelScores out{depth, grid.height(), grid.width(), {}};
  const std::size_t plane = static_cast<std::size_t>(grid.width()) * static_cast<std::size_t>(grid.height());
  out.data.assign(plane * static_cast<std::size_t>(depth), 0.0f);
  for (int y = 0; y < grid.height(); ++y) {
    for (int x = 0; x < grid.width(); ++x) {
      const int t = grid.at(x, y);
      if (t < 0 || t >= depth) {
        throw InputError("tile identity " + std::to_string(t) + " does not fit one-hot depth " + std::to_string(depth));
      }
      out.data[static_cast<std::size_t>(t) * plane + static_cast<std::size_t>(y) * grid.width() +
               static_cast<std::size_t>(x)] = 1.0f;
    }
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> read_text_files(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw InputError("not a directory: " + dir.string());
  std::vector<std::filesystem::path> paths;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") paths.push_back(entry.path());
  }
  std::sort(paths.begin(), paths.end());
  std::vector<std::pair<std::string, std::string>> files;
  for (const auto& p : paths) files.emplace_back(p.filename().string(), read_file(p));
  return files;
}

MarioCorpusStats mario_corpus_stats(const std::filesystem::path& dir) {
  MarioCorpusStats stats;
  stats.tile_histogram.assign(mario::kTileCount, 0);
  for (const auto& [name, text] : read_text_files(dir)) {
    TileGrid level;
    try {
      level = parse_mario(text);
    } catch (const ParseError& e) {
      throw InputError(name + ": " + e.what());
    }
    const std::size_t windows = extract_windows(level).size();
    stats.levels.push_back({name, level.width(), windows});
    stats.total_windows += windows;
    for (int t : level.tiles()) ++stats.tile_histogram[static_cast<std::size_t>(t)];
  }
  return stats;
}

ZeldaCorpusStats zelda_corpus_stats(const std::filesystem::path& dir) {
  ZeldaCorpusStats stats;
  stats.tile_histogram.assign(zelda::kTileCount, 0);
  std::vector<std::string> texts;
  for (auto& [name, text] : read_text_files(dir)) {
    try {
      stats.rooms += parse_zelda_rooms(text).size();
    } catch (const ParseError& e) {
      throw InputError(name + ": " + e.what());
    }
    stats.files.push_back(name);
    texts.push_back(std::move(text));
  }
  const auto unique = parse_zelda_dungeons(texts);
  stats.unique_rooms = unique.size();
  for (const auto& room : unique) {
    for (int t : room.tiles()) ++stats.tile_histogram[static_cast<std::size_t>(t)];
  }
  return stats;
}

}  // namespace levelgen
