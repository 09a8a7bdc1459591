#include "levelgen/render.hpp"

#include <algorithm>
#include <vector>

#include "levelgen/corpus.hpp"

namespace levelgen {

std::string render_mario_text(const TileGrid& level, const mario::MarioPath* path) {
  std::vector<std::string> rows;
  for (int y = 0; y < level.height(); ++y) {
    std::string row;
    for (int x = 0; x < level.width(); ++x) row += mario_symbol(level.at(x, y));
    rows.push_back(std::move(row));
  }
  if (path) {
    for (const auto& s : path->states) {
      if (level.contains(s.x, s.y)) rows[static_cast<std::size_t>(s.y)][static_cast<std::size_t>(s.x)] = '*';
    }
  }
  std::string out;
  for (const auto& r : rows) out += r + "\n";
  return out;
}

namespace {

char door_glyph(DoorKind kind) {
  switch (kind) {
    case DoorKind::Plain:
      return '+';
    case DoorKind::SoftLocked:
      return 's';
    case DoorKind::Bombable:
      return 'b';
    case DoorKind::Locked:
      return 'L';
    case DoorKind::None:
      break;
  }
  return '#';
}

class Canvas {
 public:
  Canvas(int rows, int cols)
      : width_(cols * kZeldaRoomWidth), lines_(static_cast<std::size_t>(rows * kZeldaRoomHeight), std::string(static_cast<std::size_t>(width_), ' ')) {}

  void put(RoomCoord room, int x, int y, char c) {
    lines_[static_cast<std::size_t>(room.row * kZeldaRoomHeight + y)][static_cast<std::size_t>(room.col * kZeldaRoomWidth + x)] = c;
  }
  void put_cell(RoomCoord room, CellCoord cell, char c) {
    put(room, cell.x + kZeldaInteriorX, cell.y + kZeldaInteriorY, c);
  }

  std::string str() const {
    std::string out;
    for (const auto& l : lines_) out += l + "\n";
    return out;
  }

 private:
  int width_;
  std::vector<std::string> lines_;
};

}  // namespace

std::string render_dungeon_text(const DungeonLayout& layout, const zelda::DungeonPath* path) {
  static constexpr char kGlyphs[] = {'.', '#', '~'};
  Canvas canvas(layout.rows, layout.cols);
  const auto present = layout.present_rooms();
  for (const auto& rc : present) {
    const TileGrid& room = layout.room(rc);
    for (int y = 0; y < room.height(); ++y) {
      for (int x = 0; x < room.width(); ++x) canvas.put(rc, x, y, kGlyphs[room.at(x, y)]);
    }
  }
  const int mid_x = kZeldaRoomWidth / 2 - 1;
  const int mid_y = kZeldaRoomHeight / 2;
  for (const auto& rc : present) {
    const DoorKind right = layout.right_door(rc);
    if (right != DoorKind::None) {
      const RoomCoord other{rc.row, rc.col + 1};
      for (int d = 0; d < kZeldaInteriorX; ++d) {
        canvas.put(rc, kZeldaRoomWidth - 1 - d, mid_y, door_glyph(right));
        canvas.put(other, d, mid_y, door_glyph(right));
      }
    }
    const DoorKind down = layout.down_door(rc);
    if (down != DoorKind::None) {
      const RoomCoord other{rc.row + 1, rc.col};
      for (int d = 0; d < kZeldaInteriorY; ++d) {
        canvas.put(rc, mid_x, kZeldaRoomHeight - 1 - d, door_glyph(down));
        canvas.put(other, mid_x, d, door_glyph(down));
      }
    }
  }

  if (layout.start) {
    const auto reachable = zelda::reachable_rooms(layout);
    for (const auto& rc : present) {
      if (std::binary_search(reachable.begin(), reachable.end(), rc)) continue;
      for (int i = 0; i < kZeldaInteriorHeight; ++i) {
        canvas.put_cell(rc, {i + (kZeldaInteriorWidth - kZeldaInteriorHeight) / 2, i}, 'x');
        canvas.put_cell(rc, {kZeldaInteriorWidth - 1 - i - (kZeldaInteriorWidth - kZeldaInteriorHeight) / 2, i}, 'x');
      }
    }
  }
  if (path) {
    for (const auto& step : path->trace) canvas.put_cell(step.room, step.cell, '*');
  }
  for (const auto& key : layout.keys) canvas.put_cell(key.room, key.cell, 'k');
  if (layout.start) canvas.put_cell(*layout.start, zelda::kStartCell, 'S');
  if (layout.goal) canvas.put_cell(*layout.goal, zelda::kStartCell, 'G');
  return canvas.str();
}

}  // namespace levelgen
