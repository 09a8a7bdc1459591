#include "levelgen/zelda.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <queue>
#include <set>
#include <tuple>
#include <unordered_map>

#include "levelgen/errors.hpp"

namespace levelgen::zelda {

namespace {

constexpr int kCells = kZeldaInteriorWidth * kZeldaInteriorHeight;

int cell_index(CellCoord c) { return c.y * kZeldaInteriorWidth + c.x; }
CellCoord cell_at(int i) { return {i % kZeldaInteriorWidth, i / kZeldaInteriorWidth}; }

struct Side {
  int dr;
  int dc;
  CellCoord exit;
  CellCoord entry;
};

constexpr Side kSides[4] = {
    {0, 1, kRightDoorCell, kLeftDoorCell},
    {0, -1, kLeftDoorCell, kRightDoorCell},
    {1, 0, kDownDoorCell, kUpDoorCell},
    {-1, 0, kUpDoorCell, kDownDoorCell},
};

using Inventory = std::vector<std::uint64_t>;

bool test_bit(const Inventory& inv, std::size_t bit) { return (inv[bit / 64] >> (bit % 64)) & 1U; }
void set_bit(Inventory& inv, std::size_t bit) { inv[bit / 64] |= std::uint64_t{1} << (bit % 64); }

class Search {
 public:
  Search(const DungeonLayout& layout, const SolveOptions& options) : layout_(layout), options_(options) {
    const std::size_t rooms = static_cast<std::size_t>(layout.rows) * layout.cols;
    walkable_.assign(rooms * kCells, false);
    for (const auto& rc : layout.present_rooms()) {
      const TileGrid& g = layout.room(rc);
      for (int i = 0; i < kCells; ++i) {
        const CellCoord c = cell_at(i);
        walkable_[layout.index(rc) * kCells + i] = g.at(kZeldaInteriorX + c.x, kZeldaInteriorY + c.y) == Floor;
      }
      for (const auto& side : kSides) {
        if (layout.door_between(rc, {rc.row + side.dr, rc.col + side.dc}) != DoorKind::None) {
          walkable_[layout.index(rc) * kCells + cell_index(side.exit)] = true;
        }
      }
    }
    if (layout.start) walkable_[layout.index(*layout.start) * kCells + cell_index(kStartCell)] = true;

    for (int r = 0; r < layout.rows; ++r) {
      for (int c = 0; c < layout.cols; ++c) {
        const std::size_t i = layout.index({r, c});
        if (layout.doors_right[i] == DoorKind::Locked) locked_ids_.emplace(i * 2, locked_ids_.size());
        if (layout.doors_down[i] == DoorKind::Locked) locked_ids_.emplace(i * 2 + 1, locked_ids_.size());
      }
    }
    for (std::size_t k = 0; k < layout.keys.size(); ++k) {
      keys_at_[layout.index(layout.keys[k].room) * kCells + cell_index(layout.keys[k].cell)].push_back(k);
    }
    key_words_ = (layout.keys.size() + 63) / 64;
    door_words_ = (locked_ids_.size() + 63) / 64;
  }

  SolveOutcome run() {
    SolveOutcome outcome;
    if (!layout_.start || !layout_.goal) return outcome;
    const auto reachable = reachable_rooms(layout_);
    if (!std::binary_search(reachable.begin(), reachable.end(), *layout_.goal)) return outcome;

    const RoomCoord start = *layout_.start;
    Inventory inv(key_words_ + door_words_, 0);
    collect(inv, start, kStartCell);
    push(start, kStartCell, intern(inv), 0, kNoParent);

    while (!open_.empty()) {
      const auto [f, g, room_i, cell_i, inv_id] = open_.top();
      open_.pop();
      const std::uint64_t key = pack(room_i, cell_i, inv_id);
      Node& node = nodes_.at(key);
      if (node.closed || g > node.g) continue;
      node.closed = true;
      ++outcome.expanded;

      const RoomCoord room{static_cast<int>(room_i) / layout_.cols, static_cast<int>(room_i) % layout_.cols};
      if (room == *layout_.goal) {
        outcome.path = reconstruct(key);
        return outcome;
      }
      if (outcome.expanded >= options_.budget) {
        outcome.budget_exhausted = true;
        return outcome;
      }
      expand(room, cell_at(cell_i), inv_id, g, key);
    }
    return outcome;
  }

 private:
  static constexpr std::uint64_t kNoParent = UINT64_MAX;

  struct Node {
    std::size_t g;
    std::uint64_t parent;
    bool closed;
  };

  using Entry = std::tuple<std::size_t, std::size_t, std::size_t, int, std::uint32_t>;

  std::uint64_t pack(std::size_t room, int cell, std::uint32_t inv) const {
    const std::uint64_t rooms = static_cast<std::uint64_t>(layout_.rows) * layout_.cols;
    return (static_cast<std::uint64_t>(inv) * rooms + room) * kCells + static_cast<std::uint64_t>(cell);
  }

  void unpack(std::uint64_t key, RoomCoord& room, CellCoord& cell) const {
    const std::uint64_t rooms = static_cast<std::uint64_t>(layout_.rows) * layout_.cols;
    cell = cell_at(static_cast<int>(key % kCells));
    const auto r = static_cast<int>((key / kCells) % rooms);
    room = {r / layout_.cols, r % layout_.cols};
  }

  std::uint32_t intern(const Inventory& inv) {
    auto [it, inserted] = inventory_ids_.emplace(inv, static_cast<std::uint32_t>(inventories_.size()));
    if (inserted) inventories_.push_back(inv);
    return it->second;
  }

  std::size_t heuristic(RoomCoord room) const {
    return static_cast<std::size_t>(std::abs(room.row - layout_.goal->row) + std::abs(room.col - layout_.goal->col));
  }

  void collect(Inventory& inv, RoomCoord room, CellCoord cell) const {
    auto it = keys_at_.find(layout_.index(room) * kCells + cell_index(cell));
    if (it == keys_at_.end()) return;
    for (std::size_t k : it->second) set_bit(inv, k);
  }

  int keys_held(const Inventory& inv) const {
    int held = 0;
    for (std::size_t w = 0; w < key_words_; ++w) held += std::popcount(inv[w]);
    for (std::size_t w = 0; w < door_words_; ++w) held -= std::popcount(inv[key_words_ + w]);
    return held;
  }

  void push(RoomCoord room, CellCoord cell, std::uint32_t inv_id, std::size_t g, std::uint64_t parent) {
    const std::size_t room_i = layout_.index(room);
    const int cell_i = cell_index(cell);
    const std::uint64_t key = pack(room_i, cell_i, inv_id);
    auto [it, inserted] = nodes_.try_emplace(key, Node{g, parent, false});
    if (!inserted) {
      if (it->second.closed || g >= it->second.g) return;
      it->second.g = g;
      it->second.parent = parent;
    }
    open_.emplace(g + heuristic(room), g, room_i, cell_i, inv_id);
  }

  void expand(RoomCoord room, CellCoord cell, std::uint32_t inv_id, std::size_t g, std::uint64_t key) {
    const std::size_t room_i = layout_.index(room);
    static constexpr int kDx[4] = {1, -1, 0, 0};
    static constexpr int kDy[4] = {0, 0, 1, -1};
    for (int d = 0; d < 4; ++d) {
      const CellCoord next{cell.x + kDx[d], cell.y + kDy[d]};
      if (next.x < 0 || next.y < 0 || next.x >= kZeldaInteriorWidth || next.y >= kZeldaInteriorHeight) continue;
      if (!walkable_[room_i * kCells + cell_index(next)]) continue;
      move_to(room, next, inv_id, g + 1, key);
    }
    for (const auto& side : kSides) {
      if (cell != side.exit) continue;
      const RoomCoord other{room.row + side.dr, room.col + side.dc};
      const DoorKind kind = layout_.door_between(room, other);
      if (kind == DoorKind::None) continue;
      if (kind == DoorKind::SoftLocked && !options_.soft_locked_open) continue;
      if (kind == DoorKind::Locked) {
        const RoomCoord owner = std::min(room, other);
        const std::size_t door_key = layout_.index(owner) * 2 + (room.row == other.row ? 0 : 1);
        const std::size_t bit = key_words_ * 64 + locked_ids_.at(door_key);
        const Inventory& inv = inventories_[inv_id];
        if (!test_bit(inv, bit)) {
          if (keys_held(inv) < 1) continue;
          Inventory opened = inv;
          set_bit(opened, bit);
          move_to(other, side.entry, intern(opened), g + 1, key);
          continue;
        }
      }
      move_to(other, side.entry, inv_id, g + 1, key);
    }
  }

  void move_to(RoomCoord room, CellCoord cell, std::uint32_t inv_id, std::size_t g, std::uint64_t parent) {
    auto it = keys_at_.find(layout_.index(room) * kCells + cell_index(cell));
    if (it != keys_at_.end()) {
      Inventory inv = inventories_[inv_id];
      collect(inv, room, cell);
      inv_id = intern(inv);
    }
    push(room, cell, inv_id, g, parent);
  }

  DungeonPath reconstruct(std::uint64_t key) const {
    DungeonPath path;
    for (std::uint64_t k = key; k != kNoParent; k = nodes_.at(k).parent) {
      TraceStep step;
      unpack(k, step.room, step.cell);
      path.trace.push_back(step);
    }
    std::reverse(path.trace.begin(), path.trace.end());
    path.steps = path.trace.size() - 1;
    for (const auto& s : path.trace) {
      if (path.rooms.empty() || path.rooms.back() != s.room) path.rooms.push_back(s.room);
    }
    return path;
  }

  const DungeonLayout& layout_;
  SolveOptions options_;
  std::vector<bool> walkable_;
  std::map<std::size_t, std::size_t> locked_ids_;  // room index * 2 + (0 right, 1 down)
  std::unordered_map<std::size_t, std::vector<std::size_t>> keys_at_;
  std::size_t key_words_ = 0;
  std::size_t door_words_ = 0;
  std::map<Inventory, std::uint32_t> inventory_ids_;
  std::vector<Inventory> inventories_;
  std::unordered_map<std::uint64_t, Node> nodes_;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open_;
};

int percent_bin(double pct) {
  if (!(pct >= 0.0)) return 0;
  return static_cast<int>(std::min(std::floor(pct / 10.0), 9.0));
}

}  // namespace

std::vector<RoomCoord> reachable_rooms(const DungeonLayout& layout) {
  std::vector<RoomCoord> out;
  if (!layout.start || !layout.present(*layout.start)) return out;
  std::set<RoomCoord> seen{*layout.start};
  std::deque<RoomCoord> queue{*layout.start};
  while (!queue.empty()) {
    const RoomCoord rc = queue.front();
    queue.pop_front();
    for (const auto& side : kSides) {
      const RoomCoord next{rc.row + side.dr, rc.col + side.dc};
      if (layout.door_between(rc, next) == DoorKind::None || !layout.present(next)) continue;
      if (seen.insert(next).second) queue.push_back(next);
    }
  }
  out.assign(seen.begin(), seen.end());
  return out;
}

TilePercentages water_wall_percentages(const DungeonLayout& layout) {
  const auto rooms = reachable_rooms(layout);
  if (rooms.empty()) throw EvaluationError("dungeon has no reachable rooms");
  std::size_t water = 0;
  std::size_t wall = 0;
  for (const auto& rc : rooms) {
    const TileGrid& g = layout.room(rc);
    for (int y = 0; y < kZeldaInteriorHeight; ++y) {
      for (int x = 0; x < kZeldaInteriorWidth; ++x) {
        const int t = g.at(kZeldaInteriorX + x, kZeldaInteriorY + y);
        if (t == Water) ++water;
        if (t == Wall) ++wall;
      }
    }
  }
  const double total = static_cast<double>(rooms.size()) * kCells;
  return {100.0 * static_cast<double>(water) / total, 100.0 * static_cast<double>(wall) / total};
}

ZeldaBinKey zelda_bin(double water_pct, double wall_pct, int reachable_count) {
  if (reachable_count < 1) throw InputError("reachable room count must be at least 1");
  return {percent_bin(water_pct), percent_bin(wall_pct), reachable_count};
}

std::size_t DungeonPath::distinct_rooms() const {
  return std::set<RoomCoord>(rooms.begin(), rooms.end()).size();
}

SolveOutcome solve_dungeon_detailed(const DungeonLayout& layout, const SolveOptions& options) {
  return Search(layout, options).run();
}

std::optional<DungeonPath> solve_dungeon(const DungeonLayout& layout, const SolveOptions& options) {
  return solve_dungeon_detailed(layout, options).path;
}

double zelda_fitness(const DungeonLayout& layout, const SolveOptions& options) {
  const auto path = solve_dungeon(layout, options);
  if (!path) return 0.0;
  const auto reachable = reachable_rooms(layout);
  return static_cast<double>(path->distinct_rooms()) / static_cast<double>(reachable.size());
}

}  // namespace levelgen::zelda
