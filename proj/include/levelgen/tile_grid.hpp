#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace levelgen {

/// Rectangular row-major grid of tile identities in [0, tileset_size).
class TileGrid {
 public:
  TileGrid() = default;
  TileGrid(int width, int height, int tileset_size, int fill = 0);
  TileGrid(int width, int height, int tileset_size, std::vector<int> tiles);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int tileset_size() const noexcept { return tileset_size_; }
  bool empty() const noexcept { return tiles_.empty(); }

  int at(int x, int y) const { return tiles_[index(x, y)]; }
  void set(int x, int y, int tile);
  bool contains(int x, int y) const noexcept { return x >= 0 && y >= 0 && x < width_ && y < height_; }

  std::span<const int> tiles() const noexcept { return tiles_; }

  /// Sub-grid with its upper-left corner at (x0, y0).
  TileGrid crop(int x0, int y0, int w, int h) const;

  /// Count of cells equal to tile.
  std::size_t count(int tile) const;

  bool operator==(const TileGrid&) const = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  int tileset_size_ = 1;
  std::vector<int> tiles_;
};

/// Places grids of equal height side by side, left to right.
TileGrid hconcat(std::span<const TileGrid> grids);

}  // namespace levelgen
