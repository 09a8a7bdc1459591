#include "levelgen/tile_grid.hpp"

#include <algorithm>
#include <string>

#include "levelgen/errors.hpp"

namespace levelgen {

TileGrid::TileGrid(int width, int height, int tileset_size, int fill)
    : width_(width), height_(height), tileset_size_(tileset_size) {
  if (width < 1 || height < 1 || tileset_size < 1) throw InputError("tile grid dimensions must be positive");
  if (fill < 0 || fill >= tileset_size) throw InputError("fill tile outside tileset");
  tiles_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

TileGrid::TileGrid(int width, int height, int tileset_size, std::vector<int> tiles)
    : width_(width), height_(height), tileset_size_(tileset_size), tiles_(std::move(tiles)) {
  if (width < 1 || height < 1 || tileset_size < 1) throw InputError("tile grid dimensions must be positive");
  if (tiles_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw InputError("tile count does not match " + std::to_string(width) + "x" + std::to_string(height));
  }
  for (int t : tiles_) {
    if (t < 0 || t >= tileset_size) throw InputError("tile identity " + std::to_string(t) + " outside tileset");
  }
}

void TileGrid::set(int x, int y, int tile) {
  if (!contains(x, y)) throw InputError("tile coordinate out of range");
  if (tile < 0 || tile >= tileset_size_) throw InputError("tile identity " + std::to_string(tile) + " outside tileset");
  tiles_[index(x, y)] = tile;
}

TileGrid TileGrid::crop(int x0, int y0, int w, int h) const {
  if (x0 < 0 || y0 < 0 || w < 1 || h < 1 || x0 + w > width_ || y0 + h > height_) {
    throw InputError("crop region exceeds grid");
  }
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
  for (int y = y0; y < y0 + h; ++y) {
    for (int x = x0; x < x0 + w; ++x) out.push_back(at(x, y));
  }
  return TileGrid(w, h, tileset_size_, std::move(out));
}

std::size_t TileGrid::count(int tile) const {
  return static_cast<std::size_t>(std::count(tiles_.begin(), tiles_.end(), tile));
}

TileGrid hconcat(std::span<const TileGrid> grids) {
  if (grids.empty()) throw InputError("nothing to concatenate");
  const int h = grids.front().height();
  int w = 0;
  int tileset = 1;
  for (const auto& g : grids) {
    if (g.height() != h) throw InputError("grids differ in height");
    w += g.width();
    tileset = std::max(tileset, g.tileset_size());
  }
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
  for (int y = 0; y < h; ++y) {
    for (const auto& g : grids) {
      for (int x = 0; x < g.width(); ++x) out.push_back(g.at(x, y));
    }
  }
  return TileGrid(w, h, tileset, std::move(out));
}

}  // namespace levelgen
