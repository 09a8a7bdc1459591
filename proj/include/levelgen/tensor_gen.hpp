#pragma once

// Generator weights in the GANW container, deterministic forward inference,
// and the analytic stub decoder used when no trained weights are available.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "levelgen/tile_grid.hpp"

namespace levelgen {

using LatentVector = std::vector<double>;

/// Clamps every latent value into [-1, 1].
LatentVector clamp_latent(std::span<const double> z);

struct TensorRecord {
  std::string name;
  /// key=value pairs separated by ';' (kind, kernel, stride, pad, activation, eps, slope).
  std::string layer_meta;
  std::vector<std::uint32_t> shape;
  /// Row-major.
  std::vector<float> data;

  std::size_t element_count() const;
};

enum class LayerKind { ConvTranspose, BatchNorm, Bias };
enum class Nonlinearity { None, Relu, LeakyRelu, Tanh, Sigmoid };

struct LayerSpec {
  LayerKind kind = LayerKind::ConvTranspose;
  int kernel = 0;
  int stride = 1;
  int pad = 0;
  double eps = 1e-5;
  double slope = 0.2;
  Nonlinearity activation = Nonlinearity::None;
};

/// Throws ModelError on unknown kinds, activations or malformed numbers.
LayerSpec parse_layer_meta(std::string_view meta);

/// Validated generator. Layers are applied in record order:
///  - convtranspose: weight [in_ch, out_ch, k, k]
///  - batchnorm:     [4, ch] rows gamma, beta, running mean, running variance
///  - bias:          [ch]
/// The latent enters as an in_ch x 1 x 1 image.
class GeneratorWeights {
 public:
  /// Validates shapes and the layer chain. Throws CorruptionError or ModelError.
  GeneratorWeights(std::vector<TensorRecord> records, std::uint32_t latent_size, std::uint32_t out_width,
                   std::uint32_t out_height, std::uint32_t out_channels);

  const std::vector<TensorRecord>& records() const noexcept { return records_; }
  const std::vector<LayerSpec>& layers() const noexcept { return layers_; }
  int latent_size() const noexcept { return static_cast<int>(latent_size_); }
  int out_width() const noexcept { return static_cast<int>(out_width_); }
  int out_height() const noexcept { return static_cast<int>(out_height_); }
  int out_channels() const noexcept { return static_cast<int>(out_channels_); }

 private:
  std::vector<TensorRecord> records_;
  std::vector<LayerSpec> layers_;
  std::uint32_t latent_size_;
  std::uint32_t out_width_;
  std::uint32_t out_height_;
  std::uint32_t out_channels_;
};

GeneratorWeights parse_generator_weights(std::span<const std::uint8_t> bytes);
GeneratorWeights load_generator_weights(const std::filesystem::path& path);
std::vector<std::uint8_t> serialize_generator_weights(const GeneratorWeights& weights);
void save_generator_weights(const GeneratorWeights& weights, const std::filesystem::path& path);

/// Channel-major [channel][y][x] score volume.
struct ChannelScores {
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<float> data;

  float at(int c, int y, int x) const {
    return data[(static_cast<std::size_t>(c) * static_cast<std::size_t>(height) + static_cast<std::size_t>(y)) *
                    static_cast<std::size_t>(width) +
                static_cast<std::size_t>(x)];
  }
};

/// Full forward pass. The latent is clamped first.
ChannelScores generator_forward(const GeneratorWeights& weights, std::span<const double> z);

/// Per-cell argmax over channels (lowest index wins ties) of the upper-left crop.
TileGrid argmax_tiles(const ChannelScores& scores, int crop_w, int crop_h);

TileGrid generate_segment(const GeneratorWeights& weights, std::span<const double> z, int crop_w, int crop_h);

/// tile(x, y) = floor(1000 |sum_i z_i sin(0.5 (i+1)(x+1) + 0.3 (i+1)(y+1))|) mod tileset_size
TileGrid stub_decode(std::span<const double> z, int w, int h, int tileset_size);

/// Latent vector to tile grid. Implementations are immutable and safe to share across threads.
class Decoder {
 public:
  virtual ~Decoder() = default;
  virtual int latent_size() const = 0;
  virtual int tileset_size() const = 0;
  virtual TileGrid decode(std::span<const double> z, int w, int h) const = 0;
};

class StubDecoder final : public Decoder {
 public:
  StubDecoder(int latent_size, int tileset_size);
  int latent_size() const override { return latent_size_; }
  int tileset_size() const override { return tileset_size_; }
  TileGrid decode(std::span<const double> z, int w, int h) const override;

 private:
  int latent_size_;
  int tileset_size_;
};

class GanDecoder final : public Decoder {
 public:
  explicit GanDecoder(std::shared_ptr<const GeneratorWeights> weights);
  int latent_size() const override { return weights_->latent_size(); }
  int tileset_size() const override { return weights_->out_channels(); }
  TileGrid decode(std::span<const double> z, int w, int h) const override;

 private:
  std::shared_ptr<const GeneratorWeights> weights_;
};

}  // namespace levelgen
