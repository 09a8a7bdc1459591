#include "levelgen/tensor_gen.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <set>

#include "levelgen/errors.hpp"

namespace levelgen {

namespace {

constexpr std::uint32_t kGanwVersion = 1;
constexpr char kGanwMagic[4] = {'G', 'A', 'N', 'W'};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }

  float f32(const char* what) { return std::bit_cast<float>(u32(what)); }

  std::string text(std::size_t n, const char* what) {
    need(n, what);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n, const char* what) {
    if (remaining() < n) throw CorruptionError(std::string("GANW truncated while reading ") + what);
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

int parse_int(std::string_view key, std::string_view value) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ModelError("layer meta: bad integer for '" + std::string(key) + "': " + std::string(value));
  }
  return v;
}

double parse_real(std::string_view key, std::string_view value) {
  try {
    std::size_t used = 0;
    std::string s(value);
    double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ModelError("layer meta: bad number for '" + std::string(key) + "': " + std::string(value));
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

double apply(Nonlinearity n, double x, double slope) {
  switch (n) {
    case Nonlinearity::None:
      return x;
    case Nonlinearity::Relu:
      return x > 0.0 ? x : 0.0;
    case Nonlinearity::LeakyRelu:
      return x > 0.0 ? x : slope * x;
    case Nonlinearity::Tanh:
      return std::tanh(x);
    case Nonlinearity::Sigmoid:
      return 1.0 / (1.0 + std::exp(-x));
  }
  return x;
}

struct Volume {
  int channels;
  int height;
  int width;
  std::vector<float> data;

  std::size_t at(int c, int y, int x) const {
    return (static_cast<std::size_t>(c) * static_cast<std::size_t>(height) + static_cast<std::size_t>(y)) *
               static_cast<std::size_t>(width) +
           static_cast<std::size_t>(x);
  }
};

Volume conv_transpose(const Volume& in, const TensorRecord& w, const LayerSpec& spec) {
  const int out_ch = static_cast<int>(w.shape[1]);
  const int k = spec.kernel;
  const int s = spec.stride;
  const int p = spec.pad;
  Volume out{out_ch, (in.height - 1) * s - 2 * p + k, (in.width - 1) * s - 2 * p + k, {}};
  out.data.resize(static_cast<std::size_t>(out.channels) * out.height * out.width);

  const auto weight_at = [&](int ic, int oc, int ky, int kx) {
    return w.data[((static_cast<std::size_t>(ic) * out_ch + oc) * k + ky) * k + kx];
  };

  for (int oc = 0; oc < out.channels; ++oc) {
    for (int oy = 0; oy < out.height; ++oy) {
      for (int ox = 0; ox < out.width; ++ox) {
        double acc = 0.0;
        for (int ic = 0; ic < in.channels; ++ic) {
          for (int ky = 0; ky < k; ++ky) {
            const int ny = oy + p - ky;
            if (ny < 0 || ny % s != 0 || ny / s >= in.height) continue;
            const int iy = ny / s;
            for (int kx = 0; kx < k; ++kx) {
              const int nx = ox + p - kx;
              if (nx < 0 || nx % s != 0 || nx / s >= in.width) continue;
              const int ix = nx / s;
              acc += static_cast<double>(in.data[in.at(ic, iy, ix)]) * static_cast<double>(weight_at(ic, oc, ky, kx));
            }
          }
        }
        out.data[out.at(oc, oy, ox)] = static_cast<float>(apply(spec.activation, acc, spec.slope));
      }
    }
  }
  return out;
}

void batch_norm(Volume& v, const TensorRecord& r, const LayerSpec& spec) {
  const std::size_t ch = static_cast<std::size_t>(v.channels);
  const std::size_t plane = static_cast<std::size_t>(v.height) * v.width;
  for (std::size_t c = 0; c < ch; ++c) {
    const double gamma = r.data[c];
    const double beta = r.data[ch + c];
    const double mean = r.data[2 * ch + c];
    const double var = r.data[3 * ch + c];
    const double scale = gamma / std::sqrt(var + spec.eps);
    for (std::size_t i = 0; i < plane; ++i) {
      float& x = v.data[c * plane + i];
      x = static_cast<float>(apply(spec.activation, (static_cast<double>(x) - mean) * scale + beta, spec.slope));
    }
  }
}

void add_bias(Volume& v, const TensorRecord& r, const LayerSpec& spec) {
  const std::size_t plane = static_cast<std::size_t>(v.height) * v.width;
  for (std::size_t c = 0; c < static_cast<std::size_t>(v.channels); ++c) {
    for (std::size_t i = 0; i < plane; ++i) {
      float& x = v.data[c * plane + i];
      x = static_cast<float>(apply(spec.activation, static_cast<double>(x) + r.data[c], spec.slope));
    }
  }
}

}  // namespace

LatentVector clamp_latent(std::span<const double> z) {
  LatentVector out(z.begin(), z.end());
  for (double& v : out) v = std::isnan(v) ? 0.0 : std::clamp(v, -1.0, 1.0);
  return out;
}

std::size_t TensorRecord::element_count() const {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

LayerSpec parse_layer_meta(std::string_view meta) {
  LayerSpec spec;
  bool have_kind = false;
  bool have_kernel = false;
  while (!meta.empty()) {
    const auto cut = meta.find_first_of(";,\n");
    std::string_view item = trim(meta.substr(0, cut));
    meta = cut == std::string_view::npos ? std::string_view{} : meta.substr(cut + 1);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw ModelError("layer meta: expected key=value, got '" + std::string(item) + "'");
    const std::string_view key = trim(item.substr(0, eq));
    const std::string_view value = trim(item.substr(eq + 1));
    if (key == "kind") {
      have_kind = true;
      if (value == "convtranspose") {
        spec.kind = LayerKind::ConvTranspose;
      } else if (value == "batchnorm") {
        spec.kind = LayerKind::BatchNorm;
      } else if (value == "bias") {
        spec.kind = LayerKind::Bias;
      } else {
        throw ModelError("unsupported layer kind '" + std::string(value) + "'");
      }
    } else if (key == "kernel") {
      have_kernel = true;
      spec.kernel = parse_int(key, value);
    } else if (key == "stride") {
      spec.stride = parse_int(key, value);
    } else if (key == "pad") {
      spec.pad = parse_int(key, value);
    } else if (key == "eps") {
      spec.eps = parse_real(key, value);
    } else if (key == "slope") {
      spec.slope = parse_real(key, value);
    } else if (key == "activation") {
      if (value == "none" || value == "identity") {
        spec.activation = Nonlinearity::None;
      } else if (value == "relu") {
        spec.activation = Nonlinearity::Relu;
      } else if (value == "leaky_relu") {
        spec.activation = Nonlinearity::LeakyRelu;
      } else if (value == "tanh") {
        spec.activation = Nonlinearity::Tanh;
      } else if (value == "sigmoid") {
        spec.activation = Nonlinearity::Sigmoid;
      } else {
        throw ModelError("unsupported activation '" + std::string(value) + "'");
      }
    }
    // Unknown keys are carried through untouched.
  }
  if (!have_kind) throw ModelError("layer meta missing 'kind'");
  if (spec.kind == LayerKind::ConvTranspose) {
    if (!have_kernel || spec.kernel < 1) throw ModelError("convtranspose layer needs a positive kernel");
    if (spec.stride < 1 || spec.pad < 0) throw ModelError("convtranspose layer has invalid stride/pad");
  }
  return spec;
}

GeneratorWeights::GeneratorWeights(std::vector<TensorRecord> records, std::uint32_t latent_size,
                                   std::uint32_t out_width, std::uint32_t out_height, std::uint32_t out_channels)
    : records_(std::move(records)),
      latent_size_(latent_size),
      out_width_(out_width),
      out_height_(out_height),
      out_channels_(out_channels) {
  if (latent_size_ == 0 || out_width_ == 0 || out_height_ == 0 || out_channels_ == 0) {
    throw ModelError("GANW header dimensions must be positive");
  }
  if (records_.empty()) throw ModelError("generator needs at least one layer");

  std::set<std::string> names;
  for (const auto& r : records_) {
    if (r.name.empty()) throw CorruptionError("tensor record with empty name");
    if (!names.insert(r.name).second) throw CorruptionError("duplicate tensor name '" + r.name + "'");
    if (r.shape.empty()) throw CorruptionError("tensor '" + r.name + "' has rank 0");
    if (std::find(r.shape.begin(), r.shape.end(), 0u) != r.shape.end()) {
      throw CorruptionError("tensor '" + r.name + "' has a zero dimension");
    }
    if (r.element_count() != r.data.size()) throw CorruptionError("tensor '" + r.name + "' shape/data mismatch");
  }

  long channels = latent_size_;
  long height = 1;
  long width = 1;
  for (const auto& r : records_) {
    LayerSpec spec = parse_layer_meta(r.layer_meta);
    const auto fail = [&](const std::string& why) { throw ModelError("layer '" + r.name + "': " + why); };
    switch (spec.kind) {
      case LayerKind::ConvTranspose: {
        if (r.shape.size() != 4) fail("convtranspose weight must have rank 4");
        if (r.shape[2] != r.shape[3] || static_cast<int>(r.shape[2]) != spec.kernel) fail("kernel size mismatch");
        if (static_cast<long>(r.shape[0]) != channels) {
          fail("expects " + std::to_string(r.shape[0]) + " input channels, chain provides " + std::to_string(channels));
        }
        channels = r.shape[1];
        height = (height - 1) * spec.stride - 2L * spec.pad + spec.kernel;
        width = (width - 1) * spec.stride - 2L * spec.pad + spec.kernel;
        if (height < 1 || width < 1) fail("output would be empty");
        break;
      }
      case LayerKind::BatchNorm:
        if (r.shape.size() != 2 || r.shape[0] != 4 || static_cast<long>(r.shape[1]) != channels) {
          fail("batchnorm tensor must be [4, " + std::to_string(channels) + "]");
        }
        break;
      case LayerKind::Bias:
        if (r.shape.size() != 1 || static_cast<long>(r.shape[0]) != channels) {
          fail("bias tensor must be [" + std::to_string(channels) + "]");
        }
        break;
    }
    layers_.push_back(spec);
  }
  if (channels != static_cast<long>(out_channels_) || height != static_cast<long>(out_height_) ||
      width != static_cast<long>(out_width_)) {
    throw ModelError("layer chain produces " + std::to_string(channels) + "x" + std::to_string(height) + "x" +
                     std::to_string(width) + ", header declares " + std::to_string(out_channels_) + "x" +
                     std::to_string(out_height_) + "x" + std::to_string(out_width_));
  }
}

GeneratorWeights parse_generator_weights(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || !std::equal(std::begin(kGanwMagic), std::end(kGanwMagic), bytes.begin(),
                                      [](char a, std::uint8_t b) { return static_cast<std::uint8_t>(a) == b; })) {
    throw FormatError("not a GANW file (bad magic)");
  }
  ByteReader in(bytes.subspan(4));
  const std::uint32_t version = in.u32("version");
  if (version != kGanwVersion) throw FormatError("unsupported GANW version " + std::to_string(version));
  const std::uint32_t latent = in.u32("latent_size");
  const std::uint32_t out_w = in.u32("out_width");
  const std::uint32_t out_h = in.u32("out_height");
  const std::uint32_t out_c = in.u32("out_channels");
  const std::uint32_t count = in.u32("record_count");

  std::vector<TensorRecord> records;
  for (std::uint32_t i = 0; i < count; ++i) {
    TensorRecord r;
    r.name = in.text(in.u32("name length"), "name");
    r.layer_meta = in.text(in.u32("layer meta length"), "layer meta");
    const std::uint32_t rank = in.u32("rank");
    if (rank == 0) throw CorruptionError("tensor '" + r.name + "' has rank 0");
    std::size_t n = 1;
    for (std::uint32_t d = 0; d < rank; ++d) {
      const std::uint32_t dim = in.u32("dims");
      if (dim == 0) throw CorruptionError("tensor '" + r.name + "' has a zero dimension");
      r.shape.push_back(dim);
      n *= dim;
      if (n > in.remaining() / 4 + 1) throw CorruptionError("tensor '" + r.name + "' data exceeds file size");
    }
    if (n * 4 > in.remaining()) throw CorruptionError("tensor '" + r.name + "' data truncated");
    r.data.resize(n);
    for (auto& v : r.data) v = in.f32("data");
    records.push_back(std::move(r));
  }
  if (in.remaining() != 0) throw CorruptionError("trailing bytes after last GANW record");
  return GeneratorWeights(std::move(records), latent, out_w, out_h, out_c);
}

GeneratorWeights load_generator_weights(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot open weights file " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return parse_generator_weights(bytes);
}

std::vector<std::uint8_t> serialize_generator_weights(const GeneratorWeights& weights) {
  std::vector<std::uint8_t> out(std::begin(kGanwMagic), std::end(kGanwMagic));
  put_u32(out, kGanwVersion);
  put_u32(out, static_cast<std::uint32_t>(weights.latent_size()));
  put_u32(out, static_cast<std::uint32_t>(weights.out_width()));
  put_u32(out, static_cast<std::uint32_t>(weights.out_height()));
  put_u32(out, static_cast<std::uint32_t>(weights.out_channels()));
  put_u32(out, static_cast<std::uint32_t>(weights.records().size()));
  for (const auto& r : weights.records()) {
    put_u32(out, static_cast<std::uint32_t>(r.name.size()));
    out.insert(out.end(), r.name.begin(), r.name.end());
    put_u32(out, static_cast<std::uint32_t>(r.layer_meta.size()));
    out.insert(out.end(), r.layer_meta.begin(), r.layer_meta.end());
    put_u32(out, static_cast<std::uint32_t>(r.shape.size()));
    for (auto d : r.shape) put_u32(out, d);
    for (float v : r.data) put_u32(out, std::bit_cast<std::uint32_t>(v));
  }
  return out;
}

void save_generator_weights(const GeneratorWeights& weights, const std::filesystem::path& path) {
  const auto bytes = serialize_generator_weights(weights);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write weights file " + path.string());
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

ChannelScores generator_forward(const GeneratorWeights& weights, std::span<const double> z) {
  if (static_cast<int>(z.size()) != weights.latent_size()) {
    throw InputError("latent vector has length " + std::to_string(z.size()) + ", generator expects " +
                     std::to_string(weights.latent_size()));
  }
  const LatentVector clamped = clamp_latent(z);
  Volume v{weights.latent_size(), 1, 1, {}};
  v.data.reserve(clamped.size());
  for (double x : clamped) v.data.push_back(static_cast<float>(x));

  for (std::size_t i = 0; i < weights.layers().size(); ++i) {
    const auto& spec = weights.layers()[i];
    const auto& rec = weights.records()[i];
    switch (spec.kind) {
      case LayerKind::ConvTranspose:
        v = conv_transpose(v, rec, spec);
        break;
      case LayerKind::BatchNorm:
        batch_norm(v, rec, spec);
        break;
      case LayerKind::Bias:
        add_bias(v, rec, spec);
        break;
    }
  }
  return ChannelScores{v.channels, v.height, v.width, std::move(v.data)};
}

TileGrid argmax_tiles(const ChannelScores& scores, int crop_w, int crop_h) {
  if (crop_w < 1 || crop_h < 1 || crop_w > scores.width || crop_h > scores.height) {
    throw InputError("crop " + std::to_string(crop_w) + "x" + std::to_string(crop_h) + " exceeds output " +
                     std::to_string(scores.width) + "x" + std::to_string(scores.height));
  }
  std::vector<int> tiles;
  tiles.reserve(static_cast<std::size_t>(crop_w) * crop_h);
  for (int y = 0; y < crop_h; ++y) {
    for (int x = 0; x < crop_w; ++x) {
      int best = 0;
      for (int c = 1; c < scores.channels; ++c) {
        if (scores.at(c, y, x) > scores.at(best, y, x)) best = c;
      }
      tiles.push_back(best);
    }
  }
  return TileGrid(crop_w, crop_h, scores.channels, std::move(tiles));
}

TileGrid generate_segment(const GeneratorWeights& weights, std::span<const double> z, int crop_w, int crop_h) {
  if (crop_w < 1 || crop_h < 1 || crop_w > weights.out_width() || crop_h > weights.out_height()) {
    throw InputError("crop exceeds generator output dimensions");
  }
  return argmax_tiles(generator_forward(weights, z), crop_w, crop_h);
}

TileGrid stub_decode(std::span<const double> z, int w, int h, int tileset_size) {
  if (w < 1 || h < 1 || tileset_size < 1) throw InputError("stub decode needs positive dimensions and tileset");
  const LatentVector clamped = clamp_latent(z);
  std::vector<int> tiles;
  tiles.reserve(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double sum = 0.0;
      for (std::size_t i = 0; i < clamped.size(); ++i) {
        const double k = static_cast<double>(i + 1);
        sum += clamped[i] * std::sin(0.5 * k * (x + 1) + 0.3 * k * (y + 1));
      }
      const double scaled = std::floor(1000.0 * std::fabs(sum));
      tiles.push_back(static_cast<int>(std::fmod(scaled, static_cast<double>(tileset_size))));
    }
  }
  return TileGrid(w, h, tileset_size, std::move(tiles));
}

StubDecoder::StubDecoder(int latent_size, int tileset_size) : latent_size_(latent_size), tileset_size_(tileset_size) {
  if (latent_size < 1 || tileset_size < 1) throw InputError("stub decoder needs positive latent and tileset sizes");
}

TileGrid StubDecoder::decode(std::span<const double> z, int w, int h) const {
  if (static_cast<int>(z.size()) != latent_size_) {
    throw InputError("latent vector has length " + std::to_string(z.size()) + ", decoder expects " +
                     std::to_string(latent_size_));
  }
  return stub_decode(z, w, h, tileset_size_);
}

GanDecoder::GanDecoder(std::shared_ptr<const GeneratorWeights> weights) : weights_(std::move(weights)) {
  if (!weights_) throw InputError("null generator weights");
}

TileGrid GanDecoder::decode(std::span<const double> z, int w, int h) const {
  return generate_segment(*weights_, z, w, h);
}

}  // namespace levelgen
