#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "json.hpp"
#include "levelgen/errors.hpp"
#include "levelgen/rng.hpp"
#include "levelgen/tensor_gen.hpp"
#include "oracles.hpp"

using namespace levelgen;

namespace {

// Little-endian GANW writer kept separate from the library's serializer.
struct Bytes {
  std::vector<std::uint8_t> b;
  Bytes& u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) b.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    return *this;
  }
  Bytes& str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    b.insert(b.end(), s.begin(), s.end());
    return *this;
  }
  Bytes& f32(float f) {
    std::uint32_t v;
    std::memcpy(&v, &f, 4);
    return u32(v);
  }
  Bytes& header(std::uint32_t latent, std::uint32_t w, std::uint32_t h, std::uint32_t c, std::uint32_t records) {
    b.insert(b.end(), {'G', 'A', 'N', 'W'});
    return u32(1).u32(latent).u32(w).u32(h).u32(c).u32(records);
  }
  Bytes& record(const std::string& name, const std::string& meta, std::vector<std::uint32_t> shape,
                const std::vector<float>& data) {
    str(name).str(meta).u32(static_cast<std::uint32_t>(shape.size()));
    for (auto d : shape) u32(d);
    for (float f : data) f32(f);
    return *this;
  }
};

// latent 1 -> 1x2x2 (kernel 2) -> 1x4x4 (kernel 2, stride 2).
Bytes two_layer_file() {
  Bytes f;
  f.header(1, 4, 4, 1, 2)
      .record("c1", "kind=convtranspose;kernel=2;stride=1;pad=0", {1, 1, 2, 2}, {1, 2, 3, 4})
      .record("c2", "kind=convtranspose;kernel=2;stride=2;pad=0", {1, 1, 2, 2}, {1, -1, 0.5f, 2});
  return f;
}

std::string fixture(const std::string& name) { return std::string(LEVELGEN_FIXTURE_DIR) + "/" + name; }

}  // namespace

TEST_SUITE("tensor-gen") {
  TEST_CASE("empty file is a format error") {
    CHECK_THROWS_AS(parse_generator_weights({}), FormatError);
  }

  TEST_CASE("bad magic and unsupported version are format errors") {
    Bytes f = two_layer_file();
    f.b[0] = 'X';
    CHECK_THROWS_AS(parse_generator_weights(f.b), FormatError);
    Bytes v = two_layer_file();
    v.b[4] = 2;
    CHECK_THROWS_AS(parse_generator_weights(v.b), FormatError);
  }

  TEST_CASE("header with zero records is a model error") {
    Bytes f;
    f.header(10, 32, 32, 3, 0);
    CHECK_THROWS_AS(parse_generator_weights(f.b), ModelError);
  }

  TEST_CASE("truncated data and trailing bytes are corruption errors") {
    Bytes f = two_layer_file();
    auto cut = f.b;
    cut.resize(cut.size() - 3);
    CHECK_THROWS_AS(parse_generator_weights(cut), CorruptionError);
    auto extra = f.b;
    extra.push_back(0);
    CHECK_THROWS_AS(parse_generator_weights(extra), CorruptionError);
  }

  TEST_CASE("shape and data length mismatch is a corruption error") {
    // Shape claims 5 elements; file carries only 4 and then ends.
    Bytes f;
    f.header(1, 2, 2, 1, 1).record("c1", "kind=convtranspose;kernel=2", {1, 1, 2, 2}, {1, 2, 3, 4});
    std::vector<std::uint8_t> bytes = f.b;
    // dims start after magic(4) + 6*u32 + name(4+2) + meta(4+len) + rank(4)
    const std::size_t dims_at = 4 + 24 + 6 + 4 + std::string("kind=convtranspose;kernel=2").size() + 4;
    bytes[dims_at + 12] = 3;  // last dim 2 -> 3: 6 elements expected
    CHECK_THROWS_AS(parse_generator_weights(bytes), CorruptionError);

    TensorRecord r{"w", "kind=bias", {3}, {1.0f, 2.0f}};
    CHECK_THROWS_AS(GeneratorWeights({r}, 1, 1, 1, 3), CorruptionError);
  }

  TEST_CASE("duplicate and empty names are corruption errors") {
    Bytes f;
    f.header(1, 2, 2, 1, 2)
        .record("c1", "kind=convtranspose;kernel=2", {1, 1, 2, 2}, {1, 2, 3, 4})
        .record("c1", "kind=bias", {1}, {0.5f});
    CHECK_THROWS_AS(parse_generator_weights(f.b), CorruptionError);
    Bytes g;
    g.header(1, 2, 2, 1, 1).record("", "kind=convtranspose;kernel=2", {1, 1, 2, 2}, {1, 2, 3, 4});
    CHECK_THROWS_AS(parse_generator_weights(g.b), CorruptionError);
  }

  TEST_CASE("incompatible layer chain is a model error") {
    Bytes f;
    f.header(1, 4, 4, 1, 2)
        .record("c1", "kind=convtranspose;kernel=2", {1, 2, 2, 2}, std::vector<float>(8, 1.0f))
        .record("c2", "kind=convtranspose;kernel=2;stride=2", {1, 1, 2, 2}, {1, 1, 1, 1});
    CHECK_THROWS_AS(parse_generator_weights(f.b), ModelError);

    Bytes wrong_header;
    wrong_header.header(1, 5, 5, 1, 2)
        .record("c1", "kind=convtranspose;kernel=2", {1, 1, 2, 2}, {1, 2, 3, 4})
        .record("c2", "kind=convtranspose;kernel=2;stride=2", {1, 1, 2, 2}, {1, 1, 1, 1});
    CHECK_THROWS_AS(parse_generator_weights(wrong_header.b), ModelError);

    Bytes unknown;
    unknown.header(1, 2, 2, 1, 1).record("c1", "kind=conv3d;kernel=2", {1, 1, 2, 2}, {1, 2, 3, 4});
    CHECK_THROWS_AS(parse_generator_weights(unknown.b), ModelError);
  }

  TEST_CASE("serialize then parse reproduces the file bytes") {
    const auto w = parse_generator_weights(two_layer_file().b);
    CHECK(serialize_generator_weights(w) == two_layer_file().b);
  }

  TEST_CASE("hand-computed transposed convolutions") {
    const auto w = parse_generator_weights(two_layer_file().b);
    const std::vector<double> z{0.5};
    const auto s = generator_forward(w, z);
    REQUIRE(s.channels == 1);
    REQUIRE(s.width == 4);
    REQUIRE(s.height == 4);
    // First layer: 0.5 * [[1,2],[3,4]]; second places value * [[1,-1],[0.5,2]] in each 2x2 block.
    const double first[2][2] = {{0.5, 1.0}, {1.5, 2.0}};
    const double k2[2][2] = {{1.0, -1.0}, {0.5, 2.0}};
    for (int y = 0; y < 4; ++y) {
      for (int x = 0; x < 4; ++x) CHECK(s.at(0, y, x) == doctest::Approx(first[y / 2][x / 2] * k2[y % 2][x % 2]));
    }
  }

  TEST_CASE("padding trims the border of the full transposed output") {
    Bytes f;
    f.header(1, 3, 3, 1, 2)
        .record("c1", "kind=convtranspose;kernel=2", {1, 1, 2, 2}, {1, 2, 3, 4})
        .record("c2", "kind=convtranspose;kernel=3;stride=2;pad=1", {1, 1, 3, 3}, {1, 0, 0, 0, 1, 0, 0, 0, 1});
    const auto w = parse_generator_weights(f.b);
    const auto s = generator_forward(w, std::vector<double>{1.0});
    REQUIRE(s.width == 3);
    // Full 5x5 output: input pixel (i,j) adds its value on cells (2i+d, 2j+d), d = 0..2.
    double full[5][5] = {};
    const double in[2][2] = {{1, 2}, {3, 4}};
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        for (int d = 0; d < 3; ++d) full[2 * i + d][2 * j + d] += in[i][j];
      }
    }
    for (int y = 0; y < 3; ++y) {
      for (int x = 0; x < 3; ++x) CHECK(s.at(0, y, x) == doctest::Approx(full[y + 1][x + 1]));
    }
  }

  TEST_CASE("batchnorm, bias and nonlinearities") {
    Bytes f;
    f.header(2, 1, 1, 2, 3)
        .record("c1", "kind=convtranspose;kernel=1", {2, 2, 1, 1}, {1, 0, 0, 1})
        .record("bn", "kind=batchnorm;eps=0;activation=leaky_relu;slope=0.1", {4, 2}, {2, 1, 0.5f, -1, 0, 1, 4, 1})
        .record("b", "kind=bias;activation=tanh", {2}, {0.25f, -0.5f});
    const auto w = parse_generator_weights(f.b);
    const auto s = generator_forward(w, std::vector<double>{0.8, -0.6});
    const auto leaky = [](double v) { return v > 0 ? v : 0.1 * v; };
    const double c0 = std::tanh(leaky(2.0 * (0.8 - 0.0) / std::sqrt(4.0f) + 0.5f) + 0.25);
    const double c1 = std::tanh(leaky(1.0 * (-0.6 - 1.0) / std::sqrt(1.0f) - 1.0f) - 0.5);
    CHECK(s.at(0, 0, 0) == doctest::Approx(c0).epsilon(1e-6));
    CHECK(s.at(1, 0, 0) == doctest::Approx(c1).epsilon(1e-6));
  }

  TEST_CASE("latent length and crop preconditions") {
    const auto w = parse_generator_weights(two_layer_file().b);
    CHECK_THROWS_AS(generate_segment(w, std::vector<double>{0.1, 0.2}, 2, 2), InputError);
    CHECK_THROWS_AS(generate_segment(w, std::vector<double>{0.1}, 5, 2), InputError);
    const TileGrid g = generate_segment(w, std::vector<double>{0.1}, 3, 2);
    CHECK(g.width() == 3);
    CHECK(g.height() == 2);
  }

  TEST_CASE("latent values are clamped before inference") {
    const auto w = parse_generator_weights(two_layer_file().b);
    const auto a = generator_forward(w, std::vector<double>{7.0});
    const auto b = generator_forward(w, std::vector<double>{1.0});
    CHECK(a.data == b.data);
    CHECK(clamp_latent(std::vector<double>{-3.0, 0.25, 2.0, std::nan("")}) == LatentVector{-1.0, 0.25, 1.0, 0.0});
  }

  TEST_CASE("argmax picks the maximizing channel, lowest index on ties") {
    ChannelScores s{3, 1, 3, {0.1f, 0.5f, 0.7f, 0.9f, 0.5f, 0.7f, 0.2f, 0.1f, 0.7f}};
    const TileGrid g = argmax_tiles(s, 3, 1);
    CHECK(g.at(0, 0) == 1);  // (0.1, 0.9, 0.2)
    CHECK(g.at(1, 0) == 0);  // (0.5, 0.5, 0.1)
    CHECK(g.at(2, 0) == 0);  // (0.7, 0.7, 0.7)
  }

  TEST_CASE("forward pass matches the PyTorch reference generator") {
    const auto w = load_generator_weights(fixture("zelda_like.ganw"));
    CHECK(w.latent_size() == 10);
    CHECK(w.out_width() == 32);
    CHECK(w.out_height() == 32);
    CHECK(w.out_channels() == 3);
    const auto ref = nlohmann::json::parse(oracle::read_file(fixture("zelda_like_reference.json")));
    REQUIRE(ref.at("cases").size() == 10);
    for (const auto& c : ref.at("cases")) {
      const auto z = c.at("z").get<std::vector<double>>();
      const auto scores = c.at("scores").get<std::vector<double>>();
      const auto tiles = c.at("tiles").get<std::vector<int>>();
      const auto s = generator_forward(w, z);
      REQUIRE(s.data.size() == scores.size());
      double worst = 0.0;
      for (std::size_t i = 0; i < scores.size(); ++i) worst = std::max(worst, std::abs(s.data[i] - scores[i]));
      CHECK(worst <= 1e-4);
      const TileGrid g = generate_segment(w, z, 32, 32);
      CHECK(std::vector<int>(g.tiles().begin(), g.tiles().end()) == tiles);
      const TileGrid room = generate_segment(w, z, 16, 11);
      CHECK(room == g.crop(0, 0, 16, 11));
    }
  }

  TEST_CASE("stub decode closed form") {
    CHECK(stub_decode(std::vector<double>(5, 0.0), 4, 3, 13) == TileGrid(4, 3, 13, 0));
    Rng rng(1);
    std::vector<double> z(6);
    for (auto& v : z) v = rng.uniform(-1, 1);
    CHECK(stub_decode(z, 5, 5, 1) == TileGrid(5, 5, 1, 0));

    const TileGrid g = stub_decode(std::vector<double>{1.0}, 2, 1, 13);
    for (int x = 0; x < 2; ++x) {
      const int expect = static_cast<int>(std::floor(1000.0 * std::abs(std::sin(0.5 * (x + 1) + 0.3)))) % 13;
      CHECK(g.at(x, 0) == expect);
    }
    CHECK(g.at(0, 0) == 2);   // floor(1000 sin 0.8) = 717 = 55*13 + 2
    CHECK(g.at(1, 0) == 1);   // floor(1000 sin 1.3) = 963 = 74*13 + 1
  }

  TEST_CASE("stub decoder reacts to single-coordinate changes") {
    Rng rng(99);
    int differ = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      std::vector<double> a(10);
      for (auto& v : a) v = rng.uniform(-1, 1);
      auto b = a;
      const std::size_t i = rng.index(10);
      b[i] = a[i] >= 0 ? a[i] - 0.5 - 0.5 * rng.uniform01() : a[i] + 0.5 + 0.5 * rng.uniform01();
      if (stub_decode(a, 16, 11, 3) != stub_decode(b, 16, 11, 3)) ++differ;
    }
    CHECK(differ >= 950);
  }

  TEST_CASE("decoders are deterministic") {
    const StubDecoder stub(10, 3);
    const std::vector<double> z{0.1, -0.4, 0.9, 0.0, 0.3, -0.2, 0.5, -1.0, 1.0, 0.7};
    CHECK(stub.decode(z, 16, 11) == stub.decode(z, 16, 11));
    CHECK_THROWS_AS(stub.decode(std::vector<double>(9, 0.0), 16, 11), InputError);
    const GanDecoder gan(std::make_shared<GeneratorWeights>(load_generator_weights(fixture("zelda_like.ganw"))));
    CHECK(gan.decode(z, 16, 11) == gan.decode(z, 16, 11));
    CHECK_THROWS_AS(gan.decode(std::vector<double>(9, 0.0), 16, 11), InputError);
  }
}
