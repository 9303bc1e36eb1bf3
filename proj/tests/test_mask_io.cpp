#include <doctest.h>

#include <cstring>
#include <limits>

#include "lfr/alpha_mask.hpp"
#include "lfr/error.hpp"
#include "lfr/image_io.hpp"
#include "oracles.hpp"
#include "temp_dir.hpp"

using namespace lfr;

TEST_SUITE("mask_io") {
  TEST_CASE("byte layout is little endian with a 17 byte header") {
    AlphaMask m(2, 3, 0.0f);
    m.alpha = {1.0f, 1.5f, 2.0f, -0.25f, 3.0f, 0.6f};
    m.quant_step = 0.05f;
    m.quantized = true;
    const auto bytes = encode_amsk(m);
    REQUIRE(bytes.size() == 17u + 6u * 4u);
    CHECK(std::memcmp(bytes.data(), "AMSK", 4) == 0);
    CHECK(bytes[4] == 3);  // width
    CHECK(bytes[5] == 0);
    CHECK(bytes[8] == 2);  // height
    CHECK(bytes[16] == 1);
    // 1.5f = 0x3FC00000, stored low byte first
    CHECK(bytes[21] == 0x00);
    CHECK(bytes[22] == 0x00);
    CHECK(bytes[23] == 0xC0);
    CHECK(bytes[24] == 0x3F);
    CHECK(decode_amsk(bytes) == m);
  }

  TEST_CASE("file round trip") {
    testutil::TempDir dir;
    AlphaMask m(17, 9, 2.25f);
    m.at(3, 4) = -1.0f;
    save_amsk(m, dir / "m.amsk");
    CHECK(load_amsk(dir / "m.amsk") == m);
  }

  TEST_CASE("malformed streams are rejected") {
    AlphaMask m(2, 2, 1.0f);
    auto good = encode_amsk(m);
    auto bad_magic = good;
    bad_magic[0] = 'X';
    CHECK_THROWS_AS(decode_amsk(bad_magic), ValidationError);
    auto truncated = good;
    truncated.pop_back();
    CHECK_THROWS_AS(decode_amsk(truncated), ValidationError);
    CHECK_THROWS_AS(decode_amsk({}), ValidationError);
    AlphaMask inf(1, 1, std::numeric_limits<float>::infinity());
    CHECK_THROWS_AS(decode_amsk(encode_amsk(inf)), ValidationError);
  }

  TEST_CASE("png round trip at 8 and 16 bits") {
    testutil::TempDir dir;
    Image img(5, 7, 3);
    for (std::size_t i = 0; i < img.size(); ++i) img.pixels()[i] = static_cast<float>(i % 256) / 255.0f;
    save_png(img, dir / "a.png", 8);
    const auto a = load_png(dir / "a.png");
    CHECK(a.bit_depth == 8);
    CHECK(a.image == img);
    Image gray(3, 4, 1);
    for (std::size_t i = 0; i < gray.size(); ++i) gray.pixels()[i] = static_cast<float>(i * 5000) / 65535.0f;
    const auto b = decode_png(encode_png(gray, 16));
    CHECK(b.bit_depth == 16);
    CHECK(b.image == gray);
  }

  TEST_CASE("bad png input is an ingest error") {
    testutil::TempDir dir;
    CHECK_THROWS_AS(load_png(dir / "none.png"), IngestError);
    CHECK_THROWS_AS(decode_png({1, 2, 3}), IngestError);
  }
}
