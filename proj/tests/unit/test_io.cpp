#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "qcap/io.hpp"

using namespace qcap;

TEST_CASE("channel json round trip") {
  for (const auto& ch : {nr_channel(0.3), werner_holevo(3), random_channel(2, 3, 2, 4)}) {
    const QuantumChannel back = io::channel_from_json(io::channel_to_json(ch));
    CHECK(back.name() == ch.name());
    CHECK(back.dim_in() == ch.dim_in());
    CHECK(back.dim_out() == ch.dim_out());
    CHECK(max_abs(choi(back).matrix - choi(ch).matrix) == 0.0);
  }
}

TEST_CASE("channel json parsing") {
  const std::string flip = R"({"name": "flip", "dim_in": 2, "dim_out": 2, "kraus": [
      [[[0.6, 0], [0, 0]], [[0, 0], [0.6, 0]]],
      [[[0, 0], [0.8, 0]], [[0.8, 0], [0, 0]]]]})";
  const QuantumChannel ch = io::channel_from_json(flip);
  CHECK(ch.name() == "flip");
  CHECK(ch.kraus().size() == 2);
  CHECK(std::abs(ch.kraus()[1](0, 1) - Complex(0.8, 0)) == 0.0);

  const std::string imag = R"({"dim_in": 1, "dim_out": 1, "kraus": [[[[0, 1]]]]})";
  CHECK(std::abs(io::channel_from_json(imag).kraus()[0](0, 0) - Complex(0, 1)) == 0.0);
}

TEST_CASE("channel json errors") {
  CHECK_THROWS_AS(io::channel_from_json("{not json"), ChannelError);
  CHECK_THROWS_AS(io::channel_from_json("[1, 2]"), ChannelError);
  CHECK_THROWS_AS(io::channel_from_json(R"({"dim_in": 2, "kraus": []})"), ChannelError);
  CHECK_THROWS_AS(io::channel_from_json(R"({"dim_in": 1, "dim_out": 1, "kraus": []})"), ChannelError);
  CHECK_THROWS_AS(io::channel_from_json(R"({"dim_in": 1, "dim_out": 1, "kraus": [[[[1]]]]})"), ChannelError);
  CHECK_THROWS_AS(io::channel_from_json(R"({"dim_in": 1, "dim_out": 2, "kraus": [[[[1, 0]]]]})"), ChannelError);
  // not trace preserving
  CHECK_THROWS_AS(io::channel_from_json(R"({"dim_in": 1, "dim_out": 1, "kraus": [[[[0.5, 0]]]]})"), ChannelError);
  CHECK_THROWS_AS(io::load_channel_file("/nonexistent/channel.json"), ChannelError);
}

TEST_CASE("channel file loading") {
  const std::string path = "test_io_channel.json";
  {
    std::ofstream out(path);
    out << io::channel_to_json(erasure_channel(2, 0.25));
  }
  const QuantumChannel ch = io::load_channel_file(path);
  CHECK(ch.dim_out() == 3);
  std::remove(path.c_str());
}

TEST_CASE("number formatting") {
  CHECK(io::format_number(1.0) == "1");
  CHECK(io::format_number(0.5) == "0.5");
  CHECK(io::format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(io::format_number(5.0 / 3.0) == "1.66666666667");
  CHECK(io::format_number(-2.5e-12) == "-2.5e-12");
}
