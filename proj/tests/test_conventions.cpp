#include <fstream>
#include <sstream>

#include "doctest.h"
#include "gsi/json_io.hpp"

using namespace gsi;
using gsi::json_io::json;

namespace {

// Every fenced json block of the conventions document.
std::vector<json> json_blocks() {
  std::ifstream in(std::string(GSI_SOURCE_DIR) + "/docs/conventions.md");
  REQUIRE(in.good());
  std::vector<json> blocks;
  std::string line, body;
  bool inside = false;
  while (std::getline(in, line)) {
    if (!inside && line == "```json") {
      inside = true;
      body.clear();
    } else if (inside && line == "```") {
      inside = false;
      blocks.push_back(json::parse(body));
    } else if (inside) {
      body += line + "\n";
    }
  }
  return blocks;
}

void check_scalar(const Scalar& actual, const json& expected) {
  Scalar e = json_io::scalar_from(expected);
  CHECK(distance(actual, e) < 1e-12);
  if (e.is_exact() && actual.is_exact()) CHECK(*actual.exact() == *e.exact());
}

}  // namespace

TEST_CASE("documented Fourier conventions") {
  auto blocks = json_blocks();
  REQUIRE(blocks.size() == 1);
  int checked = 0;
  for (const auto& c : blocks[0]) {
    std::string group = c.at("group");
    if (group == "Z_M") {
      GroupModel model = GroupModel::cyclic(c.at("modulus").get<long>());
      DenseVector time{Domain::Time, {}};
      for (const auto& v : c.at("time")) time.values.push_back(json_io::scalar_from(v));
      DenseVector freq = fourier(time, Direction::Forward, model);
      REQUIRE(freq.values.size() == c.at("frequency").size());
      for (std::size_t k = 0; k < freq.values.size(); ++k) check_scalar(freq.values[k], c.at("frequency")[k]);
      DenseVector back = fourier(freq, Direction::Inverse, model);
      for (std::size_t k = 0; k < back.values.size(); ++k) check_scalar(back.values[k], c.at("time")[k]);
    } else if (group == "Z") {
      FiniteSequence f;
      f.start = Integer(c.at("sequence").at("start").get<std::string>());
      for (const auto& v : c.at("sequence").at("values")) f.values.push_back(json_io::scalar_from(v));
      Spectrum s = spectrum(f, GroupModel::integers());
      for (const auto& p : c.at("samples")) check_scalar(s.at({json_io::rational_from(p.at("omega"))}), p.at("value"));
    } else if (group == "R") {
      const json& sp = c.at("spectrum");
      Box box{Interval{json_io::rational_from(sp.at("box")[0]), json_io::rational_from(sp.at("box")[1])}};
      BoxSpectrum b{{{box, json_io::scalar_from(sp.at("value"))}}, {Rational(0)}};
      for (const auto& p : c.at("samples")) {
        auto v = inverse_fourier_at(b, {json_io::rational_from(p.at("x"))});
        CHECK(std::abs(v - json_io::scalar_from(p.at("value")).value()) < 1e-12);
      }
    } else {
      FAIL("unknown group " << group);
    }
    ++checked;
  }
  CHECK(checked == 4);
}
