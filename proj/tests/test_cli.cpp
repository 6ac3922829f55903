#include <doctest.h>

#include <fstream>
#include <sstream>

#include "gsi/cli.hpp"
#include "gsi/error.hpp"
#include "gsi/json_io.hpp"

using namespace gsi;
using json_io::json;

namespace {

const std::string kData = std::string(GSI_SOURCE_DIR) + "/tests/data/";

struct Result {
  int code;
  std::string out;
  std::string err;
  json doc() const { return json::parse(out); }
};

Result run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string temp_path(const std::string& name) { return "gsi_test_" + name; }

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  f << text;
}

Rational q(long p, long d) { return ratio(p, d); }

}  // namespace

TEST_CASE("scalars, boxes and models round-trip through JSON") {
  Scalar exact(ComplexRational{q(1, 3), q(-2, 5)});
  CHECK(json_io::to_json(exact) == json::array({"1/3", "-2/5"}));
  CHECK(identical(json_io::scalar_from(json_io::to_json(exact)), exact));
  Scalar root = Scalar::sqrt_of(Rational(2));
  CHECK(json_io::to_json(root) == json{{"sqrt", "2"}});
  CHECK(*json_io::scalar_from(json_io::to_json(root)).square() == 2);
  Scalar approx(std::complex<double>(0.1, -2.5));
  CHECK(json_io::scalar_from(json_io::to_json(approx)).value() == approx.value());
  CHECK(*json_io::scalar_from(json("3/4")).exact_real() == q(3, 4));
  CHECK_THROWS_AS(json_io::scalar_from(json::array({"1", 2})), GsiError);

  Box b{{q(-1, 2), q(3, 7)}, {Rational(0), Rational(1)}};
  CHECK(json_io::box_from(json_io::to_json(b)) == b);

  for (const auto& m : {GroupModel::cyclic(12), GroupModel::integers(2), GroupModel::reals(3),
                        dual_group(GroupModel::integers(1)), dual_group(GroupModel::reals(2))})
    CHECK(json_io::model_from(json_io::to_json(m)) == m);
  CHECK_THROWS_AS(json_io::model_from(json{{"kind", "sphere"}}), GsiError);
}

TEST_CASE("lattices serialize with model, dimension and exact basis") {
  Lattice c = Lattice::cyclic(8, 2);
  json j = json_io::to_json(c);
  CHECK(j["model"] == "finite");
  CHECK(j["modulus"] == "8");
  CHECK(j["dimension"] == 1);
  CHECK(j["basis"] == json::array({json::array({"2"})}));
  CHECK(json_io::lattice_from(j) == c);

  Lattice z2 = Lattice::integer({{2, 1}, {0, 3}});
  CHECK(json_io::lattice_from(json_io::to_json(z2)) == z2);
  Lattice r = Lattice::real({{q(1, 2), Rational(0)}, {Rational(0), Rational(2)}});
  CHECK(json_io::to_json(r)["basis"][0][0] == "1/2");
  CHECK(json_io::lattice_from(json_io::to_json(r)) == r);
  Lattice d = dual_lattice(Lattice::cyclic(8, 2));
  CHECK(json_io::to_json(d)["model"] == "finite-dual");
  CHECK(json_io::lattice_from(json_io::to_json(d)) == d);
  CHECK_THROWS_AS(json_io::lattice_from(json{{"model", "finite"}, {"modulus", "8"}, {"basis", {{"3"}}}}), GsiError);
}

TEST_CASE("systems round-trip: frame operators are unchanged") {
  GsiSystem br = br_system(2, 6);
  GsiSystem back = json_io::system_from(json_io::to_json(br));
  CHECK(back.layers.size() == br.layers.size());
  CHECK(back.tail->ratio == 2);
  CHECK(back.claims.onb);
  CHECK(json_io::to_json(back) == json_io::to_json(br));

  std::ifstream in(kData + "shannon_z8.json");
  json input = json::parse(in);
  std::vector<Lattice> lattices;
  for (const auto& l : input["lattices"]) lattices.push_back(json_io::lattice_from(l));
  GsiSystem s = shannon_generators(GroupModel::cyclic(8), lattices,
                                   FrequencyTiling{{point_set({0, 1, 2, 3}), point_set({4, 5}), point_set({6, 7})}});
  GsiSystem s2 = json_io::system_from(json_io::to_json(s));
  CHECK((frame_operator(s) - frame_operator(s2)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("golden diff is tolerance aware") {
  json a = json::parse(R"({"x": 1.0, "q": "1/3", "s": "pass", "v": [1, 2]})");
  CHECK(json_io::golden_diff(a, a, 0).empty());
  json b = json::parse(R"({"x": 1.0000000001, "q": "1/3", "s": "pass", "v": [1, 2]})");
  CHECK(json_io::golden_diff(a, b, 1e-9).empty());
  CHECK(json_io::golden_diff(a, b, 1e-12) == std::vector<std::string>{"/x"});
  json c = json::parse(R"({"x": 1.0, "q": "1/4", "s": "fail", "v": [1, 2, 3], "extra": true})");
  auto d = json_io::golden_diff(a, c, 1e-9);
  CHECK(d == std::vector<std::string>{"/q", "/s", "/v", "/extra"});
}

TEST_CASE("bandwidth of geometric families") {
  auto r = run_cli({"analyze", "bandwidth", "--family", "geometric", "--ratio", "2"});
  CHECK(r.code == 0);
  CHECK(r.doc()["value"] == "1");
  CHECK(run_cli({"analyze", "bandwidth", "--family", "geometric", "--ratio", "3"}).doc()["value"] == "1/2");
  CHECK(run_cli({"analyze", "bandwidth", "--family", "geometric", "--ratio", "1"}).doc()["infinite"] == true);
  CHECK(run_cli({"analyze", "bandwidth", "--family", "geometric", "--ratio", "2", "--first", "4"}).doc()["value"] ==
        "1/2");
}

TEST_CASE("construct shannon, verify, corrupt, verify again") {
  auto made = run_cli({"construct", "shannon", "--input", kData + "shannon_z8.json"});
  REQUIRE(made.code == 0);
  json system = made.doc();
  CHECK(system["claims"]["onb"] == true);
  CHECK(system["certificate"]["onb"] == true);
  std::string path = temp_path("shannon.json");
  write_file(path, system.dump());
  auto ok = run_cli({"verify", "parseval", "--input", path});
  CHECK(ok.code == 0);
  CHECK(ok.doc()["verdicts"]["parseval"]["verdict"] == "pass");
  CHECK(ok.err.find("parseval") != std::string::npos);  // the table

  // Delete the tile cell 5 of the second layer.
  system["layers"][1]["g"]["values"][5] = json::array({"0", "0"});
  write_file(path, system.dump());
  auto bad = run_cli({"verify", "parseval", "--input", path});
  CHECK(bad.code == 2);
  json w = bad.doc()["verdicts"]["parseval"]["witnesses"];
  REQUIRE(!w.empty());
  CHECK(w[0]["cell"] == json::array({json::array({"5", "6"})}));
  std::remove(path.c_str());
}

TEST_CASE("construct br feeds verify and analyze") {
  std::string path = temp_path("br.json");
  REQUIRE(run_cli({"construct", "br", "--N", "2", "--count", "8", "--output", path}).code == 0);
  std::ifstream in(path);
  json br = json::parse(in);
  CHECK(br["certificate"]["taus"] == json::array({"0", "1", "-1", "3", "-5", "11", "-21", "43"}));
  CHECK(br["certificate"]["disjoint"] == true);
  CHECK(run_cli({"verify", "parseval", "--input", path}).code == 0);
  CHECK(run_cli({"verify", "audit", "--input", path}).code == 0);

  auto t = run_cli({"analyze", "talpha", "--input", path, "--alpha", "0"});
  CHECK(t.code == 0);
  CHECK(t.doc()["op"] == "t_alpha");
  CHECK(t.doc()["tail"]["value"] == json::array({"1/256", "0"}));

  auto ucp = run_cli({"analyze", "ucp", "--input", path});
  CHECK(ucp.doc()["entries"][7]["residual"] == json::array({"1/256", "0"}));
  CHECK(ucp.doc()["status"] == "evidenced");

  auto lic = run_cli({"analyze", "lic", "--input", path});
  CHECK(lic.doc()["partial_sums"][7] == json::array({"8", "0"}));

  auto mean = run_cli({"analyze", "mean", "--input", path, "--exact"});
  CHECK(mean.doc()["exact"] == json::array({"255/256", "0"}));

  // The tail only bounds alpha outside the stored duals.
  auto bounded = run_cli({"analyze", "talpha", "--input", path, "--alpha", "1/3"});
  CHECK(bounded.doc()["layers"].empty());
  CHECK(bounded.doc()["tail"]["exact"] == false);

  REQUIRE(run_cli({"construct", "br", "--N", "3", "--count", "6", "--output", path}).code == 0);
  CHECK(run_cli({"verify", "parseval", "--input", path}).code == 2);
  auto audit = run_cli({"verify", "audit", "--input", path});
  CHECK(audit.code == 2);
  CHECK(audit.doc()["ucp_violation_evidence"] == true);
  std::remove(path.c_str());
}

TEST_CASE("calderon CSV has omega,value rows") {
  auto made = run_cli({"construct", "shannon", "--input", kData + "shannon_z8.json"});
  std::string path = temp_path("z8.json"), csv = temp_path("z8.csv");
  write_file(path, made.out);
  auto r = run_cli({"analyze", "calderon", "--input", path, "--csv", csv});
  CHECK(r.code == 0);
  std::ifstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "omega,value");
  int rows = 0;
  while (std::getline(in, line)) {
    CHECK(line == std::to_string(rows) + ",1");
    ++rows;
  }
  CHECK(rows == 8);
  std::remove(path.c_str());
  std::remove(csv.c_str());
}

TEST_CASE("independence gate from JSON") {
  auto r = run_cli({"verify", "independence", "--input", kData + "gate_235.json"});
  CHECK(r.code == 0);
  CHECK(r.doc()["verdicts"]["independence"]["verdict"] == "pass");
  auto p = run_cli({"verify", "parseval", "--input", kData + "gate_235.json"});
  CHECK(p.code == 0);

  auto made = run_cli({"construct", "shannon", "--input", kData + "shannon_z8.json"});
  std::string path = temp_path("z8_alpha.json");
  write_file(path, made.out);
  auto missing = run_cli({"analyze", "talpha", "--input", path, "--alpha", "3"});
  CHECK(missing.code == 1);
  CHECK(missing.doc()["error"] == "FrequencyNotInAnyDualLattice");
  std::remove(path.c_str());
}

TEST_CASE("refinement and small-bandwidth constructions from the CLI") {
  auto onb = run_cli({"construct", "small-bw-onb", "--N", "2", "--count", "10", "--window", "256"});
  REQUIRE(onb.code == 0);
  CHECK(onb.doc()["certificate"]["disjoint"] == true);
  CHECK(onb.doc()["certificate"]["covered"] == true);

  json input;
  input["system"] = json_io::to_json(br_system(2, 3));
  input["system"]["tail"] = nullptr;
  input["system"]["claims"]["onb"] = false;
  input["chains"] = json::array();
  for (long step : {2, 4, 8}) {
    json chain = json::array();
    chain.push_back(json_io::to_json(Lattice::integer_multiples(step * 2)));
    chain.push_back(json_io::to_json(Lattice::integer_multiples(step * 2)));
    input["chains"].push_back(chain);
  }
  std::string path = temp_path("refine.json");
  write_file(path, input.dump());
  auto r = run_cli({"construct", "refine", "--input", path});
  CHECK(r.code == 1);
  CHECK(r.doc()["error"] == "ChainNotStrict");
  std::remove(path.c_str());

  auto cubes_path = temp_path("cubes.json");
  write_file(cubes_path, R"({"sides": ["1/2", "1/2", "1/2", "1/2", "1/4"], "target": [["0", "1"]]})");
  auto c = run_cli({"construct", "cubes", "--input", cubes_path});
  CHECK(c.code == 0);
  CHECK(c.doc()["cover"]["covered"] == true);
  std::remove(cubes_path.c_str());
}

TEST_CASE("usage errors exit 64") {
  CHECK(run_cli({}).code == 64);
  CHECK(run_cli({"frobnicate"}).code == 64);
  CHECK(run_cli({"construct", "spiral"}).code == 64);
  CHECK(run_cli({"verify", "parseval"}).code == 64);
  CHECK(run_cli({"construct", "br", "--window", "8"}).code == 64);
  CHECK(run_cli({"verify", "parseval", "--tolerance", "-1", "--input", "x"}).code == 64);
  CHECK(run_cli({"analyze", "bandwidth", "--family", "harmonic", "--ratio", "2"}).code == 64);
  CHECK(run_cli({"--help"}).code == 0);
}

TEST_CASE("outputs are byte identical across runs") {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"repro", "example-3.11", "--N", "2"},
           {"repro", "example-4.6"},
           {"construct", "br", "--N", "3", "--count", "10"},
           {"construct", "shannon", "--input", kData + "shannon_z8.json"}}) {
    auto a = run_cli(args), b = run_cli(args);
    CHECK(a.out == b.out);
    CHECK(!a.out.empty());
  }
}

TEST_CASE("repro golden comparison detects a changed value") {
  std::ifstream in(std::string(GSI_SOURCE_DIR) + "/goldens/example-5.8.json");
  json golden = json::parse(in);
  auto path = temp_path("golden.json");
  write_file(path, json_io::dump(golden));
  CHECK(run_cli({"repro", "example-5.8", "--golden", path}).code == 0);

  golden["label_extra"] = 1;
  write_file(path, json_io::dump(golden));
  auto r = run_cli({"repro", "example-5.8", "--golden", path});
  CHECK(r.code == 2);
  CHECK(r.err.find("/label_extra") != std::string::npos);

  golden.erase("label_extra");
  golden["dyadic_bandwidth"]["prefix"] = "1/3";
  write_file(path, json_io::dump(golden));
  auto v = run_cli({"repro", "example-5.8", "--golden", path});
  CHECK(v.code == 2);
  CHECK(v.err.find("/dyadic_bandwidth/prefix") != std::string::npos);
  std::remove(path.c_str());
}
