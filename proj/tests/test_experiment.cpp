#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "squaremap/experiment.hpp"

using namespace squaremap;
using namespace squaremap::experiment;

namespace {

Json minimal_functional() {
  return Json::parse(R"({
    "command": "functional",
    "domain": [{"shape": "square", "center": [0, 0], "side": 1}],
    "maps": [{"name": "id", "type": "identity"}]
  })");
}

Json disk_with(const std::string& command, const Json& map) {
  Json j;
  j["command"] = command;
  j["domain"] = Json::parse(R"([{"shape": "disk", "center": [0, 0], "radius": 1}])");
  j["maps"] = Json::array({map});
  return j;
}

std::string error_of(const Json& doc) {
  try {
    parse_json(doc);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("squaremap_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("minimal spec gets the default mesh") {
  const auto s = parse_json(minimal_functional());
  CHECK(s.command == Command::functional);
  CHECK(s.mesh == 1e-3);
  CHECK(s.domain.size() == 1);
  CHECK(s.map_name == "id");
}

TEST_CASE("overlapping disks are rejected with both indices") {
  const auto doc = Json::parse(R"({
    "command": "functional",
    "domain": [{"shape": "disk", "center": [0, 0], "radius": 1},
               {"shape": "disk", "center": [1, 0], "radius": 1}],
    "maps": [{"name": "id", "type": "identity"}]
  })");
  const std::string msg = error_of(doc);
  REQUIRE_FALSE(msg.empty());
  CHECK(msg.find('1') != std::string::npos);
  CHECK(msg.find('2') != std::string::npos);
}

TEST_CASE("modulus-check without r_schedule gets the default schedule") {
  auto doc = minimal_functional();
  doc["command"] = "modulus-check";
  const auto s = parse_json(doc);
  CHECK(s.r_schedule == std::vector<double>{1e2, 1e3, 1e4});
}

TEST_CASE("errors point at the offending field") {
  auto doc = minimal_functional();
  doc["domain"][0]["shape"] = "hexagon";
  CHECK(error_of(doc).rfind("/domain/0/shape", 0) == 0);

  doc = minimal_functional();
  doc["maps"][0]["type"] = "mobius";
  CHECK(error_of(doc).rfind("/maps/0/type", 0) == 0);

  doc = minimal_functional();
  doc["mesh"] = -1;
  CHECK(error_of(doc).rfind("/mesh", 0) == 0);

  doc = minimal_functional();
  doc["domain"][0]["colour"] = "red";
  CHECK(error_of(doc).find("colour") != std::string::npos);

  doc = minimal_functional();
  doc["map"] = "missing";
  CHECK(error_of(doc).rfind("/map", 0) == 0);

  doc = minimal_functional();
  doc.erase("maps");
  CHECK_FALSE(error_of(doc).empty());

  doc = minimal_functional();
  doc["command"] = "verify-extremal";
  doc["domain"][0] = Json::parse(R"({"shape": "disk", "center": [0, 0], "radius": 1})");
  CHECK(error_of(doc).rfind("/domain", 0) == 0);
}

TEST_CASE("map records: names, nesting and cycles") {
  auto doc = minimal_functional();
  doc["domain"] = Json::parse(R"([{"shape": "disk", "center": [0, 0], "radius": 1}])");
  doc["maps"] = Json::parse(R"([
    {"name": "comp", "type": "composition", "outer": "plus", "inner": {"type": "inverse", "of": "minus"}},
    {"name": "plus", "type": "joukowski", "sign": 1, "scale": 1},
    {"name": "minus", "type": "multipole", "poles": [{"location": [0, 0], "coefficients": [[-1, 0]]}]}
  ])");
  const auto s = parse_json(doc);
  CHECK(s.map_name == "comp");
  CHECK(std::abs(laurent::coefficient_a1(s.map()).a1 - 2.0) < 1e-15);

  doc["maps"] = Json::parse(R"([
    {"name": "a", "type": "composition", "outer": "b", "inner": "b"},
    {"name": "b", "type": "inverse", "of": "a"}
  ])");
  CHECK(error_of(doc).find("refers to itself") != std::string::npos);
}

TEST_CASE("the echo round-trips field by field") {
  const auto doc = Json::parse(R"({
    "command": "uniformize",
    "domain": [{"shape": "square", "center": [0, 0], "side": 1},
               {"shape": "point", "location": [3, 0]},
               {"shape": "polygon", "vertices": [[-3, 0], [-2, 0], [-2.5, 1]]}],
    "maps": [{"name": "j", "type": "joukowski", "sign": -1, "scale": 0.5, "center": [0.1, 0]}],
    "mesh": 0.002, "seed": 9, "alphas": [0, 1.5],
    "optimizer": {"order": 3, "restarts": 2, "initial_step": 0.05, "step_decay": 0.5}
  })");
  const auto a = parse_json(doc);
  const auto b = parse_json(a.to_json());
  CHECK(b.to_json() == a.to_json());
  CHECK(b.mesh == 0.002);
  CHECK(b.seed == 9);
  CHECK(b.alphas == a.alphas);
  CHECK(b.optimizer.order == 3);
  CHECK(b.optimizer.step_decay == 0.5);
  CHECK(b.optimizer.mesh == 0.002);
  CHECK(b.domain.size() == 3);
  CHECK(b.r_schedule == a.r_schedule);
}

TEST_CASE("parse_spec fills the subcommand and rejects a mismatch") {
  const auto dir = scratch_dir("parse");
  auto doc = minimal_functional();
  doc.erase("command");
  {
    std::ofstream(dir / "a.json") << doc.dump();
  }
  CHECK(parse_spec(dir / "a.json", Command::functional).command == Command::functional);
  doc["command"] = "functional";
  {
    std::ofstream(dir / "b.json") << doc.dump();
  }
  CHECK_THROWS_AS(parse_spec(dir / "b.json", Command::modulus_check), SpecError);
  CHECK_THROWS_AS(parse_spec(dir / "missing.json"), SpecError);
  {
    std::ofstream(dir / "c.json") << "{ not json";
  }
  CHECK_THROWS_AS(parse_spec(dir / "c.json"), SpecError);
}

TEST_CASE("overrides") {
  auto s = parse_json(minimal_functional());
  apply(s, Overrides{7, 2e-3, false});
  CHECK(s.seed == 7);
  CHECK(s.mesh == 2e-3);
  CHECK(s.optimizer.mesh == 2e-3);
  CHECK_THROWS_AS(apply(s, Overrides{std::nullopt, std::nullopt, true}), SpecError);
}

TEST_CASE("functional run on z + 1/z reports S = 2 pi") {
  const auto s = parse_json(disk_with(
      "functional", Json::parse(R"({"name": "j", "type": "joukowski", "sign": 1, "scale": 1})")));
  const auto rep = run(s);
  CHECK(std::abs(rep.document["payload"]["S"].get<double>() - kTwoPi) < 1e-3);
  REQUIRE(rep.tables.count("functional.csv") == 1);
  const std::string& csv = rep.tables.at("functional.csv");
  CHECK(csv.rfind("j,A_j,V_j,H_j,square_defect,a1_re,a1_im,S", 0) == 0);
  CHECK_THROWS_AS(emit_plot_data(rep, scratch_dir("fplot")), SpecError);
}

TEST_CASE("area-asymptotics on z - 1/z tends to -2 pi") {
  auto doc = disk_with("area-asymptotics",
                       Json::parse(R"({"name": "m", "type": "multipole",
                                       "poles": [{"location": [0, 0], "coefficients": [[-1, 0]]}]})"));
  const auto rep = run(parse_json(doc));
  const auto& rows = rep.document["payload"]["rows"];
  REQUIRE(rows.size() == 3);
  double prev = 1e300;
  for (const auto& row : rows) {
    const double gap = std::abs(row["A_minus_4lr"].get<double>() + kTwoPi);
    CHECK(gap < prev);
    prev = gap;
  }
  const auto files = emit_plot_data(rep, scratch_dir("aplot"));
  REQUIRE(files.size() == 1);
  CHECK(files[0].filename() == "area.dat");
}

TEST_CASE("modulus-check plot columns") {
  auto doc = minimal_functional();
  doc["command"] = "modulus-check";
  doc["r_schedule"] = {100, 1000};
  const auto rep = run(parse_json(doc));
  REQUIRE(rep.plot_data.count("modulus.dat") == 1);
  const std::string& dat = rep.plot_data.at("modulus.dat");
  CHECK(dat.find("r") != std::string::npos);
  CHECK(dat.find("A_minus_4lr") != std::string::npos);
  CHECK(dat.find("rho_sq_minus_4lr") != std::string::npos);
  CHECK(dat.find("slack") != std::string::npos);
}

TEST_CASE("verify-extremal passes and is deterministic") {
  auto doc = minimal_functional();
  doc["command"] = "verify-extremal";
  doc["samples"] = 20;
  doc.erase("maps");
  const auto s = parse_json(doc);
  const auto a = run(s);
  const auto b = run(s);
  CHECK_FALSE(a.property_violated);
  CHECK(a.document["payload"]["violations"].get<int>() == 0);
  CHECK(a.tables == b.tables);
  CHECK(a.plot_data == b.plot_data);
  CHECK(a.document["payload"] == b.document["payload"]);
}

TEST_CASE("uniformize report carries trace columns and writes files") {
  auto doc = minimal_functional();
  doc["command"] = "uniformize";
  doc.erase("maps");
  doc["optimizer"] = {{"restarts", 2}, {"max_evaluations", 300}};
  const auto rep = run(parse_json(doc));
  REQUIRE(rep.plot_data.count("trace.dat") == 1);
  CHECK(rep.plot_data.at("trace.dat").find("max_defect") != std::string::npos);
  CHECK(rep.tables.at("trace.csv").rfind("iter,restart,S,penalty,feasible,max_defect", 0) == 0);

  const auto dir = scratch_dir("write");
  const auto files = write_report(rep, dir);
  CHECK(std::filesystem::exists(dir / "report.json"));
  std::ifstream in(dir / "report.json");
  const Json back = Json::parse(in);
  CHECK(back["meta"]["command"] == "uniformize");
  CHECK(back.contains("echo"));
  // The minimizer record replays as a map record.
  Json replay = back["echo"];
  replay["command"] = "functional";
  replay["maps"] = Json::array({back["payload"]["map"]});
  replay.erase("optimizer");
  CHECK_NOTHROW(parse_json(replay));
}

TEST_CASE("number formatting") {
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(std::nan("")) == "nan");
  CHECK(format_number(-INFINITY) == "-inf");
  CHECK(format_number(2.0) == "2");
}
