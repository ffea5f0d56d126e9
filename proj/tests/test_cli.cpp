#include <catch_amalgamated.hpp>

#include <filesystem>
#include <sstream>

#include <unistd.h>

#include "qam/cli/commands.hpp"

using namespace qam;
using namespace qam::cli;

namespace {
json farey_doc() {
  return json::parse(R"({"g": 0.0386, "resonances": [[3, 2], [28, 19], [20, 13]],
                         "mediants": [[[11, 10], [12, 11]], [[3, 2], [2, 1]]], "mediant_steps": 3})");
}

json simulate_doc() {
  return json::parse(R"({"system": {"k": 1.0, "tau_over_2pi": 1.455, "g": 0.0386, "p": 3, "q": 2, "beta": 0.1672},
                         "initial": {"kind": "band_packet", "band": 0, "orbit": [1, 1], "ladder_size": 256},
                         "kicks": 20, "record": [0, 20], "momentum_range": [-30, 30],
                         "husimi": {"vartheta_points": 16, "I_min": -1, "I_max": 1, "I_points": 8}})");
}

std::string temp_dir(const std::string& tag) {
  auto d = std::filesystem::temp_directory_path() / ("qam_test_" + tag + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(d);
  return d.string();
}
}  // namespace

TEST_CASE("configs parse and reject unknown keys", "[cli]") {
  const auto c = parse_config(simulate_doc(), Experiment::simulate);
  CHECK(c.system.p == 3);
  CHECK(c.initial->kind == InitialKind::band_packet);
  CHECK(c.initial->orbit == std::array<long, 2>{1, 1});
  CHECK(c.record == std::vector<long>{0, 20});
  CHECK(c.husimi->I_points == 8);

  auto bad = simulate_doc();
  bad["sytem"] = 1;
  CHECK_THROWS_AS(parse_config(bad, Experiment::simulate), ConfigError);
  bad = simulate_doc();
  bad["system"]["kk"] = 1;
  CHECK_THROWS_AS(parse_config(bad, Experiment::simulate), ConfigError);
  bad = simulate_doc();
  bad["initial"]["kind"] = "squeezed";
  CHECK_THROWS_AS(parse_config(bad, Experiment::simulate), ConfigError);
  bad = simulate_doc();
  bad["system"]["q"] = 3;
  bad["system"]["p"] = 3;
  CHECK_THROWS_AS(parse_config(bad, Experiment::simulate), ConfigError);
  bad = simulate_doc();
  bad["record"] = json::array({30});
  CHECK_THROWS_AS(parse_config(bad, Experiment::simulate), ConfigError);
  bad = simulate_doc();
  bad["experiment"] = "farey";
  CHECK_THROWS_AS(parse_config(bad, Experiment::simulate), ConfigError);
  CHECK_THROWS_AS(read_json_text("{not json"), ConfigError);
  CHECK_THROWS_AS(parse_config(farey_doc(), Experiment::bands), ConfigError);  // no system block
}

TEST_CASE("grids accept lists, stop and step forms", "[cli]") {
  CHECK(read_grid(json::parse("[1, 2.5]"), "g") == std::vector<double>{1.0, 2.5});
  const auto a = read_grid(json::parse(R"({"start": 1.45, "stop": 1.46, "count": 3})"), "g");
  REQUIRE(a.size() == 3);
  CHECK(a[2] == Catch::Approx(1.46).epsilon(1e-15));
  const auto b = read_grid(json::parse(R"({"start": 0, "step": 0.25, "count": 4})"), "g");
  CHECK(b.back() == 0.75);
  CHECK_THROWS_AS(read_grid(json::parse(R"({"start": 0, "step": 1, "stop": 2, "count": 3})"), "g"), ConfigError);
  CHECK_THROWS_AS(read_grid(json::parse("[]"), "g"), ConfigError);
}

TEST_CASE("binary grids round-trip", "[cli]") {
  qkp::Grid2D g;
  g.rows = 3;
  g.cols = 2;
  g.x0 = -1.5;
  g.dx = 0.25;
  g.y0 = 7.0;
  g.dy = -0.125;
  g.data = {1.0, -2.0, 3.5e-300, 1e300, 0.1, std::nextafter(1.0, 2.0)};
  const json h = {{"experiment", "husimi"}, {"kick", 5}};
  const auto bytes = encode_grid(g, h);
  CHECK(bytes.compare(0, 8, "QAMGRID1") == 0);
  CHECK(bytes.size() == 16 + h.dump().size() + 48 + 6 * 8);
  const auto d = decode_grid(bytes);
  CHECK(d.header == h);
  CHECK(d.grid.rows == 3);
  CHECK(d.grid.cols == 2);
  CHECK(d.grid.x0 == g.x0);
  CHECK(d.grid.dy == g.dy);
  CHECK(d.grid.data == g.data);
  CHECK_THROWS_AS(decode_grid(bytes.substr(0, bytes.size() - 1)), IoError);
  CHECK_THROWS_AS(decode_grid("NOTAGRID" + bytes.substr(8)), IoError);
}

TEST_CASE("CSV header layout", "[cli]") {
  FileHeader h{"farey", 7, R"({"g":1})", {{"kick", "3"}}};
  CsvWriter w(h, {"a", "b"});
  w.row(std::vector<double>{0.1, 2.0});
  CHECK(w.str() ==
        "# qam-format 1\n# code-version 0.1.0\n# experiment farey\n# seed 7\n# config {\"g\":1}\n# kick 3\na,b\n"
        "0.10000000000000001,2\n");
  CHECK_THROWS_AS(w.row(std::vector<double>{1.0}), InvalidArgument);
  CHECK(std::stod(fmt_double(0.1)) == 0.1);
}

TEST_CASE("farey run writes exact fractions", "[cli]") {
  const auto dir = temp_dir("farey");
  const auto c = parse_config(farey_doc(), Experiment::farey);
  const auto files = run(c, {dir, 1, nullptr});
  REQUIRE(files.size() == 2);
  const auto res = read_file(files[0]);
  CHECK(res.find("3,2,1.0913892") != std::string::npos);
  CHECK(res.find("1/1 11/10 12/11") != std::string::npos);
  const auto med = read_file(files[1]);
  CHECK(med.find("11/10,12/11,1,23/21") != std::string::npos);
  CHECK(med.find("3/2,2/1,3,11/7") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("runs are byte-identical across thread counts", "[cli]") {
  const auto c = parse_config(simulate_doc(), Experiment::simulate);
  const auto d1 = temp_dir("sim1"), d2 = temp_dir("sim2");
  std::ostringstream log;
  const auto f1 = run(c, {d1, 1, &log});
  const auto f2 = run(c, {d2, 4, nullptr});
  REQUIRE(f1.size() == 4);  // histogram and Husimi at two times
  REQUIRE(f2.size() == f1.size());
  for (std::size_t i = 0; i < f1.size(); ++i) {
    INFO(f1[i]);
    CHECK(read_file(f1[i]) == read_file(f2[i]));
  }
  CHECK(log.str().find("launch point") != std::string::npos);
  const auto g = decode_grid(read_file(d1 + "/husimi_t20.qgrid"));
  CHECK(g.grid.rows == 8);
  CHECK(g.grid.cols == 16);
  CHECK(g.header["config"]["kicks"] == 20);

  auto ens = json::parse(R"({"system": {"k": 1.0, "tau_over_2pi": 1.46, "g": 0.0386, "p": 3, "q": 2},
                             "initial": {"kind": "gaussian_ensemble", "count": 6, "ladder_size": 256},
                             "kicks": 10, "seed": 3, "momentum_range": [-40, 40]})");
  const auto ce = parse_config(ens, Experiment::simulate);
  const auto e1 = run(ce, {d1, 1, nullptr});
  const auto e2 = run(ce, {d2, 3, nullptr});
  CHECK(read_file(e1[0]) == read_file(e2[0]));
  std::filesystem::remove_all(d1);
  std::filesystem::remove_all(d2);
}

TEST_CASE("unwritable output directory is an I/O error", "[cli]") {
  const auto c = parse_config(farey_doc(), Experiment::farey);
  const auto dir = temp_dir("blocked");
  write_file(dir, "x");  // a file where the directory should go
  CHECK_THROWS_AS(run(c, {dir, 1, nullptr}), IoError);
  std::filesystem::remove(dir);
}
