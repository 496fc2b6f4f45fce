#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bandgap_qed/cli.hpp"
#include "bandgap_qed/errors.hpp"
#include "doctest.h"

using namespace bgq;
using namespace bgq::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("bgq_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + BGQ_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> data_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line[0] != '#') out.push_back(line);
  }
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<const char*> argv_of(const std::vector<std::string>& args) {
  std::vector<const char*> v{"bandgap-qed"};
  for (const auto& a : args) v.push_back(a.c_str());
  return v;
}

}  // namespace

TEST_CASE("defaults match the isotropic figure set") {
  const ExperimentConfig cfg;
  CHECK(cfg.deltas == std::vector<double>{-10.0, -3.5, -1.0, 0.0, 1.0, 10.0});
  CHECK(cfg.beta == 1.0);
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("configuration round trip") {
  ExperimentConfig cfg;
  cfg.command = "spectrum";
  cfg.n = 2.718281828459045;
  cfg.b = 0.1 + 0.2;
  cfg.deltas = {-0.1, 1.0 / 3.0, 7e-300};
  cfg.method = "all";
  cfg.svg = true;
  cfg.tol.quad_tol = 3e-9;
  cfg.tol.max_iter = 77;
  cfg.talbot_tol = 1.234567890123e-7;
  cfg.out = "some dir/x";
  const ExperimentConfig back = parse_config(serialize(cfg));
  CHECK(serialize(back) == serialize(cfg));
  CHECK(back.n == cfg.n);
  CHECK(*back.b == *cfg.b);
  CHECK(back.deltas == cfg.deltas);
  CHECK(back.tol.max_iter == 77);
  CHECK(back.out == cfg.out);

  ExperimentConfig automatic;
  CHECK_FALSE(parse_config(serialize(automatic)).b.has_value());
}

TEST_CASE("configuration errors") {
  ExperimentConfig cfg;
  CHECK_THROWS_AS(set_key(cfg, "nonsense", "1"), ConfigError);
  CHECK_THROWS_AS(set_key(cfg, "n", "abc"), ConfigError);
  CHECK_THROWS_AS(set_key(cfg, "bands", "2.5"), ConfigError);
  CHECK_THROWS_AS(set_key(cfg, "svg", "maybe"), ConfigError);
  CHECK_THROWS_AS(parse_config("n 3\n"), ConfigError);
  CHECK(parse_config("# comment\n\n n = 2 \n").n == 2.0);

  cfg = {};
  cfg.method = "magic";
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.dt = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.deltas.clear();
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("argument parsing") {
  const std::vector<std::string> args{"decay", "--delta", "-1,2.5", "--method", "volterra", "--tol", "quad_tol=1e-6"};
  const auto v = argv_of(args);
  const ExperimentConfig cfg = parse_args(static_cast<int>(v.size()), v.data());
  CHECK(cfg.command == "decay");
  CHECK(cfg.deltas == std::vector<double>{-1.0, 2.5});
  CHECK(cfg.method == "volterra");
  CHECK(cfg.tol.quad_tol == 1e-6);

  const fs::path dir = scratch("args");
  const fs::path file = dir / "run.cfg";
  std::ofstream(file) << "n=4\nmethod=talbot\n";
  const std::vector<std::string> with_file{"bands", "--config", file.string(), "--n", "2"};
  const auto w = argv_of(with_file);
  const ExperimentConfig merged = parse_args(static_cast<int>(w.size()), w.data());
  CHECK(merged.command == "bands");
  CHECK(merged.n == 2.0);
  CHECK(merged.method == "talbot");

  const std::vector<std::string> fig{"figure", "pop-isotropic"};
  const auto f = argv_of(fig);
  CHECK(parse_args(static_cast<int>(f.size()), f.data()).figure == "pop-isotropic");

  const std::vector<std::string> bad{"decay", "--bogus"};
  const auto b = argv_of(bad);
  CHECK_THROWS_AS(parse_args(static_cast<int>(b.size()), b.data()), ConfigError);
  const std::vector<std::string> none{};
  const auto n = argv_of(none);
  CHECK_THROWS_AS(parse_args(static_cast<int>(n.size()), n.data()), ConfigError);
  const std::vector<std::string> help{"--help"};
  const auto h = argv_of(help);
  CHECK_THROWS_AS(parse_args(static_cast<int>(h.size()), h.data()), HelpRequested);
}

TEST_CASE("output helpers") {
  CHECK(format_number(0.0) == "0");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(format_number(-2.5e-7) == "-2.5e-07");

  CsvWriter csv("config: a=1", {"x", "y"});
  csv.row({"1", "2"});
  CHECK(csv.text() == "# config: a=1\nx,y\n1,2\n");
  CHECK_THROWS(csv.row({"1"}));

  const std::string svg = render_svg({"t", "x", "y", false}, {{"s", {0.0, 1.0}, {1.0, 0.5}}});
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("<polyline") != std::string::npos);
  CHECK(svg.find("<!-- series s:") != std::string::npos);
}

TEST_CASE("binary: exit codes") {
  const fs::path dir = scratch("exit");
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("") == 2);
  CHECK(run_cli("decay --beta -1 --out " + dir.string()) == 2);
  CHECK(run_cli("decay --tmax abc --out " + dir.string()) == 2);
  // The asymptotic form refuses early times: a numerical failure.
  CHECK(run_cli("decay --method asymptotic --delta 0 --tmax 5 --out " + dir.string()) == 3);
}

TEST_CASE("binary: bands and gaps") {
  const fs::path dir = scratch("bands");
  REQUIRE(run_cli("bands --n 1 --a 0.25 --b 0.5 --bands 1 --k-points 33 --out " + dir.string()) == 0);
  const std::string text = slurp(dir / "bands.csv");
  CHECK(text.rfind("# config: ", 0) == 0);
  const auto lines = data_lines(text);
  REQUIRE(lines.size() == 34);
  CHECK(lines[0] == "k_over_piL,band_index,omega_L_over_2pic");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split(lines[i], ',');
    // Vacuum: omega L / 2 pi c = (k L / pi) / 2.
    CHECK(std::stod(cells[2]) == doctest::Approx(std::stod(cells[0]) / 2.0).epsilon(1e-10));
  }

  REQUIRE(run_cli("gaps --n 3 --a 0.25 --out " + dir.string()) == 0);
  const auto gaps = data_lines(slurp(dir / "gaps.csv"));
  CHECK(gaps[0] == "gap_index,omega_low,omega_high,midgap,gap_midgap_ratio");
  CHECK(gaps.size() > 1);
}

TEST_CASE("binary: decay with every method") {
  const fs::path dir = scratch("decay");
  REQUIRE(run_cli("decay --delta 0 --method all --tmax 10 --out " + dir.string()) == 0);
  const std::string text = slurp(dir / "decay_delta_0.csv");
  const auto lines = data_lines(text);
  CHECK(lines[0] == "beta_t,re_a2,im_a2,population,method");
  const auto pos = text.find("max_pairwise_amplitude_difference=");
  REQUIRE(pos != std::string::npos);
  const double worst = std::stod(text.substr(pos + std::string("max_pairwise_amplitude_difference=").size()));
  CHECK(worst <= 1e-3);
  for (const char* tag : {",analytic", ",volterra", ",talbot"}) CHECK(text.find(tag) != std::string::npos);
}

TEST_CASE("binary: determinism and spectrum output") {
  // The output directory is part of the echoed config, so both runs share it.
  const fs::path a = scratch("det");
  const std::string args = "spectrum --delta 0,1 --dk-points 101 --svg --out " + a.string();
  const std::vector<std::string> files{"spectrum_delta_0.csv", "spectrum_delta_1.csv"};
  REQUIRE(run_cli(args) == 0);
  std::vector<std::string> first;
  for (const auto& f : files) first.push_back(slurp(a / f));
  REQUIRE(run_cli(args) == 0);
  for (std::size_t i = 0; i < files.size(); ++i) {
    const std::string text = slurp(a / files[i]);
    CHECK(!text.empty());
    CHECK(text == first[i]);
    CHECK(data_lines(text)[0] == "delta_k_over_beta,density");
    CHECK(text.find("# bound_weight=") != std::string::npos);
  }
  CHECK(fs::exists(a / "spectrum_delta_0.svg"));
}

TEST_CASE("binary: population figure") {
  const fs::path dir = scratch("figure");
  REQUIRE(run_cli("figure pop-isotropic --out " + dir.string()) == 0);
  const auto lines = data_lines(slurp(dir / "pop_isotropic.csv"));
  const auto header = split(lines[0], ',');
  REQUIRE(header.size() == 7);
  CHECK(header[0] == "beta_t");
  CHECK(header[1] == "P_delta_-10.0");
  CHECK(header[6] == "P_delta_10.0");
  const auto first = split(lines[1], ',');
  for (std::size_t j = 1; j < first.size(); ++j) CHECK(std::stod(first[j]) == 1.0);
  const auto last = split(lines.back(), ',');
  for (std::size_t j = 2; j < last.size(); ++j) CHECK(std::stod(last[j - 1]) >= std::stod(last[j]));
  CHECK(fs::exists(dir / "pop_isotropic.svg"));
}
