#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gaplab/experiments.hpp"

using namespace gaplab;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  REQUIRE(is.good());
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

RunConfig tiny_cfg(const std::string& out) {
  RunConfig cfg;
  cfg.qmax = 5;
  cfg.kgrid1 = cfg.kgrid2 = 16;
  cfg.out_dir = out;
  cfg.threads = 2;
  return cfg;
}

}  // namespace

TEST_CASE("config parser: sections, defaults, repeated keys") {
  RunConfig cfg = parse_config_text(R"(
# comment
[run]
backend = lattice
qmax = 7
threads = 3
[spectral]
delta_gap = 5e-3
[potential]
kind = fourier-list
coeff = 0 1 3.0
coeff = 2 0 -0.5
[field]
mean = 1.5
harmonic = 1 0 0.25 sin
[tracks]
fluxes = 1/6 1/5 1/4
band = 1
)");
  CHECK(cfg.qmax == 7);
  CHECK(cfg.threads == 3);
  CHECK(cfg.delta_gap == 5e-3);
  REQUIRE(cfg.potential.coefficients.size() == 2);
  CHECK(cfg.potential.coefficients[1].amplitude == -0.5);
  CHECK(cfg.field.mean == 1.5);
  REQUIRE(cfg.field.harmonics.size() == 1);
  CHECK(cfg.field.harmonics[0].use_sin);
  REQUIRE(cfg.track_fluxes.size() == 3);
  CHECK(cfg.track_fluxes[0] == RationalFlux(1, 6));
  CHECK(cfg.track_band == 1);
}

TEST_CASE("config parser rejects unknown keys and malformed values") {
  CHECK_THROWS_WITH_AS(parse_config_text("[run]\nfrobnicate = 1\n"),
                       doctest::Contains("unknown key"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config_text("[nonsense]\na = 1\n"),
                       doctest::Contains("unknown section"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("[run]\nqmax = seven\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("[run]\nqmax\n"), std::invalid_argument);
}

TEST_CASE("butterfly sweep: labels satisfy the Diophantine identity and files are deterministic") {
  RunConfig cfg = tiny_cfg("test_out_butterfly");
  std::ostringstream log;
  REQUIRE(run_butterfly(cfg, log) == 0);

  for (const char* f : {"butterfly.csv", "labels.csv", "butterfly.svg",
                        "wannier_diagram.svg", "manifest.json"})
    CHECK(std::filesystem::exists(std::filesystem::path(cfg.out_dir) / f));

  std::string csv1 = slurp(cfg.out_dir + "/butterfly.csv");
  std::string labels1 = slurp(cfg.out_dir + "/labels.csv");
  std::string svg1 = slurp(cfg.out_dir + "/butterfly.svg");
  std::string diagram1 = slurp(cfg.out_dir + "/wannier_diagram.svg");

  // rerun with an identical configuration: byte-identical data files
  REQUIRE(run_butterfly(cfg, log) == 0);
  CHECK(slurp(cfg.out_dir + "/butterfly.csv") == csv1);
  CHECK(slurp(cfg.out_dir + "/labels.csv") == labels1);
  CHECK(slurp(cfg.out_dir + "/butterfly.svg") == svg1);
  CHECK(slurp(cfg.out_dir + "/wannier_diagram.svg") == diagram1);

  // spot-check the label rows
  ButterflyData data = compute_butterfly(cfg);
  CHECK(data.failures.empty());
  int gaps = 0;
  for (const auto& r : data.rows) {
    Rational qI = Rational(r.flux.q) * r.ids;
    CHECK(qI.is_integer());
    CHECK((qI - Rational(r.c1 * r.flux.p)).is_integer());
    if (r.has_upper_gap) ++gaps;
  }
  CHECK(gaps > 0);
  // one colored polygon per gap row
  std::size_t rects = 0, pos = 0;
  while ((pos = svg1.find("class=\"gap\"", pos)) != std::string::npos) {
    ++rects;
    pos += 5;
  }
  CHECK(rects == static_cast<std::size_t>(gaps));

  std::filesystem::remove_all(cfg.out_dir);
}

TEST_CASE("butterfly with qmax=1 has no colored gaps") {
  RunConfig cfg = tiny_cfg("test_out_q1");
  cfg.qmax = 1;
  std::ostringstream log;
  REQUIRE(run_butterfly(cfg, log) == 0);
  ButterflyData data = compute_butterfly(cfg);
  CHECK(data.fluxes.size() == 2);  // 0/1 and 1/1
  for (const auto& r : data.rows) CHECK_FALSE(r.has_upper_gap);
  std::filesystem::remove_all(cfg.out_dir);
}

TEST_CASE("empty dataset yields an axes-only SVG") {
  ButterflyData empty;
  std::string svg = butterfly_svg(empty);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("<line") != std::string::npos);  // axes
  CHECK(svg.find("class=\"gap\"") == std::string::npos);  // no gap polygons
  std::string diagram = wannier_diagram_svg(empty);
  CHECK(diagram.find("<circle") == std::string::npos);
}

TEST_CASE("streda experiment passes on the default track") {
  RunConfig cfg = tiny_cfg("test_out_streda");
  std::ostringstream log;
  CHECK(run_streda(cfg, log) == 0);
  std::string rep = slurp(cfg.out_dir + "/streda.json");
  CHECK(rep.find("\"pass\": true") != std::string::npos);
  CHECK(rep.find("\"c1\": 1") != std::string::npos);
  std::filesystem::remove_all(cfg.out_dir);
}

TEST_CASE("normgap reports the not-applicable branch for a c1 = 0 island") {
  RunConfig cfg = tiny_cfg("test_out_ng0");
  // the all-bands island at 1/3 is trivial: lump everything together
  cfg.delta_gap = 100.0;
  cfg.track_fluxes = {{1, 3}};
  std::ostringstream log;
  CHECK(run_normgap(cfg, log) == 0);
  std::string rep = slurp(cfg.out_dir + "/normgap.json");
  CHECK(rep.find("not-applicable") != std::string::npos);
  std::filesystem::remove_all(cfg.out_dir);
}

TEST_CASE("band structure CSV export carries one row per (k, band)") {
  BandStructureOptions opts;
  opts.kgrid1 = opts.kgrid2 = 8;
  BandStructure bs = band_structure(RationalFlux(1, 2), {}, Backend::Lattice, opts);
  write_bandstructure_csv(bs, "bs_export_test.csv");
  std::string csv = slurp("bs_export_test.csv");
  std::size_t rows = std::count(csv.begin(), csv.end(), '\n');
  CHECK(rows == 1 + 8 * 8 * 2);
  std::remove("bs_export_test.csv");
}

TEST_CASE("CLI runs end to end with exit codes 0 and 2") {
  namespace fs = std::filesystem;
  if (!fs::exists("../gaplab") && !fs::exists("./gaplab")) return;  // run from build tree
  std::string exe = fs::exists("../gaplab") ? "../gaplab" : "./gaplab";

  std::ofstream cfg("cli_test.cfg");
  cfg << "[run]\nqmax = 4\n[spectral]\nkgrid1 = 16\nkgrid2 = 16\n";
  cfg.close();
  CHECK(std::system((exe + " butterfly --config cli_test.cfg --out cli_test_out"
                           " > /dev/null 2>&1").c_str()) == 0);
  CHECK(fs::exists("cli_test_out/labels.csv"));
  int bad = std::system((exe + " frobnicate > /dev/null 2>&1").c_str());
  CHECK(WEXITSTATUS(bad) == 2);
  int nocfg = std::system((exe + " butterfly --config missing.cfg > /dev/null 2>&1").c_str());
  CHECK(WEXITSTATUS(nocfg) != 0);
  fs::remove("cli_test.cfg");
  fs::remove_all("cli_test_out");
}
