#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gaam/harness.hpp"
#include "test_util.hpp"

using namespace gaam;
using namespace testutil;

namespace {

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() / ("gaam_test_" + tag);
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string str() const { return path.string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig small_config() {
  RunConfig cfg;
  cfg.model.alpha = 2;
  cfg.model.beta = 2;
  cfg.model.gamma = 1;
  cfg.model.delta = 1;
  cfg.model.nu = 1;
  cfg.model.dim = 3;
  cfg.model.modes_per_axis = 8;
  cfg.model.box_length = two_pi<double>();
  cfg.sim.dt = 0.02;
  cfg.sim.t_end = 0.5;
  cfg.sim.record_stride = 5;
  cfg.force.kind = SourceKind::random;
  cfg.force.seed = 1;
  cfg.force.amplitude = 0.01;
  cfg.init.kind = SourceKind::random;
  cfg.init.seed = 2;
  cfg.init.amplitude = 0.3;
  return cfg;
}

int count_columns(const std::string& line) {
  return int(std::count(line.begin(), line.end(), ',')) + 1;
}

}  // namespace

TEST_CASE("checkpoint encodes and decodes bit-exactly") {
  auto grid = make_grid(3, 8);
  const auto p = make_params(1.3, 0.7, 2.1, 0.8, 1.9);
  const Field u = random_divfree_field(grid, 5, 0.7);

  const std::string bytes = encode_checkpoint(u, p, 1.25);
  const auto data = decode_checkpoint<double>(bytes);
  CHECK(data.time == 1.25);
  CHECK(data.params.alpha == p.alpha);
  CHECK(data.params.modes_per_axis == 8);
  CHECK((data.field.coef - u.coef).abs().maxCoeff() == 0.0);
  CHECK(data.field.divergence_free);
  CHECK(encode_checkpoint(data.field, data.params, data.time) == bytes);

  TempDir tmp("ckpt");
  write_checkpoint(tmp.str() + "/a.ckpt", u, p, 1.25);
  const auto again = read_checkpoint<double>(tmp.str() + "/a.ckpt");
  CHECK((again.field.coef - u.coef).abs().maxCoeff() == 0.0);
}

TEST_CASE("checkpoint rejects corrupt payloads") {
  auto grid = make_grid(3, 8);
  const Field u = random_divfree_field(grid, 5, 0.7);
  std::string bytes = encode_checkpoint(u, make_params(), 0.0);
  CHECK_THROWS_AS((void)decode_checkpoint<double>(bytes.substr(0, 100)),
                  const Error&);
  std::string wrong = bytes;
  wrong[0] = 'X';
  CHECK_THROWS_AS((void)decode_checkpoint<double>(wrong), const Error&);
  std::string longer = bytes + "zz";
  CHECK_THROWS_AS((void)decode_checkpoint<double>(longer), const Error&);
}

TEST_CASE("config round-trips losslessly through the key=value format") {
  RunConfig cfg = small_config();
  cfg.model.alpha = 1.0 / 3.0;
  cfg.model.box_length = std::sqrt(2.0) * 3.1;
  cfg.sim.dt = 0.1 / 7.0;
  cfg.sim.nonlinearity_enabled = false;
  cfg.force.kind = SourceKind::checkpoint;
  cfg.force.checkpoint_path = "some/where.ckpt";
  cfg.ref.kind = ReferenceKind::stationary;
  cfg.tol.smallness_C = 2.5;
  cfg.sweep.beta = {2.0, 1.0 / 3.0, 0.0};
  cfg.sweep.n_starts = 7;

  const RunConfig back = parse_config(serialize_config(cfg));
  CHECK(serialize_config(back) == serialize_config(cfg));
  CHECK(back.model.alpha == cfg.model.alpha);
  CHECK(back.sim.dt == cfg.sim.dt);
  CHECK(back.sim.nonlinearity_enabled == cfg.sim.nonlinearity_enabled);
  CHECK(back.force.checkpoint_path == cfg.force.checkpoint_path);
  CHECK(back.sweep.beta == cfg.sweep.beta);
}

TEST_CASE("config parser rejects unknown keys and bad values") {
  CHECK_THROWS_AS((void)parse_config("model.bogus = 1\n"), const ConfigError&);
  CHECK_THROWS_AS((void)parse_config("model.alpha = abc\n"), const ConfigError&);
  CHECK_THROWS_AS((void)parse_config("just a line\n"), const ConfigError&);
  // Comments and blank lines are fine.
  const auto cfg = parse_config("# comment\n\nmodel.alpha = 1.5 # tail\n");
  CHECK(cfg.model.alpha == 1.5);
}

TEST_CASE("cmd_simulate: zero run emits zero rows, format contract holds") {
  RunConfig cfg = small_config();
  cfg.force.kind = SourceKind::zero;
  cfg.init.kind = SourceKind::zero;
  TempDir tmp("sim_zero");
  std::ostringstream log;
  CHECK(harness::cmd_simulate(cfg, tmp.str(), log) == exit_ok);

  const std::string csv = slurp(tmp.str() + "/trajectory.csv");
  std::istringstream lines(csv);
  std::string header, row;
  std::getline(lines, header);
  CHECK(count_columns(header) == 7);
  int rows = 0;
  while (std::getline(lines, row)) {
    CHECK(count_columns(row) == 7);
    // Every value after t is exactly zero.
    const auto comma = row.find(',');
    for (const char c : row.substr(comma))
      CHECK((c == ',' || c == '0' || c == '.' || c == 'e' || c == '-' ||
             std::isdigit(c)));
    std::istringstream rs(row);
    std::string cell;
    std::getline(rs, cell, ',');
    int idx = 0;
    while (std::getline(rs, cell, ',')) {
      CHECK(std::stod(cell) == 0.0);
      ++idx;
    }
    CHECK(idx == 6);
    ++rows;
  }
  CHECK(rows >= 2);
}

TEST_CASE("cmd_simulate is byte-deterministic and 9 columns with a reference") {
  RunConfig cfg = small_config();
  cfg.ref.kind = ReferenceKind::stationary;
  TempDir a("sim_a"), b("sim_b");
  std::ostringstream log;
  REQUIRE(harness::cmd_simulate(cfg, a.str(), log) == exit_ok);
  REQUIRE(harness::cmd_simulate(cfg, b.str(), log) == exit_ok);
  CHECK(slurp(a.str() + "/trajectory.csv") == slurp(b.str() + "/trajectory.csv"));
  CHECK(slurp(a.str() + "/state.ckpt") == slurp(b.str() + "/state.ckpt"));

  std::istringstream lines(slurp(a.str() + "/trajectory.csv"));
  std::string header;
  std::getline(lines, header);
  CHECK(count_columns(header) == 9);
}

TEST_CASE("cmd_stationary: zero forcing, summary numbers, reloadable state") {
  RunConfig cfg = small_config();

  SUBCASE("zero forcing") {
    cfg.force.kind = SourceKind::zero;
    TempDir tmp("stat_zero");
    std::ostringstream log;
    CHECK(harness::cmd_stationary(cfg, tmp.str(), log) == exit_ok);
    CHECK(log.str().find("residual_l2 = 0") != std::string::npos);
    CHECK(log.str().find("smallness.verdict = asymptotic") != std::string::npos);
  }

  SUBCASE("small random forcing round-trips through the checkpoint") {
    TempDir tmp("stat_rand");
    std::ostringstream log;
    CHECK(harness::cmd_stationary(cfg, tmp.str(), log) == exit_ok);
    for (const char* key :
         {"smallness.lhs", "smallness.rhs_orbital", "smallness.rhs_asymptotic"})
      CHECK(log.str().find(key) != std::string::npos);

    const auto data = read_checkpoint<double>(tmp.str() + "/stationary.ckpt");
    auto grid = data.field.grid;
    RunConfig fcfg = cfg;
    const Field f = harness::make_forcing(fcfg, grid);
    CHECK(stationary_residual_l2(data.field, f, cfg.model) < cfg.tol.residual);
  }
}

TEST_CASE("cmd_verify: dimension suite passes on zero forcing") {
  RunConfig cfg = small_config();
  cfg.force.kind = SourceKind::zero;
  TempDir tmp("verify_dim");
  std::ostringstream log;
  CHECK(harness::cmd_verify(cfg, harness::VerifySuite::dimension, tmp.str(),
                            log) == exit_ok);
  CHECK(log.str().find("fractal_dimension_bound") != std::string::npos);
  CHECK(log.str().find("lieb_thirring_constant") != std::string::npos);
  CHECK(slurp(tmp.str() + "/verify_dimension.txt").find("[PASS]") !=
        std::string::npos);
}

TEST_CASE("cmd_verify: energy suite on a small instance") {
  RunConfig cfg = small_config();
  cfg.sim.t_end = 1.0;
  TempDir tmp("verify_energy");
  std::ostringstream log;
  CHECK(harness::cmd_verify(cfg, harness::VerifySuite::energy, tmp.str(), log) ==
        exit_ok);
}

TEST_CASE("cmd_sweep: one-cell sweep composes stationary and dimension data") {
  RunConfig cfg = small_config();
  cfg.sweep.alpha = {2.0};
  cfg.sweep.beta = {2.0};
  cfg.sweep.gamma = {1.0};
  cfg.sweep.nu = {1.0};
  cfg.sweep.delta = {1.0};
  cfg.sweep.f_amplitude = {0.01};
  cfg.sweep.n_starts = 2;
  cfg.sim.dt = 0.05;
  TempDir tmp("sweep1");
  std::ostringstream log;
  CHECK(harness::cmd_sweep(cfg, tmp.str(), 2, log) == exit_ok);

  std::istringstream lines(slurp(tmp.str() + "/sweep.csv"));
  std::string header, row;
  std::getline(lines, header);
  REQUIRE(std::getline(lines, row));
  CHECK(count_columns(row) == count_columns(header));
  CHECK(row.find("ok") != std::string::npos);
  CHECK(row.find("asymptotic") != std::string::npos);

  // Cross-check the row against direct calls.
  auto grid = harness::make_grid(cfg);
  RunConfig cell = cfg;
  cell.force.amplitude = 0.01;
  const Field f = harness::make_forcing(cell, grid);
  const double bound = fractal_dim_bound(f, cfg.model);
  std::ostringstream expect;
  expect << detail::fmt_double(bound);
  CHECK(row.find(expect.str()) != std::string::npos);
}

TEST_CASE("parse_suite rejects unknown suites") {
  CHECK_THROWS_AS((void)harness::parse_suite("everything"), const ConfigError&);
  CHECK(harness::parse_suite("lyapunov") == harness::VerifySuite::lyapunov);
}

TEST_CASE("sweep defaults cover the named model points") {
  const RunConfig cfg;
  CHECK(cfg.sweep.alpha == std::vector<double>{2.0});
  CHECK(cfg.sweep.beta == std::vector<double>{2.0, 0.5, 0.0});
}

TEST_CASE("doubling gamma weakly decreases every sweep dimension bound") {
  RunConfig cfg = small_config();
  cfg.sweep.alpha = {2.0};
  cfg.sweep.beta = {2.0};
  cfg.sweep.gamma = {1.0, 2.0};
  cfg.sweep.nu = {1.0};
  cfg.sweep.delta = {1.0};
  cfg.sweep.f_amplitude = {0.01};
  cfg.sweep.n_starts = 1;
  cfg.sim.dt = 0.05;
  TempDir tmp("sweep_gamma");
  std::ostringstream log;
  REQUIRE(harness::cmd_sweep(cfg, tmp.str(), 2, log) == exit_ok);

  std::istringstream lines(slurp(tmp.str() + "/sweep.csv"));
  std::string header, row;
  std::getline(lines, header);
  std::vector<std::pair<double, double>> gamma_bound;
  while (std::getline(lines, row)) {
    std::vector<std::string> cells;
    std::istringstream rs(row);
    std::string cell;
    while (std::getline(rs, cell, ',')) cells.push_back(cell);
    gamma_bound.emplace_back(std::stod(cells[2]), std::stod(cells[9]));
  }
  REQUIRE(gamma_bound.size() == 2);
  CHECK(gamma_bound[1].first == 2.0);
  CHECK(gamma_bound[1].second <= gamma_bound[0].second);
}

TEST_CASE("missing prerequisite checkpoints are named in the error") {
  RunConfig cfg = small_config();
  cfg.init.kind = SourceKind::checkpoint;
  cfg.init.checkpoint_path = "does/not/exist.ckpt";
  TempDir tmp("missing_ckpt");
  std::ostringstream log;
  try {
    (void)harness::cmd_simulate(cfg, tmp.str(), log);
    FAIL("expected an exception");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("does/not/exist.ckpt") != std::string::npos);
  }
}

TEST_CASE("verify energy on a nonlinearity-off single-mode run") {
  RunConfig cfg = small_config();
  cfg.sim.nonlinearity_enabled = false;
  cfg.sim.t_end = 1.0;
  cfg.force.kind = SourceKind::zero;

  TempDir tmp("verify_linear");
  auto grid = harness::make_grid(cfg);
  Field u0(grid);
  u0.coef(testutil::find_mode(*grid, 1, 0, 0), 1) = {0.4, 0.1};
  u0 = leray_project(u0);
  const std::string ckpt = tmp.str() + "/mode.ckpt";
  write_checkpoint(ckpt, u0, cfg.model, 0.0);
  cfg.init.kind = SourceKind::checkpoint;
  cfg.init.checkpoint_path = ckpt;

  std::ostringstream log;
  CHECK(harness::cmd_verify(cfg, harness::VerifySuite::energy, tmp.str(), log) ==
        exit_ok);
  CHECK(log.str().find("suite passed") != std::string::npos);
}
