#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "dpl/config.hpp"
#include "dpl/io.hpp"
#include "dpl/observables.hpp"

namespace fs = std::filesystem;
using namespace dpl;

namespace {

struct Result {
  int code;
  std::string out;
};

Result run(const std::string& args) {
  const std::string cmd = std::string(DPL_CLI) + " " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, p)) out.append(buf, n);
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

std::string payload(const std::string& bytes) {
  std::uint32_t h = 0;
  for (int i = 0; i < 4; ++i) h |= std::uint32_t(std::uint8_t(bytes[5 + i])) << (8 * i);
  return bytes.substr(9 + h);
}

std::vector<std::vector<std::string>> csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fs::temp_directory_path() / ("dpl_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    ASSERT_EQ(run("build --config " + config("two_mode.json") + " --out " + (dir_ / "two.dpst").string()).code, 0);
  }
  static void TearDownTestSuite() { fs::remove_all(dir_); }

  static std::string config(const std::string& name) { return (fs::path(DPL_CONFIG_DIR) / name).string(); }
  static std::string state() { return (dir_ / "two.dpst").string(); }

  static fs::path dir_;
};

fs::path Cli::dir_;

}  // namespace

TEST_F(Cli, BuildWritesNormalizedState) {
  const auto out = dir_ / "h.dpst";
  const Result r = run("build --config " + config("helicity_gaussian.json") + " --out " + out.string());
  ASSERT_EQ(r.code, 0) << r.out;
  const io::StateFile f = io::read_state(out);
  EXPECT_NEAR(f.state.norm, 1.0, 1e-13);
  EXPECT_LT(f.state.rqc_residual, 1e-12);
  // The file holds exactly the state synthesized in memory from the same config.
  const RunConfig c = load_config(config("helicity_gaussian.json"));
  const PhotonState s = synthesize(c.modes, c.grid, c.units);
  EXPECT_EQ(payload(slurp(out)), io::encode_payload(s.psi));
}

TEST_F(Cli, MalformedConfigExitsWithTwo) {
  const auto bad = dir_ / "bad.json";
  std::ofstream(bad) << R"({"grid": {"n": 16, "dk": 0.5}, "modes": [{"kind": "gaussian", "k0": [0,0,1], "sigma_k": 1, "spin": 1}]})";
  const Result r = run("build --config " + bad.string() + " --out " + (dir_ / "x.dpst").string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("/modes/0/spin"), std::string::npos) << r.out;

  std::ofstream(bad) << "{ not json";
  EXPECT_EQ(run("build --config " + bad.string()).code, 2);
  EXPECT_EQ(run("build").code, 2);
}

TEST_F(Cli, CorruptStateExitsWithThree) {
  std::string bytes = slurp(state());
  bytes[bytes.size() - 3] ^= 0x20;
  const auto bad = dir_ / "corrupt.dpst";
  std::ofstream(bad, std::ios::binary) << bytes;
  EXPECT_EQ(run("check " + bad.string() + " --suites algebra").code, 3);
  EXPECT_EQ(run("observe " + bad.string()).code, 3);
  EXPECT_EQ(run("evolve " + bad.string() + " -t 1").code, 3);
}

TEST_F(Cli, ObserveCsvAndPrecision) {
  const Result a = run("observe " + state());
  ASSERT_EQ(a.code, 0) << a.out;
  const auto rows = csv(a.out);
  ASSERT_GT(rows.size(), 5u);
  EXPECT_EQ(rows[0][0], "name");
  EXPECT_EQ(rows[1][0], "spin_canonical");
  const Result b = run("observe " + state() + " --precision 12");
  ASSERT_EQ(b.code, 0);
  const auto wide = csv(b.out);
  EXPECT_GT(wide[1][3].size(), rows[1][3].size());
  EXPECT_NEAR(std::stod(wide[1][3]), std::stod(rows[1][3]), 1e-5 * std::abs(std::stod(rows[1][3])) + 1e-12);
  EXPECT_EQ(run("observe " + state() + " --precision 0").code, 2);
}

TEST_F(Cli, CheckSelectedSuites) {
  const auto report = dir_ / "report.json";
  const Result r = run("check " + state() + " --suites densities,spin-equalities --out " + report.string());
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = nlohmann::json::parse(slurp(report));
  EXPECT_TRUE(j["pass"].get<bool>());
  EXPECT_EQ(j["suites"].size(), 2u);
  const Result u = run("check " + state() + " --suites nope");
  EXPECT_EQ(u.code, 2);
  EXPECT_NE(u.out.find("available"), std::string::npos);
}

TEST_F(Cli, CheckFailureExitsWithOne) {
  const Result r = run("check " + state() + " --suites algebra --tolerance matrix=1e-30");
  EXPECT_EQ(r.code, 1) << r.out;
  EXPECT_EQ(run("check " + state() + " --suites algebra --tolerance matrix").code, 2);
}

TEST_F(Cli, DensitySlicesIntegrateToReportValues) {
  const auto out = dir_ / "dens_all";
  ASSERT_EQ(run("densities " + state() + " --plane z=all --out " + out.string()).code, 0);
  const io::StateFile f = io::read_state(state());
  const DensityCandidates d = density_candidates(f.state);
  const double dv = f.state.grid().x_volume();
  auto integral = [&](const std::string& name) {
    const auto rows = csv(slurp(out / (name + ".csv")));
    double s = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) s += std::stod(rows[i][3]);
    return s * dv;
  };
  EXPECT_NEAR(integral("prob_psi"), d.prob_integral_psi, 1e-5);
  EXPECT_NEAR(integral("spin_upper_z"), d.upper_integral[2], 1e-5);

  const auto exact = dir_ / "dens_exact";
  ASSERT_EQ(run("densities " + state() + " --plane z=all --precision 17 --out " + exact.string()).code, 0);
  const auto rows = csv(slurp(exact / "prob_psi.csv"));
  double s = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) s += std::stod(rows[i][3]);
  EXPECT_NEAR(s * dv, d.prob_integral_psi, 1e-8);
}

TEST_F(Cli, DensityPlaneSliceAndBounds) {
  const auto out = dir_ / "dens_z0";
  ASSERT_EQ(run("densities " + state() + " --plane z=0 --out " + out.string()).code, 0);
  const auto rows = csv(slurp(out / "spin_omega_z.csv"));
  EXPECT_EQ(rows[0], (std::vector<std::string>{"x", "y", "value"}));
  EXPECT_EQ(rows.size(), 1u + 32u * 32u);
  EXPECT_EQ(run("densities " + state() + " --plane z=1000").code, 2);
  EXPECT_EQ(run("densities " + state() + " --plane w=0").code, 2);
}

TEST_F(Cli, EmptyStateGivesZeroSlicesWithWarning) {
  PhotonState s = make_state(Field6C(KGrid(8, 1.0), Representation::momentum));
  const auto path = dir_ / "empty.dpst";
  io::write_state(path, s);
  const auto out = dir_ / "dens_empty";
  const Result r = run("densities " + path.string() + " --out " + out.string());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("warning"), std::string::npos);
  const auto rows = csv(slurp(out / "prob_psi.csv"));
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_EQ(std::stod(rows[i][2]), 0.0);
}

TEST_F(Cli, EvolveZeroKeepsPayloadAndComposes) {
  const auto e0 = dir_ / "e0.dpst", e1 = dir_ / "e1.dpst", e11 = dir_ / "e11.dpst", e2 = dir_ / "e2.dpst";
  ASSERT_EQ(run("evolve " + state() + " -t 0 --out " + e0.string()).code, 0);
  EXPECT_EQ(payload(slurp(e0)), payload(slurp(state())));

  ASSERT_EQ(run("evolve " + state() + " -t 1.5 --out " + e1.string()).code, 0);
  ASSERT_EQ(run("evolve " + e1.string() + " -t 1.5 --out " + e11.string()).code, 0);
  ASSERT_EQ(run("evolve " + state() + " -t 3 --out " + e2.string()).code, 0);
  const io::StateFile a = io::read_state(e11), b = io::read_state(e2), s = io::read_state(state());
  EXPECT_DOUBLE_EQ(a.state.time(), 3.0);
  double m = 0;
  for (std::size_t i = 0; i < a.state.psi.size(); ++i)
    m = std::max(m, (as_vec(a.state.psi[i]) - as_vec(b.state.psi[i])).norm());
  EXPECT_LT(m, 1e-13);
  EXPECT_NEAR(a.state.norm, s.state.norm, 1e-13);
}
