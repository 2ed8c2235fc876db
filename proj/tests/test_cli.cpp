#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cbf/snapshot.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kTmp = fs::path(CBF_TEST_TMPDIR) / "cli";

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Result cli(const std::string& args) {
  fs::create_directories(kTmp);
  const auto out = kTmp / "stdout.txt", err = kTmp / "stderr.txt";
  const std::string cmd = std::string("\"") + CBF_CLI_PATH + "\" " + args + " >\"" + out.string() + "\" 2>\"" +
                          err.string() + "\"";
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

fs::path write_config(const std::string& name, const std::string& text) {
  fs::create_directories(kTmp);
  const auto p = kTmp / name;
  std::ofstream(p) << text;
  return p;
}

const char* kSmallRun = R"([grid]
n = 16
[params]
mu = 0.2
beta = 1
r = 4
[solver]
dt = 0.01
t_end = 0.1
snapshot_every = 5
[ic]
family = random
band_limit = 4
)";

}  // namespace

TEST(Cli, UsageErrorsExitWithTwo) {
  EXPECT_EQ(cli("").code, 2);
  EXPECT_EQ(cli("frobnicate").code, 2);
  EXPECT_EQ(cli("run").code, 2);  // --config missing
  EXPECT_EQ(cli("run --config \"" + (kTmp / "missing.ini").string() + "\"").code, 2);
  EXPECT_EQ(cli("--help").code, 0);
}

TEST(Cli, ConfigErrorNamesTheKey) {
  const auto cfg = write_config("bad.ini", "[params]\nmu = 0\n");
  const auto r = cli("run --config \"" + cfg.string() + "\"");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("params.mu"), std::string::npos) << r.err;
}

TEST(Cli, RunWritesOutputsAndIsDeterministic) {
  const auto cfg = write_config("run.ini", kSmallRun);
  const auto a = kTmp / "run_a", b = kTmp / "run_b";
  fs::remove_all(a);
  fs::remove_all(b);
  auto ra = cli("run --config \"" + cfg.string() + "\" --out \"" + a.string() + "\"");
  ASSERT_EQ(ra.code, 0) << ra.err;
  auto rb = cli("run --config \"" + cfg.string() + "\" --out \"" + b.string() + "\"");
  ASSERT_EQ(rb.code, 0) << rb.err;
  EXPECT_TRUE(fs::exists(a / "config.ini"));  // echoes the output directory, so it differs
  for (const char* f : {"diagnostics.tsv", "final.bin", "snapshot_000005.bin", "snapshot_000010.bin"}) {
    EXPECT_TRUE(fs::exists(a / f)) << f;
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  const auto diag = slurp(a / "diagnostics.tsv");
  EXPECT_EQ(diag.substr(0, diag.find('\n')),
            "t\tenergy\tv_seminorm_sq\tv_norm_sq\tlr1_norm\tforcing_power\tenergy_residual\tint_dissipation\t"
            "int_damping\tint_forcing");
  EXPECT_EQ(std::count(diag.begin(), diag.end(), '\n'), 12);
  const auto fin = cbf::read_snapshot((a / "final.bin").string());
  EXPECT_NEAR(fin.time, 0.1, 1e-15);
  EXPECT_EQ(fin.params.r, 4.0);
  EXPECT_NE(ra.out.find("steps: 10"), std::string::npos);
}

TEST(Cli, ExtendedDiagnosticsFlagAddsColumns) {
  const auto cfg = write_config("run_ext.ini", kSmallRun);
  const auto dir = kTmp / "run_ext";
  ASSERT_EQ(cli("run --config \"" + cfg.string() + "\" --out \"" + dir.string() + "\" --extended-diagnostics").code, 0);
  const auto diag = slurp(dir / "diagnostics.tsv");
  const auto header = diag.substr(0, diag.find('\n'));
  EXPECT_NE(header.find("a_norm_sq"), std::string::npos);
  EXPECT_NE(header.find("divergence_ratio"), std::string::npos);
}

TEST(Cli, BlowUpExitsWithThreeAndKeepsPartialDiagnostics) {
  // A 1e-8 vortex driven toward an O(1) steady shear grows past 1e6 times its start.
  const auto cfg = write_config("blow.ini", R"([grid]
n = 16
[params]
beta = 0
[solver]
dt = 0.05
t_end = 20
[ic]
amplitude = 1e-8
[forcing]
kind = kolmogorov
amplitude = 1
)");
  const auto dir = kTmp / "blow";
  const auto r = cli("run --config \"" + cfg.string() + "\" --out \"" + dir.string() + "\"");
  EXPECT_EQ(r.code, 3) << r.err;
  EXPECT_TRUE(fs::exists(dir / "diagnostics.tsv"));
  EXPECT_NE(r.err.find("last valid t"), std::string::npos);
}

TEST(Cli, VerifyPassesAndFailsWithTheRightCodes) {
  const auto ok = write_config("verify_ok.ini", R"([params]
r = 5
[verify]
checks = trilinear, filter
samples = 5
)");
  const auto dir = kTmp / "verify_ok";
  const auto r = cli("verify --config \"" + ok.string() + "\" --out \"" + dir.string() + "\" --seed 9");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("summary: 2/2 checks acceptable"), std::string::npos);
  EXPECT_NE(r.out.find("worst_case_seed: "), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "verify_report.txt"));
  // The critical-exponent check does not apply at r = 5 and reports an error.
  const auto bad = write_config("verify_bad.ini", "[params]\nr = 5\n[verify]\nchecks = monotonicity_r3\nsamples = 2\n");
  const auto rb = cli("verify --config \"" + bad.string() + "\" --out \"" + (kTmp / "verify_bad").string() + "\"");
  EXPECT_EQ(rb.code, 1);
  EXPECT_NE(rb.out.find("status: ERROR"), std::string::npos);
}

TEST(Cli, ConvergenceRejectsShortLadders) {
  const auto cfg = write_config("conv_short.ini", "[convergence]\ndt_ladder = 1e-3, 5e-4\n");
  EXPECT_EQ(cli("convergence --config \"" + cfg.string() + "\" --out \"" + (kTmp / "conv").string() + "\"").code, 2);
}

TEST(Cli, ConvergenceReportsSecondOrder) {
  const auto cfg = write_config("conv.ini", R"([grid]
n = 16
[params]
mu = 0.1
beta = 0
[solver]
t_end = 0.5
[convergence]
target = taylor_green
dt_ladder = 2e-2, 1e-2, 5e-3
)");
  const auto dir = kTmp / "conv_ok";
  const auto r = cli("convergence --config \"" + cfg.string() + "\" --out \"" + dir.string() + "\"");
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_TRUE(fs::exists(dir / "convergence.tsv"));
}

TEST(Cli, TaylorGreenCannedRunPasses) {
  const auto dir = kTmp / "tg";
  const auto r = cli("taylor-green --out \"" + dir.string() + "\"");
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("status: PASS"), std::string::npos);
}
