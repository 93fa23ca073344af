#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " \"" POLAR_TAILS_EXE "\" " + args + " 2>/dev/null";
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  char buf[4096];
  std::size_t got = 0;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("polar_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter_++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path_ / name) << text;
    return path_ / name;
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
  static inline int counter_ = 0;
};

std::string quoted(const fs::path& p) { return "\"" + p.string() + "\""; }

struct Csv {
  std::string manifest;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t col(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    ADD_FAILURE() << "no column " << name;
    return 0;
  }
  double num(std::size_t row, const std::string& name) const { return std::stod(rows[row][col(name)]); }
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

Csv parse_csv(const std::string& text) {
  Csv csv;
  std::istringstream in(text);
  std::getline(in, csv.manifest);
  std::string line;
  std::getline(in, line);
  csv.header = split(line);
  while (std::getline(in, line)) {
    if (!line.empty()) csv.rows.push_back(split(line));
  }
  return csv;
}

std::map<std::string, std::string> parse_report(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (line.empty() || line[0] == '#' || eq == std::string::npos) continue;
    out[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return out;
}

int significant_digits(const std::string& number) {
  std::string mantissa = number.substr(0, number.find_first_of("eE"));
  int digits = 0;
  bool leading = true;
  for (char c : mantissa) {
    if (c < '0' || c > '9') continue;
    if (leading && c == '0') continue;
    leading = false;
    ++digits;
  }
  return digits;
}

const std::string kFixtures = POLAR_TAILS_CONFIG_DIR;

}  // namespace

TEST(Cli, ManifestAndHeader) {
  const RunResult r = run("tail-table --config " + kFixtures + "/gaussian.cfg --seed 99");
  ASSERT_EQ(r.exit_code, 0);
  const Csv csv = parse_csv(r.out);
  EXPECT_EQ(csv.manifest.rfind("# manifest: ", 0), 0u);
  std::istringstream fields(csv.manifest.substr(12));
  std::string hash;
  std::string seed;
  std::string version;
  fields >> hash >> seed >> version;
  EXPECT_EQ(hash.size(), 16u);
  EXPECT_EQ(seed, "99");
  EXPECT_FALSE(version.empty());
  EXPECT_EQ(csv.header, (std::vector<std::string>{"u", "t", "exact", "thm1", "thm3_default", "thm3_strict",
                                                 "ratio_thm1", "ratio_thm3"}));
  EXPECT_EQ(csv.rows.size(), 11u);
}

TEST(Cli, TailTableRatiosApproachOne) {
  TempDir dir;
  const fs::path cfg = dir.write("t.cfg", "rho = 0.5\nu_grid = 2, 4, 6, 8\n");
  const RunResult r = run("tail-table --config " + quoted(cfg));
  ASSERT_EQ(r.exit_code, 0);
  const Csv csv = parse_csv(r.out);
  ASSERT_EQ(csv.rows.size(), 4u);
  double prev_gap = INFINITY;
  for (std::size_t i = 0; i < csv.rows.size(); ++i) {
    const double gap = std::abs(csv.num(i, "ratio_thm1") - 1.0);
    EXPECT_LT(gap, prev_gap) << i;
    prev_gap = gap;
    EXPECT_NEAR(csv.num(i, "thm3_default") / csv.num(i, "thm1"), 1.0, 1e-14);
    const std::string exact = csv.rows[i][csv.col("exact")];
    EXPECT_EQ(significant_digits(exact), 17) << exact;
  }
}

TEST(Cli, CondCdfLimitIsCenteredAndExactAtRhoZero) {
  TempDir dir;
  const fs::path cfg = dir.write("c.cfg", "rho = 0\nu_grid = 3\ny_grid = -1, 0, 1\n");
  const RunResult r = run("cond-cdf --config " + quoted(cfg));
  ASSERT_EQ(r.exit_code, 0);
  const Csv csv = parse_csv(r.out);
  ASSERT_EQ(csv.rows.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(csv.num(i, "second_order"), csv.num(i, "limit"));
    // Independent X and Y: the exact conditional CDF is the standard normal one.
    EXPECT_NEAR(csv.num(i, "exact"), 0.5 * std::erfc(-csv.num(i, "y") / std::sqrt(2.0)), 1e-9);
  }
  EXPECT_NEAR(csv.num(1, "limit"), 0.5, 1e-15);

  const fs::path rho_cfg = dir.write("r.cfg", "rho = 0.5\nu_grid = 4\ny_grid = 2\n");
  const RunResult at_center = run("cond-cdf --config " + quoted(rho_cfg));
  ASSERT_EQ(at_center.exit_code, 0);
  EXPECT_NEAR(parse_csv(at_center.out).num(0, "limit"), 0.5, 1e-15);
}

TEST(Cli, SimulateThenEstimate) {
  TempDir dir;
  const fs::path sim_cfg = dir.write("s.cfg", "rho = 0.5\nn = 200000\nseed = 11\n");
  const fs::path sample = dir.path() / "sample.csv";
  ASSERT_EQ(run("simulate --config " + quoted(sim_cfg) + " --out " + quoted(sample)).exit_code, 0);
  std::ifstream in(sample);
  std::string manifest;
  std::getline(in, manifest);
  EXPECT_NE(manifest.find(" 11 "), std::string::npos) << manifest;

  const fs::path est_cfg = dir.write("e.cfg", "input = sample.csv\ndelta = 0\n");
  const RunResult r = run("estimate --config " + quoted(est_cfg));
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), manifest);
  const auto report = parse_report(r.out);
  EXPECT_NEAR(std::stod(report.at("rho_hat")), 0.5, 0.05);
  EXPECT_EQ(report.at("delta_source"), "provided");
  EXPECT_EQ(report.at("n"), "200000");
  EXPECT_EQ(report.at("k_used"), "2000");
}

TEST(Cli, SimulateIsThreadCountIndependent) {
  TempDir dir;
  const fs::path cfg = dir.write("s.cfg", "radial.family = kotz\nangular.family = dirichlet\nangular.a = 1\n"
                                          "angular.b = 1\nrho = 0.3\nn = 5000\n");
  const RunResult one = run("simulate --config " + quoted(cfg) + " --seed 5", "POLAR_TAILS_THREADS=1");
  const RunResult four = run("simulate --config " + quoted(cfg) + " --seed 5", "POLAR_TAILS_THREADS=4");
  const RunResult automatic = run("simulate --config " + quoted(cfg) + " --seed 5", "POLAR_TAILS_THREADS=0");
  ASSERT_EQ(one.exit_code, 0);
  EXPECT_EQ(one.out, four.out);
  EXPECT_EQ(one.out, automatic.out);
  EXPECT_NE(one.out, run("simulate --config " + quoted(cfg) + " --seed 6").out);
}

TEST(Cli, ValidateFixtures) {
  for (const char* name : {"gaussian.cfg", "kotz_dirichlet.cfg", "kotz_power.cfg"}) {
    const RunResult r = run("validate --config " + kFixtures + "/" + name);
    EXPECT_EQ(r.exit_code, 0) << name << "\n" << r.out;
    const Csv csv = parse_csv(r.out);
    EXPECT_EQ(csv.header, (std::vector<std::string>{"check", "passed", "value", "limit"}));
    EXPECT_GT(csv.rows.size(), 10u);
  }
}

TEST(Cli, ExitCodes) {
  TempDir dir;
  EXPECT_EQ(run("").exit_code, 2);
  EXPECT_EQ(run("tail-table").exit_code, 2);
  EXPECT_EQ(run("tail-table --config " + quoted(dir.path() / "missing.cfg")).exit_code, 2);
  EXPECT_EQ(run("tail-table --config " + quoted(dir.write("a.cfg", "bogus = 1\n"))).exit_code, 2);
  EXPECT_EQ(run("tail-table --config " + quoted(dir.write("b.cfg", "u_grid =\n"))).exit_code, 2);
  EXPECT_EQ(run("tail-table --config " + quoted(dir.write("c.cfg", "rho = 1\nu_grid = 2\n"))).exit_code, 2);
  EXPECT_EQ(run("cond-cdf --config " + quoted(dir.write("d.cfg", "u_grid = 2\n"))).exit_code, 2);
  EXPECT_EQ(run("cond-cdf --config " + quoted(dir.write("e.cfg", "u_grid = 1000\nz_grid = 0\n"))).exit_code, 3);
  EXPECT_EQ(run("tail-table --config " + kFixtures + "/gaussian.cfg", "POLAR_TAILS_THREADS=abc").exit_code, 2);

  const fs::path rows = dir.write("few.csv", "# manifest: none 1 v\nx,y\n1,2\n3,4\n");
  EXPECT_EQ(run("estimate --config " + quoted(dir.write("f.cfg", "input = few.csv\n"))).exit_code, 2);
  (void)rows;
  EXPECT_EQ(run("--version").exit_code, 0);
}

TEST(Cli, OutFileReceivesOutput) {
  TempDir dir;
  const fs::path out = dir.path() / "t.csv";
  const RunResult r = run("tail-table --config " + kFixtures + "/gaussian.cfg --out " + quoted(out));
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), run("tail-table --config " + kFixtures + "/gaussian.cfg").out);
}
