#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "nrcm/config.hpp"

namespace fs = std::filesystem;

namespace nrcm::cli {
namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  Run r;
  r.code = run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string shipped(const std::string& name) {
  return std::string(NRCM_SOURCE_DIR) + "/configs/" + name;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("nrcm_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
    return path(name);
  }

  fs::path dir_;
};

std::vector<std::vector<std::string>> read_csv(const std::string& file) {
  std::ifstream in(file);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::vector<double> column(const std::vector<std::vector<std::string>>& rows, const std::string& name) {
  const auto& header = rows.at(0);
  const auto it = std::find(header.begin(), header.end(), name);
  EXPECT_NE(it, header.end()) << name;
  const auto k = static_cast<std::size_t>(it - header.begin());
  std::vector<double> v;
  for (std::size_t r = 1; r < rows.size(); ++r) v.push_back(std::stod(rows[r].at(k)));
  return v;
}

std::string slurp(const std::string& file) { return nrcm::read_file(file); }

TEST_F(Cli, SimulateConverter) {
  const auto r = run_cli({"simulate", "--config", shipped("converter.yaml")});
  EXPECT_EQ(r.code, kSuccess) << r.err;
  EXPECT_NE(r.out.find("a2          a1          0.666667"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("b.bath"), std::string::npos);
}

TEST_F(Cli, SimulatePortSubtable) {
  const auto r = run_cli({"simulate", "--config", shipped("converter.yaml"), "--ports", "a2"});
  EXPECT_EQ(r.code, kSuccess);
  EXPECT_EQ(r.out.find("a1"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("a2          a2          0.333333"), std::string::npos) << r.out;
  EXPECT_EQ(run_cli({"simulate", "--config", shipped("converter.yaml"), "--ports", "zz"}).code,
            kValidationError);
}

TEST_F(Cli, MalformedConfig) {
  const auto bad = write("bad.yaml", "schema: nrcm-system/1\nmodes:\n  - {id: a, kind: electromagnetic, kappa: 1}\n");
  const auto r = run_cli({"simulate", "--config", bad});
  EXPECT_EQ(r.code, kValidationError);
  EXPECT_NE(r.err.find("line 3: unknown key 'kappa'"), std::string::npos) << r.err;
  EXPECT_EQ(run_cli({"simulate", "--config", path("missing.yaml")}).code, kValidationError);
  EXPECT_EQ(run_cli({"simulate"}).code, kValidationError);
  EXPECT_EQ(run_cli({}).code, kValidationError);
}

TEST_F(Cli, SweepNeedsTwoPoints) {
  const auto r = run_cli({"sweep", "--config", shipped("converter.yaml"), "--delta-min", "-1",
                          "--delta-max", "1", "--points", "1", "--out", path("s")});
  EXPECT_EQ(r.code, kValidationError);
  EXPECT_NE(r.err.find("at least 2"), std::string::npos);
}

TEST_F(Cli, SweepFourModeIsolator) {
  const auto r = run_cli({"sweep", "--config", shipped("scheme_c.yaml"), "--delta-min", "-600",
                          "--delta-max", "600", "--points", "1201", "--noise", "--out", path("c")});
  ASSERT_EQ(r.code, kSuccess) << r.err;
  const auto rows = read_csv(path("c.csv"));
  ASSERT_EQ(rows.size(), 1202u);
  EXPECT_EQ(rows[0][0], "delta_hz");
  const auto fwd = column(rows, "mag_a2_a1");
  const auto bwd = column(rows, "mag_a1_a2");

  // Forward passes at the centre while backward is nulled.
  EXPECT_GT(fwd[600], 0.85);
  EXPECT_LT(bwd[600], 1e-9);
  EXPECT_GT(bwd[500], 0.5);

  // Backward noise (out of a1) peaks inside the isolation band.
  const auto noise = read_csv(path("c_noise.csv"));
  const auto nbw = column(noise, "N_a1");
  const auto nfw = column(noise, "N_a2");
  const auto peak = static_cast<std::size_t>(std::max_element(nbw.begin(), nbw.end()) - nbw.begin());
  EXPECT_GT(nbw[600], 90.0);
  EXPECT_LT(std::abs(static_cast<double>(peak) - 600.0), 20.0);
  EXPECT_GT(nbw[600] - nfw[600], 10.0);
  EXPECT_TRUE(fs::exists(path("c.manifest.json")));
}

// Conversion through each mechanical mode alone: the two windows sit either
// side of the centre and cross there.
TEST_F(Cli, SweepSinglePathWindowsCross) {
  const std::string text = slurp(shipped("scheme_c.yaml"));
  auto only = [&](const std::string& keep, const std::string& drop) {
    std::string t = text;
    for (const char* a : {"a1", "a2"}) {
      const std::string key = "[" + std::string(a) + ", " + drop + "], kind: optomechanical, cooperativity: 2.5";
      const auto at = t.find(key);
      EXPECT_NE(at, std::string::npos) << key;
      t.replace(at, key.size(), "[" + std::string(a) + ", " + drop + "], kind: optomechanical, cooperativity: 0");
    }
    const auto cfg = write("only_" + keep + ".yaml", t);
    const auto r = run_cli({"sweep", "--config", cfg, "--delta-min", "-400", "--delta-max", "400",
                            "--points", "801", "--out", path("only_" + keep)});
    EXPECT_EQ(r.code, kSuccess) << r.err;
    return column(read_csv(path("only_" + keep + ".csv")), "mag_a2_a1");
  };
  const auto upper = only("b1", "b2");
  const auto lower = only("b2", "b1");
  const auto grid = column(read_csv(path("only_b1.csv")), "delta_hz");

  auto peak = [&](const std::vector<double>& v) {
    return grid[static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin())];
  };
  EXPECT_NEAR(peak(upper), 100.0, 5.0);
  EXPECT_NEAR(peak(lower), -100.0, 5.0);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (grid[k] < -1.0) {
      EXPECT_LT(upper[k], lower[k]) << grid[k];
    } else if (grid[k] > 1.0) {
      EXPECT_GT(upper[k], lower[k]) << grid[k];
    }
  }
  EXPECT_NEAR(upper[400], lower[400], 1e-12);
}

TEST_F(Cli, OptimizeReportFeedsSweep) {
  const auto r = run_cli({"optimize", "--config", shipped("scheme_c.yaml"), "--out", path("d.yaml")});
  ASSERT_EQ(r.code, kSuccess) << r.err << r.out;
  EXPECT_NE(r.out.find("status: target_met"), std::string::npos);
  const std::string report = slurp(path("d.yaml"));
  EXPECT_NE(report.find("design:"), std::string::npos);

  const auto v = run_cli({"sweep", "--config", path("d.yaml"), "--delta-min", "-200", "--delta-max",
                          "200", "--points", "401", "--out", path("v")});
  ASSERT_EQ(v.code, kSuccess) << v.err;
  const auto depth_at = v.out.find("depth_db=");
  ASSERT_NE(depth_at, std::string::npos);
  EXPECT_GE(std::stod(v.out.substr(depth_at + 9)), 20.0);
}

TEST_F(Cli, OptimizeInfeasibleBounds) {
  std::string text = slurp(shipped("scheme_c.yaml"));
  const auto at = text.find("cooperativity: [0.5, 50]");
  ASSERT_NE(at, std::string::npos);
  text.replace(at, 24, "cooperativity: [50, 0.5]");
  const auto r = run_cli({"optimize", "--config", write("inf.yaml", text), "--out", path("d.yaml")});
  EXPECT_EQ(r.code, kValidationError);
  EXPECT_NE(r.err.find("infeasible"), std::string::npos) << r.err;
}

TEST_F(Cli, OptimizeBelowTargetExitsThree) {
  std::string text = slurp(shipped("scheme_c.yaml"));
  text.replace(text.find("splitting: [0, 1000]"), 20, "splitting: [0, 0]");
  const auto r = run_cli({"optimize", "--config", write("flat.yaml", text), "--out", path("d.yaml")});
  EXPECT_EQ(r.code, kNotConverged) << r.err;
  EXPECT_NE(slurp(path("d.yaml")).find("status: below_target"), std::string::npos);
}

TEST_F(Cli, OptimizeRejectsBadSeedGrid) {
  EXPECT_EQ(run_cli({"optimize", "--config", shipped("scheme_c.yaml"), "--seed-grid", "4x4",
                     "--out", path("d.yaml")}).code,
            kValidationError);
}

TEST_F(Cli, ComposeCirculatorAndIsolator) {
  const auto c = run_cli({"compose", "--config", shipped("circulator.yaml")});
  ASSERT_EQ(c.code, kSuccess) << c.err;
  EXPECT_NE(c.out.find("0.000000 0.000000 0.000000 1.000000\n"
                       "1.000000 0.000000 0.000000 0.000000\n"
                       "0.000000 1.000000 0.000000 0.000000\n"
                       "0.000000 0.000000 1.000000 0.000000\n"),
            std::string::npos)
      << c.out;

  const auto t = run_cli({"compose", "--config", shipped("circulator.yaml"), "--terminate", "3,4"});
  ASSERT_EQ(t.code, kSuccess);
  EXPECT_NE(t.out.find("0.000000 0.000000\n1.000000 0.000000\n"), std::string::npos) << t.out;
  EXPECT_EQ(run_cli({"compose", "--config", shipped("isolator.yaml")}).out, t.out);
}

TEST_F(Cli, ComposeNamesDoubleConnectedPort) {
  const auto net = write("dup.yaml", R"(schema: nrcm-netlist/1
components:
  - {name: g, type: gyrator}
  - {name: t, type: transmission_line}
connections:
  - [g.2, t.1]
  - [t.1, t.2]
external: [g.1]
)");
  const auto r = run_cli({"compose", "--config", net});
  EXPECT_EQ(r.code, kValidationError);
  EXPECT_NE(r.err.find("t.1"), std::string::npos) << r.err;
}

TEST_F(Cli, ComposeSingularRingExitsTwo) {
  const auto net = write("ring.yaml", R"(schema: nrcm-netlist/1
components:
  - {name: r1, type: transmission_line}
  - {name: r2, type: transmission_line}
  - {name: through, type: transmission_line}
connections:
  - [r1.1, r2.1]
  - [r1.2, r2.2]
external: [through.1, through.2]
)");
  EXPECT_EQ(run_cli({"compose", "--config", net}).code, kSingular);
}

TEST_F(Cli, RerunsAreByteIdentical) {
  const std::vector<std::vector<std::string>> runs = {
      {"simulate", "--config", shipped("scheme_b.yaml"), "--delta", "37.5", "--out", path("s.csv")},
      {"sweep", "--config", shipped("scheme_c.yaml"), "--delta-min", "-400", "--delta-max", "400",
       "--points", "801", "--noise", "--out", path("w")},
      {"optimize", "--config", shipped("scheme_c.yaml"), "--out", path("o.yaml")},
      {"compose", "--config", shipped("circulator.yaml"), "--out", path("n.csv")},
  };
  const std::vector<std::vector<std::string>> files = {
      {"s.csv", "s.csv.manifest.json"},
      {"w.csv", "w_noise.csv", "w.manifest.json"},
      {"o.yaml", "o.yaml.manifest.json"},
      {"n.csv", "n.csv.manifest.json"},
  };
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto first = run_cli(runs[i]);
    ASSERT_EQ(first.code, kSuccess) << runs[i][0] << first.err;
    std::vector<std::string> before;
    for (const auto& f : files[i]) before.push_back(slurp(path(f)));
    const auto second = run_cli(runs[i]);
    EXPECT_EQ(first.out, second.out) << runs[i][0];
    for (std::size_t k = 0; k < files[i].size(); ++k)
      EXPECT_EQ(before[k], slurp(path(files[i][k]))) << files[i][k];
  }
}

TEST_F(Cli, ManifestRecordsTheRun) {
  ASSERT_EQ(run_cli({"compose", "--config", shipped("circulator.yaml"), "--out", path("n.csv")}).code, 0);
  const std::string m = slurp(path("n.csv.manifest.json"));
  EXPECT_NE(m.find("\"subcommand\": \"compose\""), std::string::npos);
  EXPECT_NE(m.find("\"config_hash\": \"fnv1a64:"), std::string::npos);
  EXPECT_NE(m.find("\"version\": \"1.0.0\""), std::string::npos);
}

TEST_F(Cli, HelpAndVersion) {
  EXPECT_EQ(run_cli({"--help"}).code, kSuccess);
  const auto v = run_cli({"--version"});
  EXPECT_EQ(v.code, kSuccess);
  EXPECT_EQ(v.out, "1.0.0\n");
}

}  // namespace
}  // namespace nrcm::cli
