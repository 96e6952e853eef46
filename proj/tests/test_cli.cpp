#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ldlab/cli/app.hpp"
#include "ldlab/code.hpp"
#include "ldlab/code_io.hpp"

namespace fs = std::filesystem;
using ldlab::cli::run;

namespace {

struct Run {
  int status = 0;
  std::string out;
  std::string err;
};

Run invoke(std::vector<std::string> args, bool tty = false) {
  args.insert(args.begin(), "ldlab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.status = run(static_cast<int>(argv.size()), argv.data(), out, err, tty);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

using CsvRow = std::map<std::string, std::string>;

std::vector<CsvRow> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  const auto header = split_csv_line(line);
  std::vector<CsvRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    EXPECT_EQ(f.size(), header.size()) << line;
    CsvRow row;
    for (std::size_t j = 0; j < header.size() && j < f.size(); ++j) row[header[j]] = f[j];
    rows.push_back(row);
  }
  return rows;
}

double num(const CsvRow& r, const std::string& key) {
  const auto it = r.find(key);
  if (it == r.end() || it->second.empty()) ADD_FAILURE() << "missing " << key;
  return it == r.end() || it->second.empty() ? std::nan("") : std::stod(it->second);
}

class TempDir {
public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("ldlab_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                         "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }

  std::string write(const std::string& name, const std::string& content) const {
    const auto p = path_ / name;
    std::ofstream(p) << content;
    return p.string();
  }
  std::string path(const std::string& name) const { return (path_ / name).string(); }

private:
  fs::path path_;
};

} // namespace

// ------------------------------------------------------------------- bound

TEST(CliBound, CapacityOfStrengthTwo) {
  const auto r = invoke({"bound", "capacity", "--s", "2"});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_NEAR(num(rows[0], "value"), 0.3832, 5e-5);
  EXPECT_NEAR(num(rows[0], "argmax_Q"), 0.2864, 5e-5);
  EXPECT_NE(rows[0].at("formula").find("h(Q)"), std::string::npos);
}

TEST(CliBound, RateCellThreeFour) {
  const auto r = invoke({"bound", "rate", "--s", "3", "--L", "4"});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto row = parse_csv(r.out).at(0);
  EXPECT_NEAR(num(row, "value"), 0.1469, 5e-5);
  EXPECT_NEAR(num(row, "argmax_Q"), 0.161, 5e-4);
  EXPECT_LE(std::abs(num(row, "residual")), 1e-10);
}

TEST(CliBound, RateLimitClosedForm) {
  const auto r = invoke({"bound", "rate-inf", "--s", "2"});
  ASSERT_EQ(r.status, 0) << r.err;
  // (s-1)^(s-1)/s^s + 1 = 5/4 at s = 2.
  EXPECT_NEAR(num(parse_csv(r.out).at(0), "value"), std::log2(1.25), 1e-12);
}

TEST(CliBound, FixedQAndExponentAndCriticalRate) {
  const auto fixed = parse_csv(invoke({"bound", "capacity", "--s", "3", "--Q", "0.2"}).out).at(0);
  const auto h = [](double x) { return -x * std::log2(x) - (1 - x) * std::log2(1 - x); };
  const double q0 = 1 - std::pow(0.8, 3);
  EXPECT_NEAR(num(fixed, "value"), h(0.2) - q0 * h(0.2 / q0), 1e-12);

  const auto e = invoke({"bound", "exponent", "--s", "2", "--L", "2", "--R", "0.1"});
  ASSERT_EQ(e.status, 0) << e.err;
  const auto rate = parse_csv(invoke({"bound", "rate", "--s", "2", "--L", "2"}).out).at(0);
  // Linear branch below the critical rate: E = (s+L-1) R_L - L R.
  EXPECT_NEAR(num(parse_csv(e.out).at(0), "value"), 3 * num(rate, "value") - 2 * 0.1, 1e-7);

  const auto rc = invoke({"bound", "rcrit", "--s", "2", "--L", "2"});
  ASSERT_EQ(rc.status, 0) << rc.err;
  EXPECT_NEAR(num(parse_csv(rc.out).at(0), "value"), 0.3355, 5e-4);
}

TEST(CliBound, UsageErrors) {
  auto r = invoke({"bound", "rate", "--s", "2"});
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.err.find("--L"), std::string::npos);
  EXPECT_EQ(invoke({"bound", "exponent", "--s", "2", "--L", "1"}).status, 2);
  EXPECT_EQ(invoke({"bound", "volume", "--s", "2"}).status, 2);
  EXPECT_EQ(invoke({"bound", "capacity"}).status, 2);
  EXPECT_EQ(invoke({"bound", "capacity", "--s", "0"}).status, 2);
  EXPECT_EQ(invoke({"bound", "capacity", "--s", "2", "--Q", "1.5"}).status, 2);
  EXPECT_EQ(invoke({"bound", "capacity", "--s", "two"}).status, 2);
  EXPECT_EQ(invoke({}).status, 2);
  EXPECT_EQ(invoke({"frobnicate"}).status, 2);
  EXPECT_EQ(invoke({"--format", "xml", "bound", "capacity", "--s", "2"}).status, 2);
}

TEST(CliBound, NumericFailureExitsThree) {
  const auto r = invoke({"--max-iter", "1", "bound", "rate", "--s", "2", "--L", "2"});
  EXPECT_EQ(r.status, 3);
  EXPECT_NE(r.err.find("iteration limit 1"), std::string::npos) << r.err;
}

TEST(CliBound, HelpExitsZero) {
  const auto r = invoke({"--help"});
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("simulate"), std::string::npos);
}

TEST(CliBound, StrictAgreesWithDefault) {
  const auto a = parse_csv(invoke({"bound", "rate", "--s", "4", "--L", "3"}).out).at(0);
  const auto b = parse_csv(invoke({"--strict", "bound", "rate", "--s", "4", "--L", "3"}).out).at(0);
  EXPECT_NEAR(num(a, "value"), num(b, "value"), 1e-10);
  EXPECT_NEAR(num(a, "argmax_Q"), num(b, "argmax_Q"), 1e-6);
}

// ------------------------------------------------------------------ format

TEST(CliFormat, AutoPicksTableOnTerminalAndCsvOtherwise) {
  const auto tty = invoke({"bound", "capacity", "--s", "2"}, true);
  const auto pipe = invoke({"bound", "capacity", "--s", "2"}, false);
  EXPECT_EQ(tty.out.rfind("bound\n", 0), 0u);
  EXPECT_EQ(pipe.out.rfind("kind,s,L", 0), 0u);
  const auto forced = invoke({"--format", "csv", "bound", "capacity", "--s", "2"}, true);
  EXPECT_EQ(forced.out, pipe.out);
  // Global options may also follow the subcommand.
  EXPECT_EQ(invoke({"bound", "capacity", "--s", "2", "--format", "csv"}, true).out, pipe.out);
}

TEST(CliFormat, JsonMatchesCsv) {
  const auto csv = parse_csv(invoke({"bound", "rate", "--s", "2", "--L", "5"}).out).at(0);
  const auto j = nlohmann::json::parse(invoke({"--format", "json", "bound", "rate", "--s", "2", "--L", "5"}).out);
  EXPECT_EQ(j["command"], "bound");
  EXPECT_EQ(j["parameters"]["kind"], "rate");
  ASSERT_EQ(j["rows"].size(), 1u);
  EXPECT_NEAR(j["rows"][0]["value"].get<double>(), num(csv, "value"), 1e-11);
  EXPECT_TRUE(j["rows"][0]["Q"].is_null());
}

TEST(CliFormat, OutputFile) {
  TempDir dir;
  const auto path = dir.path("out.csv");
  const auto r = invoke({"--output", path, "bound", "capacity", "--s", "2"}, true);
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  EXPECT_EQ(ss.str(), invoke({"bound", "capacity", "--s", "2"}).out);
  EXPECT_EQ(invoke({"--output", dir.path("missing/dir/x.csv"), "bound", "capacity", "--s", "2"}).status, 2);
}

// ------------------------------------------------------------------ table1

TEST(CliTable1, SelectedCells) {
  const auto r = invoke({"table1", "--cells", "9_6,7_2,C_3"});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_NEAR(num(rows[0], "Q"), 0.062, 5e-3);
  EXPECT_NEAR(num(rows[0], "rate"), 0.0312, 5e-4);
  EXPECT_NEAR(num(rows[0], "critical_rate"), 0.0685, 1e-3);
  EXPECT_EQ(rows[1].at("note"), "excluded: requires external R_1(s)");
  EXPECT_TRUE(rows[1].at("rate").empty());
  EXPECT_EQ(rows[2].at("block"), "capacity");
  EXPECT_NEAR(num(rows[2], "rate"), 0.2455, 5e-4);
  EXPECT_NEAR(num(rows[2], "Q"), 0.2028, 5e-3);
  EXPECT_NEAR(num(rows[2], "critical_rate"), 0.2284, 1e-3);
}

TEST(CliTable1, CsvRoundTripsAtTwelveDigits) {
  const auto csv = invoke({"table1", "--cells", "2_2,3_5,10_10,C_2"}).out;
  const auto j = nlohmann::json::parse(invoke({"--format", "json", "table1", "--cells", "2_2,3_5,10_10,C_2"}).out);
  const auto rows = parse_csv(csv);
  ASSERT_EQ(rows.size(), j["rows"].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (const char* key : {"Q", "rate", "critical_rate"}) {
      const std::string text = rows[i].at(key);
      const double parsed = std::stod(text);
      char again[64];
      std::snprintf(again, sizeof again, "%.12g", parsed);
      EXPECT_EQ(text, again);
      const double full = j["rows"][i][key].get<double>();
      EXPECT_NEAR(parsed, full, 1e-11 * std::abs(full));
    }
  }
}

TEST(CliTable1, BadCellList) {
  EXPECT_EQ(invoke({"table1", "--cells", "1_2"}).status, 2);
  EXPECT_EQ(invoke({"table1", "--cells", "2-2"}).status, 2);
  EXPECT_EQ(invoke({"table1", "--cells", "2_x"}).status, 2);
  EXPECT_EQ(invoke({"table1", "--cells", ""}).status, 2);
}

TEST(CliTable1, ThreadCountDoesNotMatter) {
  const std::vector<std::string> args{"table1", "--cells", "2_3,4_4,6_6,C_5"};
  auto one = args, four = args;
  one.insert(one.begin(), {"--threads", "1"});
  four.insert(four.begin(), {"--threads", "4"});
  EXPECT_EQ(invoke(one).out, invoke(four).out);
}

// ------------------------------------------------------------------- curve

TEST(CliCurve, BranchesSlopesAndConvexity) {
  for (const bool fixed : {false, true}) {
    std::vector<std::string> args{"curve", "--s", "2", "--L", "2", "--r-grid", "0:0.45:46"};
    if (fixed) args.insert(args.end(), {"--q", "fixed", "--Q", "0.25"});
    const auto r = invoke(args);
    ASSERT_EQ(r.status, 0) << r.err;
    const auto rows = parse_csv(r.out);
    ASSERT_EQ(rows.size(), 46u);
    const double cap = num(rows[0], "capacity");
    std::vector<double> E;
    for (const auto& row : rows) {
      const double R = num(row, "R");
      E.push_back(num(row, "E"));
      if (R >= cap) {
        EXPECT_EQ(num(row, "E"), 0.0) << "R=" << R;
      }
      if (row.at("branch") == "linear") {
        EXPECT_EQ(num(row, "dE_dR"), -2.0);
      }
    }
    EXPECT_EQ(rows.front().at("branch"), "linear");
    EXPECT_EQ(rows.back().at("branch"), "zero");
    for (std::size_t i = 1; i + 1 < E.size(); ++i) {
      EXPECT_GE(E[i + 1] - 2 * E[i] + E[i - 1], -1e-9) << "i=" << i;
      EXPECT_LE(E[i + 1], E[i] + 1e-12);
    }
  }
}

TEST(CliCurve, UsageErrors) {
  EXPECT_EQ(invoke({"curve", "--s", "2", "--L", "2", "--q", "fixed"}).status, 2);
  EXPECT_EQ(invoke({"curve", "--s", "2", "--L", "2", "--Q", "0.2"}).status, 2);
  EXPECT_EQ(invoke({"curve", "--s", "2", "--L", "2", "--r-grid", "0:1"}).status, 2);
  EXPECT_EQ(invoke({"curve", "--s", "2", "--L", "2", "--r-grid", "0.3:0.1:5"}).status, 2);
  EXPECT_EQ(invoke({"curve", "--s", "2", "--L", "2", "--r-grid", "0:0.1:0"}).status, 2);
}

// ---------------------------------------------------------------- simulate

TEST(CliSimulate, ExactAgreesWithMonteCarlo) {
  const auto r = invoke({"simulate", "--s", "2", "--L", "2", "--N", "16", "--t", "8", "--w", "4", "--trials",
                         "100000", "--seed", "11"});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto row = parse_csv(r.out).at(0);
  const double exact = num(row, "exact"), mc = num(row, "mc");
  const double sigma = std::sqrt(exact * (1 - exact) / 1e5);
  EXPECT_LE(std::abs(exact - mc), 4 * sigma);
  EXPECT_GE(num(row, "union_bound"), exact);
  EXPECT_LE(num(row, "lower_bound"), exact);
  EXPECT_NEAR(num(row, "log2_exact"), std::log2(exact), 1e-9);
}

TEST(CliSimulate, DeterministicGivenSeed) {
  const std::vector<std::string> args{"simulate", "--s", "3", "--L", "1", "--N", "20", "--R", "0.1", "--Q", "0.2",
                                      "--trials", "20000", "--seed", "5"};
  const auto a = invoke(args), b = invoke(args);
  ASSERT_EQ(a.status, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  auto threaded = args;
  threaded.insert(threaded.begin(), {"--threads", "3"});
  EXPECT_EQ(invoke(threaded).out, a.out);
  auto other = args;
  other.back() = "6";
  EXPECT_NE(invoke(other).out, a.out);
}

TEST(CliSimulate, SizeFromRateAndPrediction) {
  const auto r = invoke({"simulate", "--s", "2", "--L", "1", "--N", "30", "--R", "0.1", "--Q", "0.26", "--mode",
                         "exact"});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto row = parse_csv(r.out).at(0);
  EXPECT_EQ(row.at("t"), "8");
  EXPECT_EQ(row.at("w"), "7");
  EXPECT_TRUE(row.at("mc").empty());
  EXPECT_NEAR(num(row, "predicted"), std::exp2(-30 * num(row, "exponent")),
              1e-10 * num(row, "predicted"));
}

TEST(CliSimulate, UsageErrors) {
  const std::vector<std::string> base{"simulate", "--s", "2", "--L", "1", "--N", "16"};
  auto both = base;
  both.insert(both.end(), {"--t", "8", "--R", "0.1", "--w", "4"});
  EXPECT_EQ(invoke(both).status, 2);
  auto neither = base;
  neither.insert(neither.end(), {"--w", "4"});
  EXPECT_EQ(invoke(neither).status, 2);
  auto weight = base;
  weight.insert(weight.end(), {"--t", "8", "--w", "16"});
  EXPECT_EQ(invoke(weight).status, 2);
  auto budget = base;
  budget[2] = "3";
  budget[6] = "1000";
  budget.insert(budget.end(), {"--t", "8", "--w", "100", "--mode", "exact"});
  const auto r = invoke(budget);
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.err.find("budget"), std::string::npos) << r.err;
}

// ------------------------------------------------------------------ verify

TEST(CliVerify, IdentityPassesAndAllOnesFails) {
  TempDir dir;
  const auto id = dir.write("id.txt", ldlab::io::to_text(ldlab::BinaryCode::identity(6)));
  const auto ones = dir.write("ones.json", ldlab::io::to_json(ldlab::BinaryCode::all_ones(3, 6)));
  for (const auto& sl : std::vector<std::pair<int, int>>{{1, 1}, {2, 1}, {2, 3}, {3, 2}}) {
    const auto s = std::to_string(sl.first), L = std::to_string(sl.second);
    const auto pass = invoke({"verify", id, "--s", s, "--L", L, "--epsilon", "0"});
    EXPECT_EQ(pass.status, 0) << pass.err;
    EXPECT_EQ(parse_csv(pass.out).at(0).at("pass"), "true");
    const auto fail = invoke({"verify", ones, "--s", s, "--L", L});
    EXPECT_EQ(fail.status, 1);
    EXPECT_EQ(num(parse_csv(fail.out).at(0), "epsilon"), 1.0);
  }
}

TEST(CliVerify, FourColumnInstance) {
  TempDir dir;
  const auto X = ldlab::BinaryCode::from_columns({"1100", "0110", "1010", "0001"});
  const auto path = dir.write("four.txt", ldlab::io::to_text(X));
  // By hand over the six pairs: {0,1}, {0,2} and {1,2} each cover the third
  // of columns 0..2; no pair containing column 3 covers anything.
  const auto r = invoke({"verify", path, "--s", "2", "--L", "1", "--epsilon", "0.5"});
  EXPECT_EQ(r.status, 0) << r.err;
  const auto row = parse_csv(r.out).at(0);
  EXPECT_EQ(row.at("bad"), "3");
  EXPECT_EQ(row.at("total"), "6");
  EXPECT_DOUBLE_EQ(num(row, "epsilon"), 3.0 / 6.0);
  EXPECT_EQ(row.at("witness_S"), "0 1");
  EXPECT_EQ(row.at("witness_Lambda"), "2");
  EXPECT_EQ(invoke({"verify", path, "--s", "2", "--L", "1", "--epsilon", "0.4"}).status, 1);
}

TEST(CliVerify, SampledMode) {
  TempDir dir;
  const auto path = dir.write("ones.txt", ldlab::io::to_text(ldlab::BinaryCode::all_ones(4, 200)));
  const auto r = invoke({"verify", path, "--s", "3", "--L", "2", "--mode", "sampled", "--samples", "5000"});
  EXPECT_EQ(r.status, 1);
  const auto row = parse_csv(r.out).at(0);
  EXPECT_EQ(row.at("total"), "5000");
  EXPECT_EQ(num(row, "stderr"), 0.0);
}

TEST(CliVerify, ErrorsExitTwo) {
  TempDir dir;
  const auto bad = dir.write("bad.txt", "3 3\n100\n01x\n001\n");
  auto r = invoke({"verify", bad, "--s", "1", "--L", "1"});
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;

  EXPECT_EQ(invoke({"verify", dir.path("absent.txt"), "--s", "1", "--L", "1"}).status, 2);

  const auto big = dir.write("big.txt", ldlab::io::to_text(ldlab::BinaryCode::identity(60)));
  r = invoke({"verify", big, "--s", "3", "--L", "1", "--budget", "1000"});
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.err.find("--mode sampled"), std::string::npos) << r.err;

  const auto id = dir.write("id.txt", ldlab::io::to_text(ldlab::BinaryCode::identity(4)));
  EXPECT_EQ(invoke({"verify", id, "--s", "3", "--L", "2"}).status, 2);
  EXPECT_EQ(invoke({"verify", id, "--s", "1", "--L", "1", "--epsilon", "1"}).status, 2);
}
