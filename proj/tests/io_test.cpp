#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "bnpcc/io.hpp"

namespace {

using namespace bnpcc;
namespace fs = std::filesystem;

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("bnpcc_io_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void write(const std::string& name, const std::string& text) const { std::ofstream(path(name)) << text; }

  fs::path dir_;
};

TEST(ParseCsv, HeaderRowsCommentsAndBlanks) {
  std::istringstream in("# comment\na, b ,c\n1,2.5,-3e2\n\n4,,6\n");
  const CsvTable t = parse_csv(in);
  EXPECT_EQ(t.header, (std::vector<std::string>{"a", "b", "c"}));
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0][2], -300.0);
  EXPECT_TRUE(std::isnan(t.rows[1][1]));
  EXPECT_EQ(*t.column("c"), 2u);
  EXPECT_FALSE(t.column("d").has_value());
}

TEST(ParseCsv, Errors) {
  std::istringstream ragged("a,b\n1,2,3\n");
  EXPECT_THROW(parse_csv(ragged), ValidationError);
  std::istringstream text("a,b\n1,abc\n");
  EXPECT_THROW(parse_csv(text), ValidationError);
  std::istringstream empty("");
  EXPECT_THROW(parse_csv(empty), ValidationError);
}

TEST_F(TempDir, LoadInputDetectsLayout) {
  write("raw.csv", "y1,y2,x\n1,2,0\n3,1,1\n2,5,2\n");
  write("pseudo.csv", "x,u,v\n0,0.25,0.5\n1,0.75,0.25\n");
  write("nox.csv", "y1,y2\n1,2\n3,4\n");
  write("nan.csv", "u,v,x\n0.5,,1\n0.2,0.3,2\n");
  const auto raw = load_input(path("raw.csv"));
  EXPECT_FALSE(raw.is_pseudo);
  EXPECT_EQ(raw.raw.y2, (std::vector<double>{2.0, 1.0, 5.0}));
  const auto pseudo = load_input(path("pseudo.csv"));
  EXPECT_TRUE(pseudo.is_pseudo);
  EXPECT_EQ(pseudo.pseudo.u, (std::vector<double>{0.25, 0.75}));
  try {
    load_input(path("nox.csv"));
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("missing column 'x'"), std::string::npos);
  }
  EXPECT_THROW(load_input(path("nan.csv")), ValidationError);
  EXPECT_THROW(load_input(path("absent.csv")), ValidationError);
}

TEST_F(TempDir, PseudoCsvRoundTrip) {
  const PseudoDataset d{{0.1, 0.123456789012345678}, {0.9, 1.0 / 3.0}, {-2.0, 1e-7}};
  write_pseudo_csv(path("p.csv"), d);
  const auto back = load_input(path("p.csv"));
  EXPECT_EQ(back.pseudo.u, d.u);
  EXPECT_EQ(back.pseudo.v, d.v);
  EXPECT_EQ(back.pseudo.x, d.x);
}

ChainTrace sample_trace(CalibrationSpec spec) {
  ChainTrace trace{spec, {}, {}, 0.0};
  for (std::size_t t = 0; t < 3; ++t) {
    TraceDraw d;
    d.iteration = 10 + t;
    const std::size_t k = t + 1;
    for (std::size_t j = 0; j < k; ++j) {
      d.weights.push_back(1.0 / (k + 1.0) + 1e-17 * j);
      d.occupancy.push_back(j == 0 ? 5 : 0);
      std::vector<double> b(spec.dim());
      for (std::size_t c = 0; c < b.size(); ++c) b[c] = std::sqrt(2.0) * (j + 1) - 0.1 * c;
      d.atoms.emplace_back(std::move(b));
    }
    d.occupied = 1;
    trace.draws.push_back(std::move(d));
  }
  return trace;
}

TEST_F(TempDir, TraceCsvRoundTripIsExact) {
  for (auto family : {CalibrationFamily::Quadratic, CalibrationFamily::ExpBump}) {
    const ChainTrace trace = sample_trace(CalibrationSpec(family));
    write_trace_csv(path("trace.csv"), trace);
    const ChainTrace back = read_trace_csv(path("trace.csv"));
    EXPECT_EQ(back.spec, trace.spec);
    ASSERT_EQ(back.size(), trace.size());
    for (std::size_t t = 0; t < trace.size(); ++t) {
      EXPECT_EQ(back.draws[t].iteration, trace.draws[t].iteration);
      EXPECT_EQ(back.draws[t].occupied, trace.draws[t].occupied);
      EXPECT_EQ(back.draws[t].weights, trace.draws[t].weights);
      EXPECT_EQ(back.draws[t].occupancy, trace.draws[t].occupancy);
      EXPECT_EQ(back.draws[t].atoms, trace.draws[t].atoms);
    }
  }
}

TEST_F(TempDir, TraceHeaderLayout) {
  std::ostringstream out;
  write_trace_csv(out, sample_trace(CalibrationSpec(CalibrationFamily::Quadratic)));
  const std::string text = out.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "iter,dstar,k,w1,w2,w3,n1,n2,n3,b1_1,b1_2,b2_1,b2_2,b3_1,b3_2");
}

TEST_F(TempDir, MalformedTraceRejected) {
  write("t1.csv", "iter,dstar,k,w1,n1,b1_1,b1_2,b1_3\n1,1,1,0.5,3,1,2,3\n");
  write("t2.csv", "iter,dstar,k,w1,n1,b1_1,b1_2\n1,1,2,0.5,3,1,2\n");
  write("t3.csv", "iter,dstar,k,w1,n1,b1_1,b1_2\n1,1,1,,3,1,2\n");
  write("t4.csv", "iter,w1\n1,0.5\n");
  for (const char* name : {"t1.csv", "t2.csv", "t3.csv", "t4.csv"})
    EXPECT_THROW(read_trace_csv(path(name)), ValidationError) << name;
}

TEST_F(TempDir, SummaryOutputsParseBack) {
  TauCurve curve{{-1.0, 1.0}, {0.2, 0.3}, {0.1, 0.2}, {0.3, 0.4}};
  write_tau_curve_csv(path("tau.csv"), curve);
  const auto t = read_csv(path("tau.csv"));
  EXPECT_EQ(t.header, (std::vector<std::string>{"x", "mean", "lower95", "upper95"}));
  EXPECT_EQ(t.values(1), curve.mean);

  write_summary_csv(path("summary.csv"), SummaryStats{1, 2, 3, 3.5, 4, 9});
  const auto s = read_csv(path("summary.csv"));
  EXPECT_EQ(s.rows[0], (std::vector<double>{1, 2, 3, 3.5, 4, 9}));

  const std::vector<PredictiveDraw> draws{{0.0, 0.25, 0.75}};
  const std::vector<double> y1{10.0, 20.0, 30.0}, y2{-1.0, -2.0, -3.0};
  write_predictive_csv(path("pred.csv"), draws, &y1, &y2);
  const auto p = read_csv(path("pred.csv"));
  EXPECT_EQ(p.rows[0], (std::vector<double>{0.0, 0.25, 0.75, 10.0, -1.0}));
}

}  // namespace
