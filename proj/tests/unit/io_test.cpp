#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "pnopt/io.hpp"
#include "pnopt/random.hpp"

using namespace pnopt;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "pnopt_io_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

LibsvmData parse(const std::string& text, std::optional<Eigen::Index> n = std::nullopt) {
  std::istringstream in(text);
  return parse_libsvm(in, n);
}

std::size_t parse_error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

std::vector<TraceRecord> golden_rows() {
  std::vector<TraceRecord> rows(3);
  rows[0] = {1, 1.0, 0.5, 0.25, -0.125, 0.1, 10, 3, 2, 11, 0.0, 0};
  rows[1] = {2, 0.5, 0.375, 1e-3, -2.5e-4, 0.05, 7, 6, 3, 19, 0.0, 1};
  rows[2] = {3, 1.0, 1.0 / 3.0, 1e-9, -1e-17, 1e-10, 12, 7, 4, 32, 0.0, 0};
  return rows;
}

}  // namespace

TEST(Libsvm, ParsesRecordIntoDenseRow) {
  const auto d = parse("1 1:0.5 3:-2\n");
  EXPECT_EQ(d.n_features, 3);
  EXPECT_EQ(d.labels[0], 1.0);
  EXPECT_EQ(d.design.row(0), (Eigen::RowVectorXd(3) << 0.5, 0.0, -2.0).finished());
}

TEST(Libsvm, SkipsCommentsAndBlankLines) {
  const auto d = parse("# header\n\n-1 2:1e-3\n   \n+1 1:4\n");
  EXPECT_EQ(d.labels, (Vector(2) << -1.0, 1.0).finished());
  EXPECT_EQ(d.design(0, 1), 1e-3);
  EXPECT_EQ(d.design(1, 0), 4.0);
}

TEST(Libsvm, DeclaredFeatureCountPadsAndBounds) {
  EXPECT_EQ(parse("0 2:1\n", 5).design.cols(), 5);
  EXPECT_THROW(parse("0 6:1\n", 5), ParseError);
}

TEST(Libsvm, ErrorsCarryLineNumbers) {
  EXPECT_EQ(parse_error_line("1 1:2\nx 1:2\n"), 2u);
  EXPECT_EQ(parse_error_line("1 1:2\n1 1:abc\n"), 2u);
  EXPECT_EQ(parse_error_line("1 3:2 2:1\n"), 1u);
  EXPECT_EQ(parse_error_line("1 2:2 2:1\n"), 1u);
  EXPECT_EQ(parse_error_line("# only\n1 0:1\n"), 2u);
  EXPECT_EQ(parse_error_line("1 1-2\n"), 1u);
  EXPECT_THROW(parse(""), ParseError);
}

TEST(Libsvm, WriteThenParseIsBitwiseEqual) {
  Rng rng(1);
  Matrix design = Matrix::Zero(40, 9);
  Vector labels(40);
  for (Eigen::Index i = 0; i < 40; ++i) {
    labels[i] = rng.uniform() < 0.5 ? 0.0 : 1.0;
    for (Eigen::Index j = 0; j < 9; ++j)
      if (rng.uniform() < 0.4) design(i, j) = rng.normal() * std::pow(10.0, rng.uniform(-300, 300));
  }
  std::ostringstream out;
  write_libsvm(out, labels, design);
  const auto back = parse(out.str(), 9);
  EXPECT_EQ(back.design, design);
  EXPECT_EQ(back.labels, labels);
}

TEST(Libsvm, MissingFileIsIoError) {
  EXPECT_THROW(read_libsvm("/nonexistent/pnopt.svm"), IoError);
}

TEST(DenseCsv, ParsesRowsAndRejectsRaggedInput) {
  std::istringstream ok("1,2\n3,4.5\n");
  EXPECT_EQ(parse_dense_csv(ok), (Matrix(2, 2) << 1, 2, 3, 4.5).finished());
  std::istringstream ragged("1,2\n3\n");
  EXPECT_THROW(parse_dense_csv(ragged), ParseError);
}

TEST(FormatReal, RoundTripsDoubles) {
  Rng rng(2);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.normal() * std::pow(10.0, rng.uniform(-200, 200));
    EXPECT_EQ(std::stod(format_real(v)), v);
  }
  EXPECT_EQ(format_real(1.0), "1");
  EXPECT_EQ(format_real(0.1), "0.10000000000000001");
}

TEST(Trace, MatchesGoldenFile) {
  std::ostringstream out;
  write_trace_csv(out, golden_rows());
  EXPECT_EQ(out.str(), slurp(std::filesystem::path(PNOPT_FIXTURE_DIR) / "golden_trace.csv"));
}

TEST(Trace, EmptyTraceWritesHeaderAndValidSummary) {
  SolveReport r;
  r.status = SolveStatus::Converged;
  r.method = "prox-newton";
  r.policy = "exact";
  const auto path = scratch("empty.csv");
  write_trace(r, path);
  EXPECT_EQ(slurp(path), std::string(kTraceHeader) + "\n");
  const auto j = nlohmann::json::parse(slurp(summary_path_for(path)));
  EXPECT_EQ(j.at("status"), "converged");
}

TEST(Trace, SummaryParsesBackThroughJson) {
  SolveReport r;
  r.status = SolveStatus::MaxIterations;
  r.f_final = 1.0 / 3.0;
  r.norm_gf_final = 2.5e-9;
  r.method = "prox-bfgs";
  r.policy = "fixed:10";
  r.seed = 42;
  r.wall_sec = 0.125;
  const auto j = nlohmann::json::parse(summary_json(r));
  EXPECT_EQ(j.size(), 7u);
  EXPECT_EQ(j.at("status"), "max-iterations");
  EXPECT_EQ(j.at("f_final").get<double>(), 1.0 / 3.0);
  EXPECT_EQ(j.at("norm_Gf_final").get<double>(), 2.5e-9);
  EXPECT_EQ(j.at("method"), "prox-bfgs");
  EXPECT_EQ(j.at("policy"), "fixed:10");
  EXPECT_EQ(j.at("seed").get<int>(), 42);
  EXPECT_EQ(j.at("wall_sec").get<double>(), 0.125);
}

TEST(Trace, UnwritablePathIsIoError) {
  EXPECT_THROW(write_trace(SolveReport{}, "/nonexistent/dir/t.csv"), IoError);
}
