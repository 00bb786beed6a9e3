#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pnopt/driver.hpp"

namespace pnopt {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& message);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One data line: 1-based indices on the wire, 0-based here.
struct LibsvmRecord {
  double label = 0.0;
  std::vector<std::pair<Eigen::Index, double>> entries;
};

struct LibsvmData {
  Vector labels;
  Matrix design;
  Eigen::Index n_features = 0;
};

/// Blank lines and lines starting with '#' are skipped. Feature count is the
/// largest index seen unless n_features is given (larger indices are errors).
LibsvmData parse_libsvm(std::istream& in, std::optional<Eigen::Index> n_features = std::nullopt);
LibsvmData read_libsvm(const std::filesystem::path& path,
                       std::optional<Eigen::Index> n_features = std::nullopt);
LibsvmRecord parse_libsvm_line(const std::string& line, std::size_t line_number);

/// Writes nonzero entries only, reals in 17 significant digits.
void write_libsvm(std::ostream& out, const Vector& labels, const Matrix& design);

/// Comma separated dense matrix, one row per line.
Matrix read_dense_csv(const std::filesystem::path& path);
Matrix parse_dense_csv(std::istream& in);

/// General format with 17 significant digits, enough to round-trip a double.
std::string format_real(double value);

inline constexpr const char* kTraceHeader =
    "iter,t,f,norm_Gf,lambda_pred,eta,inner_iters,cum_fev,cum_gev,cum_prox,elapsed_sec";

void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace);
std::string summary_json(const SolveReport& report);

/// Writes the CSV at path and the JSON summary next to it (extension .json).
void write_trace(const SolveReport& report, const std::filesystem::path& path);
std::filesystem::path summary_path_for(const std::filesystem::path& trace_path);

}  // namespace pnopt
