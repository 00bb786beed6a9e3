#include "pnopt/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace pnopt {

ParseError::ParseError(std::size_t line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

namespace {

bool parse_double(std::string_view token, double& out) {
  if (token.empty()) return false;
  if (token.front() == '+') token.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc() && ptr == token.data() + token.size();
}

bool parse_index(std::string_view token, long long& out) {
  if (token.empty()) return false;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc() && ptr == token.data() + token.size();
}

std::vector<std::string_view> split_whitespace(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) tokens.push_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

bool skippable(std::string_view line) {
  for (char c : line) {
    if (c == '#') return true;
    if (c != ' ' && c != '\t' && c != '\r') return false;
  }
  return true;
}

}  // namespace

LibsvmRecord parse_libsvm_line(const std::string& line, std::size_t line_number) {
  const auto tokens = split_whitespace(line);
  if (tokens.empty()) throw ParseError(line_number, "empty record");
  LibsvmRecord rec;
  if (!parse_double(tokens[0], rec.label)) {
    throw ParseError(line_number, "non-numeric label '" + std::string(tokens[0]) + "'");
  }
  long long previous = 0;
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    const auto tok = tokens[i];
    const auto colon = tok.find(':');
    if (colon == std::string_view::npos) {
      throw ParseError(line_number, "expected index:value, got '" + std::string(tok) + "'");
    }
    long long index = 0;
    double value = 0.0;
    if (!parse_index(tok.substr(0, colon), index) || index < 1) {
      throw ParseError(line_number, "bad feature index in '" + std::string(tok) + "'");
    }
    if (!parse_double(tok.substr(colon + 1), value)) {
      throw ParseError(line_number, "non-numeric value in '" + std::string(tok) + "'");
    }
    if (index <= previous) {
      throw ParseError(line_number, "feature indices must be strictly increasing");
    }
    previous = index;
    rec.entries.emplace_back(static_cast<Eigen::Index>(index - 1), value);
  }
  return rec;
}

LibsvmData parse_libsvm(std::istream& in, std::optional<Eigen::Index> n_features) {
  std::vector<LibsvmRecord> records;
  Eigen::Index max_index = 0;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (skippable(line)) continue;
    auto rec = parse_libsvm_line(line, line_number);
    if (!rec.entries.empty()) {
      const Eigen::Index top = rec.entries.back().first + 1;
      if (n_features && top > *n_features) {
        throw ParseError(line_number, "feature index exceeds declared feature count");
      }
      max_index = std::max(max_index, top);
    }
    records.push_back(std::move(rec));
  }
  if (records.empty()) throw ParseError(line_number, "no records");

  LibsvmData data;
  data.n_features = n_features.value_or(max_index);
  const auto rows = static_cast<Eigen::Index>(records.size());
  data.labels.resize(rows);
  data.design = Matrix::Zero(rows, data.n_features);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& rec = records[static_cast<std::size_t>(i)];
    data.labels[i] = rec.label;
    for (const auto& [j, v] : rec.entries) data.design(i, j) = v;
  }
  return data;
}

LibsvmData read_libsvm(const std::filesystem::path& path, std::optional<Eigen::Index> n_features) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_libsvm(in, n_features);
}

void write_libsvm(std::ostream& out, const Vector& labels, const Matrix& design) {
  require_dim(labels.size(), design.rows(), "write_libsvm");
  for (Eigen::Index i = 0; i < design.rows(); ++i) {
    out << format_real(labels[i]);
    for (Eigen::Index j = 0; j < design.cols(); ++j) {
      if (design(i, j) != 0.0) out << ' ' << (j + 1) << ':' << format_real(design(i, j));
    }
    out << '\n';
  }
}

Matrix parse_dense_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (skippable(line)) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      const auto tokens = split_whitespace(cell);
      double v = 0.0;
      if (tokens.size() != 1 || !parse_double(tokens[0], v)) {
        throw ParseError(line_number, "non-numeric cell '" + cell + "'");
      }
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError(line_number, "ragged row");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(line_number, "no rows");
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

Matrix read_dense_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_dense_csv(in);
}

std::string format_real(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  if (ec != std::errc()) throw IoError("format_real: conversion failed");
  return std::string(buf, ptr);
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace) {
  out << kTraceHeader << '\n';
  for (const auto& r : trace) {
    out << r.iter << ',' << format_real(r.step) << ',' << format_real(r.f) << ','
        << format_real(r.norm_gf) << ',' << format_real(r.predicted_decrease) << ','
        << format_real(r.eta) << ',' << r.inner_iterations << ',' << r.cum_fev << ','
        << r.cum_gev << ',' << r.cum_prox << ',' << format_real(r.elapsed_sec) << '\n';
  }
}

std::string summary_json(const SolveReport& report) {
  nlohmann::json j;
  j["status"] = to_string(report.status);
  j["f_final"] = report.f_final;
  j["norm_Gf_final"] = report.norm_gf_final;
  j["method"] = report.method;
  j["policy"] = report.policy;
  j["seed"] = report.seed;
  j["wall_sec"] = report.wall_sec;
  return j.dump(2) + "\n";
}

std::filesystem::path summary_path_for(const std::filesystem::path& trace_path) {
  auto out = trace_path;
  out.replace_extension(".json");
  return out;
}

void write_trace(const SolveReport& report, const std::filesystem::path& path) {
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write trace " + path.string());
    write_trace_csv(out, report.trace);
    if (!out) throw IoError("write failed for " + path.string());
  }
  const auto summary = summary_path_for(path);
  std::ofstream out(summary, std::ios::binary);
  if (!out) throw IoError("cannot write summary " + summary.string());
  out << summary_json(report);
  if (!out) throw IoError("write failed for " + summary.string());
}

}  // namespace pnopt
