#include "dorb/trace_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dorb {

std::string format_real(double value) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

std::vector<std::string> trace_header(std::size_t num_metrics) {
  std::vector<std::string> header{"step", "controller_index", "arm"};
  for (std::size_t i = 0; i < num_metrics; ++i) header.push_back("p_" + std::to_string(i));
  for (std::size_t i = 0; i < num_metrics; ++i) header.push_back("raw_m_" + std::to_string(i));
  header.push_back("scaled_r");
  return header;
}

void write_trace(std::ostream& out, const RunLog& log) {
  const auto header = trace_header(log.metric_names.size());
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& r : log.records) {
    out << r.step << ',';
    if (r.controller) out << *r.controller;
    out << ',' << r.arm;
    for (double p : r.probabilities) out << ',' << format_real(p);
    for (double m : r.raw) out << ',' << format_real(m);
    out << ',';
    if (r.bandit_reward) out << format_real(*r.bandit_reward);
    out << '\n';
  }
}

void write_trace(const std::filesystem::path& path, const RunLog& log) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write trace " + path.string());
  write_trace(out, log);
  if (!out) throw std::runtime_error("failed writing trace " + path.string());
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_real(const std::string& text) {
  double value = 0.0;
  const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  if (result.ec != std::errc() || result.ptr != text.data() + text.size()) {
    throw std::invalid_argument("trace: malformed number '" + text + "'");
  }
  return value;
}

std::size_t parse_index(const std::string& text) {
  std::size_t value = 0;
  const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  if (result.ec != std::errc() || result.ptr != text.data() + text.size()) {
    throw std::invalid_argument("trace: malformed integer '" + text + "'");
  }
  return value;
}

}  // namespace

Trace read_trace(std::istream& in) {
  Trace trace;
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("trace: missing header");
  trace.header = split_csv(line);
  if (trace.header.size() < 4 || (trace.header.size() - 4) % 2 != 0) {
    throw std::invalid_argument("trace: unexpected header");
  }
  const std::size_t k = (trace.header.size() - 4) / 2;
  if (trace.header != trace_header(k)) throw std::invalid_argument("trace: unexpected header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != trace.header.size()) throw std::invalid_argument("trace: row has the wrong column count");
    TraceRow row;
    row.step = parse_index(fields[0]);
    if (!fields[1].empty()) row.controller = parse_index(fields[1]);
    row.arm = parse_index(fields[2]);
    for (std::size_t i = 0; i < k; ++i) row.probabilities.push_back(parse_real(fields[3 + i]));
    for (std::size_t i = 0; i < k; ++i) row.raw.push_back(parse_real(fields[3 + k + i]));
    if (!fields.back().empty()) row.scaled_reward = parse_real(fields.back());
    trace.rows.push_back(std::move(row));
  }
  return trace;
}

Trace read_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read trace " + path.string());
  return read_trace(in);
}

bool is_simplex(std::span<const double> p, double tolerance) {
  if (p.empty()) return false;
  double total = 0.0;
  for (double v : p) {
    if (!std::isfinite(v) || v < -tolerance || v > 1.0 + tolerance) return false;
    total += v;
  }
  return std::abs(total - 1.0) <= tolerance;
}

}  // namespace dorb
