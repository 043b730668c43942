#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dorb/schedulers.hpp"

namespace dorb {

// Trace CSV layout, one row per evaluation event:
//   step,controller_index,arm,p_0..p_{K-1},raw_m_0..raw_m_{K-1},scaled_r
// controller_index is empty outside HM runs; scaled_r is empty when no
// bandit reward was fed at that event. Reals use the shortest round-trip
// decimal form.
std::vector<std::string> trace_header(std::size_t num_metrics);

void write_trace(std::ostream& out, const RunLog& log);
void write_trace(const std::filesystem::path& path, const RunLog& log);

struct TraceRow {
  std::size_t step = 0;
  std::optional<std::size_t> controller;
  std::size_t arm = 0;
  std::vector<double> probabilities;
  std::vector<double> raw;
  std::optional<double> scaled_reward;
};

struct Trace {
  std::vector<std::string> header;
  std::vector<TraceRow> rows;
};

Trace read_trace(std::istream& in);
Trace read_trace(const std::filesystem::path& path);

bool is_simplex(std::span<const double> p, double tolerance = 1e-6);

std::string format_real(double value);

}  // namespace dorb
