#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "sadp/plant.hpp"

namespace sadp {

class TraceIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TraceRecord {
  double t = 0.0;
  Vector x_true;
  Vector y;  // measured state
  Vector u;  // applied control
  double r = 0.0;
  double q_hat = 0.0;
  double bellman_err_final = 0.0;  // NaN for controllers without a critic
  std::vector<double> bellman_errors;
  Vector vec_a;  // row-major
  Vector vec_b;  // row-major
};

enum class RunStatus { ok, diverged };

struct SimTrace {
  Eigen::Index n = 0;
  Eigen::Index m = 0;
  std::vector<TraceRecord> records;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  RunStatus status = RunStatus::ok;
  std::string failure;  // set when status != ok
};

/// `t, x1.., y1.., u1.., r, q_hat, bellman_err_final, a11..ann, b11..bnm`
std::string trace_header(Eigen::Index n, Eigen::Index m);

/// CSV with a header row and one row per record; 17 significant digits.
void write_trace(const SimTrace& trace, std::ostream& out);
void write_trace(const SimTrace& trace, const std::filesystem::path& path);

/// Per-iteration critic errors as `step, iteration, bellman_err`.
void write_bellman_errors(const SimTrace& trace, const std::filesystem::path& path);

/// Parses a file produced by write_trace. Per-iteration Bellman errors and
/// run metadata are not part of the CSV and come back empty.
SimTrace read_trace(std::istream& in);
SimTrace read_trace(const std::filesystem::path& path);

}  // namespace sadp
