#include "sadp/trace.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace sadp {

namespace {

void put(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf;
}

void put_all(std::ostream& out, const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out << ',';
    put(out, v(i));
  }
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

double parse_cell(const std::string& s) {
  // strtod reads the "nan" and "inf" spellings printf produces.
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw TraceIoError("malformed trace cell '" + s + "'");
  return v;
}

}  // namespace

std::string trace_header(Eigen::Index n, Eigen::Index m) {
  std::string h = "t";
  for (Eigen::Index i = 1; i <= n; ++i) h += ",x" + std::to_string(i);
  for (Eigen::Index i = 1; i <= n; ++i) h += ",y" + std::to_string(i);
  for (Eigen::Index i = 1; i <= m; ++i) h += ",u" + std::to_string(i);
  h += ",r,q_hat,bellman_err_final";
  for (Eigen::Index i = 1; i <= n; ++i) {
    for (Eigen::Index j = 1; j <= n; ++j) h += ",a" + std::to_string(i) + std::to_string(j);
  }
  for (Eigen::Index i = 1; i <= n; ++i) {
    for (Eigen::Index j = 1; j <= m; ++j) h += ",b" + std::to_string(i) + std::to_string(j);
  }
  return h;
}

void write_trace(const SimTrace& trace, std::ostream& out) {
  out << trace_header(trace.n, trace.m) << '\n';
  for (const TraceRecord& rec : trace.records) {
    put(out, rec.t);
    put_all(out, rec.x_true);
    put_all(out, rec.y);
    put_all(out, rec.u);
    for (double v : {rec.r, rec.q_hat, rec.bellman_err_final}) {
      out << ',';
      put(out, v);
    }
    put_all(out, rec.vec_a);
    put_all(out, rec.vec_b);
    out << '\n';
  }
}

void write_trace(const SimTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw TraceIoError("cannot open " + path.string() + " for writing");
  write_trace(trace, out);
  out.flush();
  if (!out) throw TraceIoError("failed writing " + path.string());
}

void write_bellman_errors(const SimTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw TraceIoError("cannot open " + path.string() + " for writing");
  out << "step,iteration,bellman_err\n";
  for (std::size_t k = 0; k < trace.records.size(); ++k) {
    const auto& errors = trace.records[k].bellman_errors;
    for (std::size_t i = 0; i < errors.size(); ++i) {
      out << k << ',' << i << ',';
      put(out, errors[i]);
      out << '\n';
    }
  }
  out.flush();
  if (!out) throw TraceIoError("failed writing " + path.string());
}

SimTrace read_trace(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw TraceIoError("empty trace file");
  const auto header = split_csv(line);
  SimTrace trace;
  for (const auto& col : header) {
    if (col.size() >= 2 && col[0] == 'x') ++trace.n;
    if (col.size() >= 2 && col[0] == 'u') ++trace.m;
  }
  if (trace.n == 0 || trace.m == 0 || header != split_csv(trace_header(trace.n, trace.m))) {
    throw TraceIoError("unrecognised trace header");
  }
  const Eigen::Index n = trace.n;
  const Eigen::Index m = trace.m;
  auto take = [](const std::vector<std::string>& cells, std::size_t& pos, Eigen::Index count) {
    Vector v(count);
    for (Eigen::Index i = 0; i < count; ++i) v(i) = parse_cell(cells[pos++]);
    return v;
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) throw TraceIoError("trace row has wrong column count");
    TraceRecord rec;
    std::size_t pos = 0;
    rec.t = parse_cell(cells[pos++]);
    rec.x_true = take(cells, pos, n);
    rec.y = take(cells, pos, n);
    rec.u = take(cells, pos, m);
    rec.r = parse_cell(cells[pos++]);
    rec.q_hat = parse_cell(cells[pos++]);
    rec.bellman_err_final = parse_cell(cells[pos++]);
    rec.vec_a = take(cells, pos, n * n);
    rec.vec_b = take(cells, pos, n * m);
    trace.records.push_back(std::move(rec));
  }
  return trace;
}

SimTrace read_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TraceIoError("cannot open " + path.string());
  return read_trace(in);
}

}  // namespace sadp
