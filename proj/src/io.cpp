#include "burg/io.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "burg/errors.hpp"

namespace burg {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

Csv::Csv(std::vector<std::string> columns) : columns_(std::move(columns)) {}

Csv& Csv::cell(double v) {
  cells_.push_back(format_double(v));
  return *this;
}
Csv& Csv::cell(std::int64_t v) {
  cells_.push_back(std::to_string(v));
  return *this;
}
Csv& Csv::cell(const std::string& v) {
  if (v.find_first_of(",\"\n") == std::string::npos) {
    cells_.push_back(v);
    return *this;
  }
  std::string q = "\"";
  for (char c : v) {
    if (c == '"') q += '"';
    q += c;
  }
  q += '"';
  cells_.push_back(std::move(q));
  return *this;
}

void Csv::end_row() {
  require(cells_.size() == columns_.size(), Err::config_invalid,
          "row width does not match header");
  for (size_t i = 0; i < cells_.size(); ++i) {
    rows_ += cells_[i];
    rows_ += (i + 1 == cells_.size()) ? '\n' : ',';
  }
  cells_.clear();
}

std::string Csv::body() const {
  std::string out;
  for (size_t i = 0; i < columns_.size(); ++i) {
    out += columns_[i];
    out += (i + 1 == columns_.size()) ? '\n' : ',';
  }
  out += rows_;
  return out;
}

void Csv::write_file(const std::string& path) const { burg::write_file(path, body()); }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Err::io_error, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) fail(Err::io_error, "read failed for " + path);
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Err::io_error, "cannot open " + path + " for writing");
  out << content;
  out.flush();
  if (!out) fail(Err::io_error, "write failed for " + path);
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs < 1) jobs = 1;
  if (jobs == 1 || n < 256) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  constexpr std::size_t chunk = 128;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t lo = next.fetch_add(chunk);
      if (lo >= n) return;
      const std::size_t hi = std::min(n, lo + chunk);
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    }
  };
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

}  // namespace burg
