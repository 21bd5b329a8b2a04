#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace burg {

// Shortest round-trip decimal representation (deterministic across runs).
std::string format_double(double v);

// CSV table with deterministic body bytes for identical payloads.
class Csv {
 public:
  explicit Csv(std::vector<std::string> columns);
  Csv& cell(double v);
  Csv& cell(std::int64_t v);
  Csv& cell(const std::string& v);
  void end_row();
  std::string body() const;  // header line + rows
  void write_file(const std::string& path) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::string> cells_;
  std::string rows_;
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// Index-parallel loop; every iteration writes only to its own slot, so the
// result is identical for any worker count.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace burg
