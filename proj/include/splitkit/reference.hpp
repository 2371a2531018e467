#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "splitkit/bench.hpp"

namespace splitkit {

// CSV with '#' comment lines and a header row; cells kept as text.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
};

CsvTable read_csv_table(const std::string& path);

// Acceptance band for a tabulated mean: one published standard deviation,
// but never tighter than this absolute floor.
constexpr double kReferenceFloor = 5e-3;

struct ReproduceOptions {
  std::string table_dir;
  std::size_t n = 100;
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  std::size_t threads = 0;
};

struct ReproduceResult {
  bool pass = false;
  std::string report;  // human readable comparison
  std::string csv;     // computed values
};

const std::vector<std::string>& reproduce_targets();
ReproduceResult reproduce(const std::string& target, const ReproduceOptions& opts);

// Smallest phi at which the method's radius reaches 1, by a scan and
// bisection on [lo, hi]; negative when it stays below 1.
double crossing_phi(MatrixClass cls, std::size_t n, std::uint64_t seed, const MethodSpec& method, double lo,
                    double hi);

}  // namespace splitkit
