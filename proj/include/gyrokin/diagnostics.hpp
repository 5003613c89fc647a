#pragma once

#include <fstream>
#include <string>

#include "gyrokin/grid.hpp"
#include "gyrokin/solver.hpp"

namespace gyrokin {

// Frozen diagnostics column set; consumers key on this exact header line.
extern const char* const kDiagnosticsHeader;

// Streams diagnostics rows to a CSV file, header written on open, one row
// per record with shortest round-trip number formatting.
class DiagnosticsCsv {
 public:
  explicit DiagnosticsCsv(const std::string& path);
  void append(const DiagnosticsRecord& rec);

 private:
  std::ofstream out_;
};

std::string format_diagnostics_row(const DiagnosticsRecord& rec);

// Snapshot pair written into `dir`: snapshot_NNNN.bin holds the density as
// row-major 64-bit little-endian floats in axis order [y1][y2][x3][r][v3]
// (transposed from the in-memory fiber layout), and snapshot_NNNN.meta.json
// records the format version, time, dimensions, axis coordinates, grid
// extents, and plasma parameters.  write/read round-trip bit-exactly.
std::string snapshot_basename(int id);
void write_snapshot(const ReducedDensity& g, const std::string& dir, int id, double time);

struct SnapshotData {
  ReducedDensity g;
  double time = 0.0;
};

SnapshotData read_snapshot(const std::string& dir, int id);

}  // namespace gyrokin
