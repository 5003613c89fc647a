#include "gyrokin/diagnostics.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <vector>

#include "json.hpp"

#include "gyrokin/errors.hpp"

namespace gyrokin {

namespace {

using nlohmann::json;

static_assert(std::endian::native == std::endian::little,
              "snapshot format is little-endian");

std::string format_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::vector<double> axis_values(int n, double first, double step) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = first + i * step;
  return out;
}

}  // namespace

const char* const kDiagnosticsHeader =
    "time,mass,px,py,pz,ekin,entropy,larmor_cx,larmor_cy,larmor_power,entropy_prod,l2m";

DiagnosticsCsv::DiagnosticsCsv(const std::string& path) : out_(path) {
  if (!out_) throw config_error("diagnostics: cannot open " + path + " for writing");
  out_ << kDiagnosticsHeader << "\n";
}

void DiagnosticsCsv::append(const DiagnosticsRecord& rec) {
  out_ << format_diagnostics_row(rec) << "\n";
  out_.flush();
}

std::string format_diagnostics_row(const DiagnosticsRecord& rec) {
  const double cols[12] = {rec.time,      rec.mass,      rec.px,           rec.py,
                           rec.pz,        rec.ekin,      rec.entropy,      rec.larmor_cx,
                           rec.larmor_cy, rec.larmor_power, rec.entropy_prod, rec.l2m};
  std::string row;
  for (int i = 0; i < 12; ++i) {
    if (i) row += ',';
    row += format_double(cols[i]);
  }
  return row;
}

std::string snapshot_basename(int id) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "snapshot_%04d", id);
  return buf;
}

void write_snapshot(const ReducedDensity& g, const std::string& dir, int id, double time) {
  const ReducedGrid& gr = *g.grid;
  std::filesystem::create_directories(dir);
  const std::string base = dir + "/" + snapshot_basename(id);

  // Transpose from the memory fiber layout to the disk order
  // [y1][y2][x3][r][v3].
  std::vector<double> disk(gr.num_nodes());
  std::size_t pos = 0;
  for (int iy1 = 0; iy1 < gr.n_y1; ++iy1) {
    for (int iy2 = 0; iy2 < gr.n_y2; ++iy2) {
      for (int ix3 = 0; ix3 < gr.n_x3; ++ix3) {
        for (int ir = 0; ir < gr.n_r; ++ir) {
          for (int iv3 = 0; iv3 < gr.n_v3; ++iv3) {
            disk[pos++] = g.values[gr.index(ix3, ir, iv3, iy1, iy2)];
          }
        }
      }
    }
  }
  std::ofstream bin(base + ".bin", std::ios::binary);
  if (!bin) throw config_error("snapshot: cannot open " + base + ".bin for writing");
  bin.write(reinterpret_cast<const char*>(disk.data()),
            static_cast<std::streamsize>(disk.size() * sizeof(double)));
  if (!bin) throw config_error("snapshot: short write on " + base + ".bin");
  bin.close();

  json meta;
  meta["format_version"] = 1;
  meta["byte_order"] = "little-endian";
  meta["value_type"] = "float64";
  meta["layout"] = {"y1", "y2", "x3", "r", "v3"};
  meta["time"] = time;
  meta["dimensions"] = {{"n_y1", gr.n_y1}, {"n_y2", gr.n_y2}, {"n_x3", gr.n_x3},
                        {"n_r", gr.n_r},   {"n_v3", gr.n_v3}};
  meta["extents"] = {{"L", gr.L}, {"L3", gr.L3}, {"R_max", gr.R_max}, {"V3", gr.V3}};
  meta["axes"] = {{"y1", axis_values(gr.n_y1, 0.0, gr.dy1())},
                  {"y2", axis_values(gr.n_y2, 0.0, gr.dy2())},
                  {"x3", axis_values(gr.n_x3, 0.0, gr.dx3())},
                  {"r", axis_values(gr.n_r, 0.5 * gr.dr(), gr.dr())},
                  {"v3", axis_values(gr.n_v3, -gr.V3 + 0.5 * gr.dv3(), gr.dv3())}};
  meta["params"] = {{"q", g.params.q},
                    {"m", g.params.m},
                    {"B", g.params.B},
                    {"theta", g.params.theta},
                    {"tau", g.params.tau}};
  std::ofstream mout(base + ".meta.json");
  if (!mout) throw config_error("snapshot: cannot open " + base + ".meta.json for writing");
  mout << meta.dump(2) << "\n";
}

SnapshotData read_snapshot(const std::string& dir, int id) {
  const std::string base = dir + "/" + snapshot_basename(id);
  std::ifstream min(base + ".meta.json");
  if (!min) throw config_error("snapshot: cannot open " + base + ".meta.json");
  json meta = json::parse(min);
  if (meta.value("format_version", 0) != 1) {
    throw config_error("snapshot: unsupported format version in " + base + ".meta.json");
  }

  auto grid = std::make_shared<ReducedGrid>();
  const json& dims = meta.at("dimensions");
  grid->n_y1 = dims.at("n_y1").get<int>();
  grid->n_y2 = dims.at("n_y2").get<int>();
  grid->n_x3 = dims.at("n_x3").get<int>();
  grid->n_r = dims.at("n_r").get<int>();
  grid->n_v3 = dims.at("n_v3").get<int>();
  const json& ext = meta.at("extents");
  grid->L = ext.at("L").get<double>();
  grid->L3 = ext.at("L3").get<double>();
  grid->R_max = ext.at("R_max").get<double>();
  grid->V3 = ext.at("V3").get<double>();
  validate_grid(*grid);

  SnapshotData out;
  out.time = meta.at("time").get<double>();
  out.g.grid = grid;
  const json& par = meta.at("params");
  out.g.params.q = par.at("q").get<double>();
  out.g.params.m = par.at("m").get<double>();
  out.g.params.B = par.at("B").get<double>();
  out.g.params.theta = par.at("theta").get<double>();
  out.g.params.tau = par.at("tau").get<double>();

  std::ifstream bin(base + ".bin", std::ios::binary);
  if (!bin) throw config_error("snapshot: cannot open " + base + ".bin");
  std::vector<double> disk(grid->num_nodes());
  bin.read(reinterpret_cast<char*>(disk.data()),
           static_cast<std::streamsize>(disk.size() * sizeof(double)));
  if (bin.gcount() != static_cast<std::streamsize>(disk.size() * sizeof(double))) {
    throw config_error("snapshot: " + base + ".bin is shorter than the declared grid");
  }

  const ReducedGrid& gr = *grid;
  out.g.values.assign(gr.num_nodes(), 0.0);
  std::size_t pos = 0;
  for (int iy1 = 0; iy1 < gr.n_y1; ++iy1) {
    for (int iy2 = 0; iy2 < gr.n_y2; ++iy2) {
      for (int ix3 = 0; ix3 < gr.n_x3; ++ix3) {
        for (int ir = 0; ir < gr.n_r; ++ir) {
          for (int iv3 = 0; iv3 < gr.n_v3; ++iv3) {
            out.g.values[gr.index(ix3, ir, iv3, iy1, iy2)] = disk[pos++];
          }
        }
      }
    }
  }
  return out;
}

}  // namespace gyrokin
