#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dtrans/grid.hpp"
#include "dtrans/netsim.hpp"

namespace dtrans {

struct SnapshotMeta {
  std::string field;
  int gx = 0, gy = 0;
  long step = 0;
  double time = 0;  // simulated seconds
  double lat_min = 0, lat_max = 0, lon_min = 0, lon_max = 0;
};

struct Snapshot {
  SnapshotMeta meta;
  std::vector<Scalar> values;  // row-major, gy x gx, row 0 south
};

// Writes <base>.bin (raw little-endian float32) and <base>.meta (key = value
// text); <base>.csv as well when csv is set.
void write_snapshot(const std::string &base, const std::vector<Scalar> &values, const SnapshotMeta &meta,
                    bool csv = false);
Snapshot read_snapshot(const std::string &base);

// iteration,time per worker: worker,iteration,time_s
void write_telemetry_csv(std::ostream &os, const std::vector<Telemetry> &telemetry);
void write_text_file(const std::string &path, const std::string &content);

}  // namespace dtrans
