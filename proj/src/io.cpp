#include "dtrans/io.hpp"

#include <bit>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace dtrans {

namespace {

void ensure_parent(const std::string &path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
}

}  // namespace

void write_snapshot(const std::string &base, const std::vector<Scalar> &values, const SnapshotMeta &m, bool csv) {
  static_assert(std::endian::native == std::endian::little, "snapshot format is little-endian");
  if (values.size() != static_cast<std::size_t>(m.gx) * static_cast<std::size_t>(m.gy))
    throw RangeError("snapshot size does not match its dimensions");
  ensure_parent(base);
  {
    std::ofstream out(base + ".bin", std::ios::binary);
    if (!out) throw IoError("cannot write " + base + ".bin");
    out.write(reinterpret_cast<const char *>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(Scalar)));
    if (!out) throw IoError("write failed for " + base + ".bin");
  }
  std::ostringstream meta;
  meta.precision(17);
  meta << "field = " << m.field << "\ngx = " << m.gx << "\ngy = " << m.gy << "\nstep = " << m.step
       << "\ntime = " << m.time << "\nlat_min = " << m.lat_min << "\nlat_max = " << m.lat_max
       << "\nlon_min = " << m.lon_min << "\nlon_max = " << m.lon_max << "\ndtype = float32\norder = row-major\n";
  write_text_file(base + ".meta", meta.str());
  if (csv) {
    std::ofstream out(base + ".csv");
    if (!out) throw IoError("cannot write " + base + ".csv");
    out.precision(9);
    for (int i = 0; i < m.gy; ++i) {
      for (int j = 0; j < m.gx; ++j) out << (j ? "," : "") << values[static_cast<std::size_t>(i) * m.gx + j];
      out << '\n';
    }
  }
}

Snapshot read_snapshot(const std::string &base) {
  std::ifstream meta(base + ".meta");
  if (!meta) throw IoError("cannot open " + base + ".meta");
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(meta, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t"), b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  Snapshot s;
  try {
    s.meta.field = kv.at("field");
    s.meta.gx = std::stoi(kv.at("gx"));
    s.meta.gy = std::stoi(kv.at("gy"));
    s.meta.step = std::stol(kv.at("step"));
    s.meta.time = std::stod(kv.at("time"));
    s.meta.lat_min = std::stod(kv.at("lat_min"));
    s.meta.lat_max = std::stod(kv.at("lat_max"));
    s.meta.lon_min = std::stod(kv.at("lon_min"));
    s.meta.lon_max = std::stod(kv.at("lon_max"));
  } catch (const std::exception &e) {
    throw IoError(base + ".meta is incomplete or malformed (" + e.what() + ")");
  }
  s.values.resize(static_cast<std::size_t>(s.meta.gx) * static_cast<std::size_t>(s.meta.gy));
  std::ifstream in(base + ".bin", std::ios::binary);
  if (!in) throw IoError("cannot open " + base + ".bin");
  in.read(reinterpret_cast<char *>(s.values.data()), static_cast<std::streamsize>(s.values.size() * sizeof(Scalar)));
  if (!in || in.peek() != std::char_traits<char>::eof())
    throw IoError(base + ".bin does not hold exactly gx*gy float32 values");
  return s;
}

void write_telemetry_csv(std::ostream &os, const std::vector<Telemetry> &telemetry) {
  os << "worker,iteration,time_s\n";
  os.precision(17);
  for (std::size_t w = 0; w < telemetry.size(); ++w)
    for (const auto &s : telemetry[w]) os << w << ',' << s.iteration << ',' << s.time << '\n';
}

void write_text_file(const std::string &path, const std::string &content) {
  ensure_parent(path);
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << content;
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace dtrans
