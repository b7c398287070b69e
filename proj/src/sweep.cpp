#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dtrans/io.hpp"
#include "dtrans/scenario.hpp"

namespace dtrans {

namespace fs = std::filesystem;

namespace {

std::string second_line(const fs::path &p) {
  std::ifstream in(p);
  std::string header, row;
  if (!std::getline(in, header) || !std::getline(in, row)) throw IoError("truncated metrics file " + p.string());
  return row;
}

// Directory name from the axis values, so a cell is found again even if the
// axes are reordered or extended.
std::string cell_name(const std::vector<std::pair<std::string, std::vector<std::string>>> &axes,
                      const std::vector<std::string> &chosen) {
  std::vector<std::string> parts;
  for (std::size_t a = 0; a < axes.size(); ++a) parts.push_back(axes[a].first + "=" + chosen[a]);
  std::sort(parts.begin(), parts.end());
  std::string name;
  for (const auto &p : parts) name += (name.empty() ? "" : "_") + p;
  if (name.empty()) name = "base";
  for (char &c : name)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '.' && c != '-' && c != '+' && c != '=' && c != '_') c = '~';
  return name;
}

}  // namespace

SweepSummary run_sweep(const ScenarioConfig &base,
                       const std::vector<std::pair<std::string, std::vector<std::string>>> &axes) {
  long cells = 1;
  for (const auto &[key, values] : axes) {
    if (values.empty()) throw ConfigError("sweep axis '" + key + "' has no values");
    get_param(base, key);  // rejects unknown keys before anything runs
    cells *= static_cast<long>(values.size());
  }
  const fs::path root(base.out_dir);
  fs::create_directories(root / "cells");

  SweepSummary sum;
  sum.cells = cells;
  std::ostringstream table;
  table << "cell";
  for (const auto &a : axes) table << ',' << "axis_" << a.first;
  table << ',' << metrics_header() << '\n';

  for (long id = 0; id < cells; ++id) {
    ScenarioConfig cfg = base;
    std::vector<std::string> chosen;
    long rest = id;
    // last axis varies fastest
    for (auto it = axes.rbegin(); it != axes.rend(); ++it) {
      const auto &values = it->second;
      chosen.insert(chosen.begin(), values[static_cast<std::size_t>(rest % static_cast<long>(values.size()))]);
      rest /= static_cast<long>(values.size());
    }
    for (std::size_t a = 0; a < axes.size(); ++a) set_param(cfg, axes[a].first, chosen[a]);
    const fs::path dir = root / "cells" / cell_name(axes, chosen);
    cfg.out_dir = dir.string();
    if (fs::exists(dir / "metrics.csv")) {
      ++sum.skipped;
    } else {
      run_scenario(cfg, true);
      ++sum.executed;
    }
    table << id;
    for (const auto &v : chosen) table << ',' << v;
    table << ',' << second_line(dir / "metrics.csv") << '\n';
  }
  sum.metrics_path = (root / "sweep.csv").string();
  write_text_file(sum.metrics_path, table.str());
  return sum;
}

}  // namespace dtrans
