#include "fiberspec/emit.hpp"

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace fiberspec {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_number(double v) {
  if (v == 0.0) v = 0.0;  // normalize -0
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string format_sector(Sector k) {
  if (k.is_integer()) return std::to_string(k.twice / 2);
  std::ostringstream out;
  out << (k.twice < 0 ? "-" : "") << std::abs(k.twice) / 2 << ".5";
  return out.str();
}

std::string spectrum_csv_text(const SpectrumTable& table) {
  std::ostringstream out;
  out << "n,k,j,lambda,lambda_sq,encl_lo,encl_hi\n";
  for (const auto& r : table.rows) {
    out << r.stage << ',' << format_sector(r.k) << ',' << r.j << ','
        << format_number(r.lambda) << ',' << format_number(r.lambda * r.lambda) << ','
        << format_number(r.lambda - r.enclosure_radius) << ','
        << format_number(r.lambda + r.enclosure_radius) << '\n';
  }
  return out.str();
}

std::string checks_csv_text(const std::vector<BoundReport>& reports) {
  std::ostringstream out;
  out << "check,n,k,j,value,bound,margin,pass\n";
  for (const auto& report : reports) {
    for (const auto& r : report.rows) {
      out << report.check << ',' << r.stage << ',' << format_sector(r.k) << ',' << r.j << ','
          << format_number(r.value) << ',' << format_number(r.bound) << ','
          << format_number(r.margin) << ',' << (r.pass ? 1 : 0) << '\n';
    }
  }
  return out.str();
}

std::string summary_json_text(const SpectrumTable& table, const RunSummary& summary) {
  json n0 = json::object();
  for (const auto& [name, stage] : summary.first_passing_stage) n0[name] = stage;

  json out{{"alpha", summary.alpha},
           {"stages", summary.stages},
           {"sup_ell_series", summary.sup_series},
           {"clifford_norm", summary.clifford},
           {"n0", n0},
           {"route", summary.route},
           {"grid", table.meta.grid},
           {"geometry_hash", summary.geometry_hash_hex},
           {"config", json::parse(summary.config_echo_json.empty() ? "{}"
                                                                   : summary.config_echo_json)}};
  return out.dump(2) + "\n";
}

namespace {

std::string series_file_name(Sector k, int j) {
  std::string ks = format_sector(k);
  std::string safe;
  for (char ch : ks) {
    if (ch == '-')
      safe += 'm';
    else if (ch == '.')
      safe += 'p';
    else
      safe += ch;
  }
  return "k" + safe + "_j" + std::to_string(j) + ".csv";
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit: cannot open " + path.string());
  out << text;
  if (!out) throw std::runtime_error("emit: write failed for " + path.string());
}

// Writes everything into a fresh temp dir next to out_dir, then renames it
// into place; cleans the temp dir on any failure.
template <typename Fn>
void atomic_emit(const std::string& out_dir, Fn&& fill) {
  const fs::path target(out_dir);
  const fs::path parent = target.has_parent_path() ? target.parent_path() : fs::path(".");
  fs::create_directories(parent);
  const fs::path tmp = parent / (".tmp-" + target.filename().string() + "-" +
                                 std::to_string(static_cast<unsigned long>(::getpid())));
  std::error_code ec;
  fs::remove_all(tmp, ec);
  fs::create_directories(tmp);
  try {
    fill(tmp);
    fs::remove_all(target, ec);
    fs::rename(tmp, target);
  } catch (...) {
    fs::remove_all(tmp, ec);
    throw;
  }
}

}  // namespace

void emit_results(const SpectrumTable& table, const std::vector<BoundReport>& reports,
                  const RunSummary& summary, const std::string& out_dir) {
  atomic_emit(out_dir, [&](const fs::path& dir) {
    write_file(dir / "spectrum.csv", spectrum_csv_text(table));
    write_file(dir / "checks.csv", checks_csv_text(reports));
    write_file(dir / "summary.json", summary_json_text(table, summary));

    fs::create_directories(dir / "series");
    std::map<std::pair<int, int>, std::ostringstream> series;  // (k.twice, j) -> rows
    for (const auto& r : table.rows)
      series[{r.k.twice, r.j}] << r.stage << ',' << format_number(std::fabs(r.lambda)) << '\n';
    for (auto& [key, rows] : series) {
      const std::string name = series_file_name(sector_twice(key.first), key.second);
      write_file(dir / "series" / name, "n,abs_lambda\n" + rows.str());
    }
  });
}

void emit_spectrum_only(const SpectrumTable& table, const std::string& out_dir) {
  atomic_emit(out_dir, [&](const fs::path& dir) {
    write_file(dir / "spectrum.csv", spectrum_csv_text(table));
  });
}

}  // namespace fiberspec
