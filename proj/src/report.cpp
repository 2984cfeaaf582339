#include <fmt/format.h>

#include <cstdlib>
#include <fstream>
#include <limits>

#include "noisebench/bench.hpp"
#include "noisebench/error.hpp"

namespace noisebench {

namespace {

constexpr std::string_view kReportHeader =
    "scenario_id,method,separation,seed_count,rmse_db,std_dev_db,mean_bias_db,ops_add,ops_mul,ops_cmp,"
    "ops_transcendental,wall_time_ms";
constexpr std::string_view kSeriesHeader =
    "scenario_id,seed,method,separation,frame_index,noise_power_est_mw,noise_power_true_mw,snr_est_db,"
    "snr_true_db";

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

double parse_double(std::string_view field) {
  const std::string text(field);
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size()) {
    throw Error(ErrorKind::invalid_argument, "not a number: '" + text + "'");
  }
  return v;
}

std::uint64_t parse_uint(std::string_view field) {
  const std::string text(field);
  char* end = nullptr;
  const unsigned long long v = std::strtoull(text.c_str(), &end, 10);
  if (text.empty() || end != text.c_str() + text.size()) {
    throw Error(ErrorKind::invalid_argument, "not an integer: '" + text + "'");
  }
  return v;
}

}  // namespace

std::string format_float(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return fmt::format("{:.9g}", value);
}

std::string format_report_csv(std::span<const ReportRow> rows) {
  std::string out(kReportHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}\n", r.scenario_id, r.method, r.separation,
                       r.seed_count, format_float(r.rmse_db), format_float(r.std_dev_db),
                       format_float(r.mean_bias_db), r.ops.add, r.ops.mul, r.ops.cmp, r.ops.transcendental,
                       format_float(r.wall_time_ms));
  }
  return out;
}

std::string format_series_csv(std::span<const EstimateSeries> series) {
  std::string out(kSeriesHeader);
  out += '\n';
  for (const auto& s : series) {
    const auto method = to_string(s.method.estimator);
    const auto separation = to_string(s.method.separation);
    for (const auto& p : s.points) {
      out += fmt::format("{},{},{},{},{},{},{},{},{}\n", s.scenario_id, s.seed, method, separation,
                         p.frame_index, format_float(p.noise_power_est_mw), format_float(p.noise_power_true_mw),
                         format_float(p.snr_est_db), format_float(p.snr_true_db));
    }
  }
  return out;
}

std::vector<ReportRow> parse_report_csv(std::string_view text) {
  std::vector<ReportRow> rows;
  auto lines = split(text, '\n');
  if (lines.empty() || lines.front() != kReportHeader) {
    throw Error(ErrorKind::invalid_argument, "report CSV header mismatch");
  }
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto f = split(lines[i], ',');
    if (f.size() != 12) {
      throw Error(ErrorKind::invalid_argument, "report CSV line " + std::to_string(i + 1) + " has wrong arity");
    }
    ReportRow r;
    r.scenario_id = std::string(f[0]);
    r.method = std::string(f[1]);
    r.separation = std::string(f[2]);
    r.seed_count = parse_uint(f[3]);
    r.rmse_db = parse_double(f[4]);
    r.std_dev_db = parse_double(f[5]);
    r.mean_bias_db = parse_double(f[6]);
    r.ops.add = parse_uint(f[7]);
    r.ops.mul = parse_uint(f[8]);
    r.ops.cmp = parse_uint(f[9]);
    r.ops.transcendental = parse_uint(f[10]);
    r.wall_time_ms = parse_double(f[11]);
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorKind::io, "failed writing " + path.string());
}

void emit_report(std::span<const ReportRow> rows, const std::filesystem::path& path) {
  write_text_file(path, format_report_csv(rows));
}

void emit_series(std::span<const EstimateSeries> series, const std::filesystem::path& path) {
  write_text_file(path, format_series_csv(series));
}

}  // namespace noisebench
