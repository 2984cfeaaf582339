#include "cli.hpp"

#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "noisebench/bench.hpp"
#include "noisebench/config.hpp"
#include "noisebench/error.hpp"
#include "noisebench/scenario.hpp"
#include "noisebench/separation.hpp"
#include "noisebench/spectral.hpp"

namespace noisebench {

namespace {

int exit_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument:
    case ErrorKind::io:
    case ErrorKind::config:
    case ErrorKind::out_of_range:
      return exit_code::usage;
    case ErrorKind::degenerate_spectrum:
    case ErrorKind::zero_power:
    case ErrorKind::empty_noise_group:
    case ErrorKind::insufficient_samples:
    case ErrorKind::non_finite:
    case ErrorKind::malformed_length:
      return exit_code::data;
    case ErrorKind::numerical_failure:
      return exit_code::internal;
  }
  return exit_code::internal;
}

void setup_logging(bool verbose) {
  static auto logger = [] {
    auto l = spdlog::stderr_color_mt("noisebench");
    spdlog::set_default_logger(l);
    return l;
  }();
  logger->set_level(verbose ? spdlog::level::debug : spdlog::level::warn);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

ScenarioConfig load_with_overrides(const std::string& path, const std::vector<std::string>& overrides) {
  return parse_config(read_file(path), overrides);
}

// One value per line; with several comma-separated columns the last one is
// used. A non-numeric first line is taken as a header.
PowerSpectrum read_spectrum_csv(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  PowerSpectrum out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.rfind(',');
    const std::string field = comma == std::string::npos ? line : line.substr(comma + 1);
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    if (end == field.c_str() || *end != '\0') {
      if (line_no == 1) continue;
      throw Error(ErrorKind::invalid_argument, "spectrum line " + std::to_string(line_no) + " is not numeric");
    }
    out.power.push_back(v);
  }
  return out;
}

struct SeparationOptions {
  std::string method = "rof";
  double lambda1 = 5.0;
  double lambda2 = 0.05;
  std::string alignment = "trailing";
};

RofParams rof_params(const SeparationOptions& o) {
  RofParams p;
  p.lambda1 = o.lambda1;
  p.lambda2 = o.lambda2;
  if (o.alignment == "trailing") {
    p.alignment = RofAlignment::trailing;
  } else if (o.alignment == "centered-expand") {
    p.alignment = RofAlignment::centered_expand;
  } else {
    throw Error(ErrorKind::invalid_argument, "alignment must be trailing or centered-expand");
  }
  p.validate();
  return p;
}

void apply_cbe_occupancy(std::vector<MethodSpec>& methods, const std::string& text) {
  for (auto& m : methods) {
    if (text == "truth") {
      m.cbe_occupancy = CbeOccupancy::truth;
    } else if (text == "aic") {
      m.cbe_occupancy = CbeOccupancy::aic;
    } else {
      char* end = nullptr;
      const double v = std::strtod(text.c_str(), &end);
      if (end == text.c_str() || *end != '\0') {
        throw Error(ErrorKind::invalid_argument, "cbe occupancy must be truth, aic or a fraction");
      }
      m.cbe_occupancy = CbeOccupancy::fixed;
      m.cbe_fixed_fraction = v;
    }
  }
}

int cmd_generate(const std::string& config_path, const std::vector<std::string>& overrides,
                 const std::string& out_path, std::ostream& out) {
  const auto config = load_with_overrides(config_path, overrides);
  const auto scenario = build_scenario(config);
  const auto series = to_time_domain(scenario.block, config.sample_rate_hz);
  write_iq_trace(out_path, series);

  const auto& t = scenario.truth;
  double noise = 0.0, signal = 0.0;
  std::size_t signal_bins = 0;
  for (std::size_t m = 0; m < t.n_frames(); ++m) {
    noise += t.noise_power_mw[m];
    signal += t.signal_power_mw[m];
    signal_bins += static_cast<std::size_t>(std::count(t.signal_mask[m].begin(), t.signal_mask[m].end(), true));
  }
  const double frames = static_cast<double>(t.n_frames());
  const double snr = signal > 0.0 ? 10.0 * std::log10(signal / noise) : -std::numeric_limits<double>::infinity();
  out << "scenario_id=" << config.scenario_id << "\n"
      << "n_bins=" << config.n_bins << "\n"
      << "n_frames=" << config.n_frames << "\n"
      << "samples=" << series.samples.size() << "\n"
      << "mean_noise_power_mw=" << format_float(noise / frames) << "\n"
      << "mean_signal_power_mw=" << format_float(signal / frames) << "\n"
      << "mean_true_snr_db=" << format_float(snr) << "\n"
      << "signal_bins_per_frame=" << format_float(static_cast<double>(signal_bins) / frames) << "\n";
  return exit_code::ok;
}

int cmd_separate(const std::string& spectrum_path, const std::string& trace_path, std::size_t bins,
                 std::size_t frame, const SeparationOptions& options, const std::string& out_path,
                 std::ostream& out) {
  if (spectrum_path.empty() == trace_path.empty()) {
    throw Error(ErrorKind::invalid_argument, "give exactly one of --spectrum or --trace");
  }
  PowerSpectrum power;
  if (!spectrum_path.empty()) {
    power = read_spectrum_csv(spectrum_path);
  } else {
    if (bins < 2) throw Error(ErrorKind::invalid_argument, "--bins is required with --trace");
    const auto series = load_iq_trace(trace_path);
    const auto frames = frame_signal(series, bins, frame + 1);
    power = power_spectrum(dft(frames[frame], frame));
  }
  if (power.size() < 4) throw Error(ErrorKind::invalid_argument, "spectrum needs at least 4 bins");

  SeparationMask mask;
  if (options.method == "rof") {
    mask = rof_separate(power, rof_params(options));
  } else if (options.method == "fisher") {
    mask = fisher_separate(power);
  } else {
    throw Error(ErrorKind::invalid_argument, "separation method must be rof or fisher");
  }

  const std::size_t n = power.size();
  const auto& d = mask.diagnostics;
  std::string csv = "series,index,value,aux\n";
  for (std::size_t i = 0; i < n; ++i) {
    const double aux = mask.method == SeparationMethod::rof ? d.smoothed[i] : power.power[i];
    csv += "mask," + std::to_string(i) + "," + (mask.is_signal[i] ? "1" : "0") + "," + format_float(aux) + "\n";
  }
  if (mask.method == SeparationMethod::rof) {
    for (std::size_t j = 0; j < d.drops.size(); ++j) {
      csv += "drop," + std::to_string(j + 2) + "," + format_float(d.drops[j]) + "," +
             format_float(d.energies[j + 1]) + "\n";
    }
  }
  write_text_file(out_path, csv);

  out << "method=" << to_string(mask.method) << "\n"
      << "bins=" << n << "\n"
      << "signal_bins=" << mask.signal_count() << "\n";
  if (mask.method == SeparationMethod::rof) {
    out << "band_width=" << d.band_width << "\n";
    for (const auto& r : d.runs) out << "run=" << r.first << "-" << r.last << "\n";
  } else {
    out << "split=" << d.split << "\n";
  }
  return exit_code::ok;
}

int cmd_ops(std::vector<MethodSpec> methods, const std::vector<std::size_t>& sizes, const std::string& out_path,
            std::ostream& out) {
  if (sizes.empty()) throw Error(ErrorKind::invalid_argument, "--sizes needs at least one size");
  for (auto n : sizes) {
    if (n < 16) throw Error(ErrorKind::invalid_argument, "sizes must be >= 16");
  }
  std::string csv = "method,separation,n,stage,ops_add,ops_mul,ops_cmp,ops_transcendental,ops_total\n";
  auto row = [&](const MethodSpec& m, std::size_t n, const std::string& stage, const OpCounts& c) {
    csv += fmt::format("{},{},{},{},{},{},{},{},{}\n", to_string(m.estimator), to_string(m.separation), n, stage,
                       c.add, c.mul, c.cmp, c.transcendental, c.total());
  };
  for (const auto& m : methods) {
    for (auto n : sizes) {
      const auto report = count_ops(m, n);
      row(m, n, "total", report.total);
      for (const auto& [stage, counts] : report.stages) row(m, n, stage, counts);
    }
  }
  if (out_path.empty()) {
    out << csv;
  } else {
    write_text_file(out_path, csv);
  }
  return exit_code::ok;
}

int cmd_convert(const std::string& in_path, const std::string& out_path, std::string to, double rate,
                std::ostream& out) {
  if (to.empty()) {
    const auto ext = std::filesystem::path(out_path).extension().string();
    to = ext == ".csv" ? "csv" : "iq";
  }
  if (to == "csv") {
    const auto series = load_iq_trace(in_path, rate);
    std::string csv = "i,q\n";
    for (const auto& s : series.samples) csv += format_float(s.real()) + "," + format_float(s.imag()) + "\n";
    write_text_file(out_path, csv);
    out << "samples=" << series.samples.size() << "\n";
  } else if (to == "iq") {
    std::istringstream in(read_file(in_path));
    ComplexSeries series;
    series.sample_rate_hz = rate;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || (line_no == 1 && line == "i,q")) continue;
      const auto comma = line.find(',');
      if (comma == std::string::npos) {
        throw Error(ErrorKind::invalid_argument, "line " + std::to_string(line_no) + " needs i,q");
      }
      const std::string a = line.substr(0, comma), b = line.substr(comma + 1);
      char *ea = nullptr, *eb = nullptr;
      const double re = std::strtod(a.c_str(), &ea);
      const double im = std::strtod(b.c_str(), &eb);
      if (ea == a.c_str() || *ea != '\0' || eb == b.c_str() || *eb != '\0') {
        throw Error(ErrorKind::invalid_argument, "line " + std::to_string(line_no) + " is not numeric");
      }
      if (!std::isfinite(re) || !std::isfinite(im)) {
        throw Error(ErrorKind::non_finite, "non-finite sample on line " + std::to_string(line_no));
      }
      series.samples.emplace_back(re, im);
    }
    write_iq_trace(out_path, series);
    out << "samples=" << series.samples.size() << "\n";
  } else {
    throw Error(ErrorKind::invalid_argument, "--to must be csv or iq");
  }
  return exit_code::ok;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Noise-power and SNR estimation benchmark for spectrum sensing", "noisebench"};
  app.footer(config_help());
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging on stderr");

  std::string config_path, out_path;
  std::vector<std::string> overrides;
  auto add_config = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_path, "Scenario config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--override", overrides, "key=value config override, repeatable");
  };

  auto* generate = app.add_subcommand("generate", "Synthesize a scenario as a raw float32 I/Q trace");
  add_config(generate);
  generate->add_option("-o,--out", out_path, "Output trace")->required();

  std::vector<std::string> method_tokens{"all"};
  std::vector<std::uint64_t> seeds;
  std::size_t seed_count = 0;
  std::string series_path, report_path, cbe_occupancy = "truth";
  RunOptions run_options;
  SeparationOptions sep;
  auto* run = app.add_subcommand("run", "Run methods over seeded scenarios and write series and report CSVs");
  add_config(run);
  run->add_option("-m,--methods", method_tokens, "ML[:ideal|fisher|rof], MVU[:...], AIC, CBE, MMSE or all")
      ->delimiter(',');
  auto* seeds_opt = run->add_option("--seeds", seeds, "Comma-separated seeds (default: noise.seed)")->delimiter(',');
  run->add_option("--seed-count", seed_count, "Use seeds noise.seed .. noise.seed+K-1")->excludes(seeds_opt);
  run->add_option("--window", run_options.window, "Frames per block for windowed methods")
      ->capture_default_str();
  run->add_option("--threads", run_options.threads, "Worker threads (default: NOISEBENCH_THREADS or all cores)");
  run->add_flag("--timing", run_options.timing, "Record wall_time_ms (otherwise nan, keeping output reproducible)");
  run->add_option("--series", series_path, "Series CSV output")->required();
  run->add_option("--report", report_path, "Report CSV output")->required();
  run->add_option("--cbe-occupancy", cbe_occupancy, "truth, aic or a fixed fraction")->capture_default_str();
  run->add_option("--lambda1", sep.lambda1, "ROF energy-drop threshold in percent")->capture_default_str();
  run->add_option("--lambda2", sep.lambda2, "ROF minimum run width as a fraction of N")->capture_default_str();
  run->add_option("--alignment", sep.alignment, "ROF smoothing: trailing or centered-expand")
      ->capture_default_str();

  std::string spectrum_path, trace_path;
  std::size_t bins = 0, frame = 0;
  auto* separate = app.add_subcommand("separate", "Classify bins of one spectrum and dump diagnostics");
  separate->add_option("--spectrum", spectrum_path, "CSV of per-bin power (last column used)");
  separate->add_option("--trace", trace_path, "Raw float32 I/Q trace");
  separate->add_option("--bins", bins, "Frame length when reading a trace");
  separate->add_option("--frame", frame, "Frame index when reading a trace")->capture_default_str();
  separate->add_option("--method", sep.method, "rof or fisher")->capture_default_str();
  separate->add_option("--lambda1", sep.lambda1, "ROF energy-drop threshold in percent")->capture_default_str();
  separate->add_option("--lambda2", sep.lambda2, "ROF minimum run width as a fraction of N")
      ->capture_default_str();
  separate->add_option("--alignment", sep.alignment, "trailing or centered-expand")->capture_default_str();
  separate->add_option("-o,--out", out_path, "Diagnostics CSV (mask rows, then energy-drop rows)")->required();

  std::string estimate_method;
  auto* estimate = app.add_subcommand("estimate", "Estimate noise power and SNR on one scenario block");
  add_config(estimate);
  estimate->add_option("-m,--method", estimate_method, "One method, e.g. ML:rof or AIC")->required();
  estimate->add_option("--cbe-occupancy", cbe_occupancy, "truth, aic or a fixed fraction")->capture_default_str();

  std::vector<std::size_t> sizes;
  auto* ops = app.add_subcommand("ops", "Count arithmetic of one estimation pass on n x n blocks");
  ops->add_option("-m,--methods", method_tokens, "Methods as for run")->delimiter(',');
  ops->add_option("--sizes", sizes, "Comma-separated block sizes, each >= 16")->delimiter(',')->required();
  ops->add_option("-o,--out", out_path, "CSV output (default stdout)");

  std::string in_path, to;
  double rate = 10e6;
  auto* convert = app.add_subcommand("convert", "Convert between raw float32 I/Q and i,q CSV");
  convert->add_option("-i,--in", in_path, "Input file")->required();
  convert->add_option("-o,--out", out_path, "Output file")->required();
  convert->add_option("--to", to, "csv or iq (default: from the output extension)");
  convert->add_option("--rate", rate, "Sample rate in Hz")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_code::ok : exit_code::usage;
  }
  setup_logging(verbose);

  try {
    if (*generate) return cmd_generate(config_path, overrides, out_path, out);
    if (*run) {
      const auto config = load_with_overrides(config_path, overrides);
      auto methods = MethodSpec::parse_list(method_tokens);
      const auto rof = rof_params(sep);
      for (auto& m : methods) m.rof = rof;
      apply_cbe_occupancy(methods, cbe_occupancy);
      if (seeds.empty()) {
        const std::size_t k = std::max<std::size_t>(seed_count, 1);
        for (std::size_t i = 0; i < k; ++i) seeds.push_back(config.noise.seed + i);
      }
      const auto series = run_scenario(config, methods, seeds, run_options);
      const auto rows = summarize(series, run_options.timing);
      emit_series(series, series_path);
      emit_report(rows, report_path);
      for (const auto& r : rows) {
        out << fmt::format("{:<14} rmse_db={} std_dev_db={} mean_bias_db={}\n",
                           r.method + (r.separation == "none" ? "" : "(" + r.separation + ")"),
                           format_float(r.rmse_db), format_float(r.std_dev_db), format_float(r.mean_bias_db));
      }
      return exit_code::ok;
    }
    if (*separate) return cmd_separate(spectrum_path, trace_path, bins, frame, sep, out_path, out);
    if (*estimate) {
      const auto config = load_with_overrides(config_path, overrides);
      auto methods = MethodSpec::parse(estimate_method);
      if (methods.size() != 1) {
        throw Error(ErrorKind::invalid_argument, "estimate takes one method; add a separation, e.g. ML:rof");
      }
      apply_cbe_occupancy(methods, cbe_occupancy);
      RunOptions options;
      options.window = config.n_frames;
      options.threads = 1;
      const auto series = run_scenario(config, methods, {config.noise.seed}, options);
      const auto& p = series.front().points.back();
      out << "method=" << methods.front().label() << "\n"
          << "frame_index=" << p.frame_index << "\n"
          << "noise_power_est_mw=" << format_float(p.noise_power_est_mw) << "\n"
          << "noise_power_true_mw=" << format_float(p.noise_power_true_mw) << "\n"
          << "snr_est_db=" << format_float(p.snr_est_db) << "\n"
          << "snr_true_db=" << format_float(p.snr_true_db) << "\n";
      return exit_code::ok;
    }
    if (*ops) return cmd_ops(MethodSpec::parse_list(method_tokens), sizes, out_path, out);
    if (*convert) return cmd_convert(in_path, out_path, to, rate, out);
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_for(e.kind());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return exit_code::internal;
  }
  return exit_code::usage;
}

}  // namespace noisebench
