#include "noisebench/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "noisebench/error.hpp"

namespace noisebench {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& message) { throw Error(ErrorKind::config, message); }

void reject_unknown(const json& object, const std::set<std::string>& allowed, const std::string& where) {
  if (!object.is_object()) fail(where + " must be an object");
  for (const auto& item : object.items()) {
    if (!allowed.contains(item.key())) {
      fail("unknown key '" + (where.empty() ? "" : where + ".") + item.key() + "'");
    }
  }
}

template <typename T>
T get(const json& object, const char* key, const std::string& where, T fallback) {
  auto it = object.find(key);
  if (it == object.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    fail("key '" + (where.empty() ? "" : where + ".") + key + "' has the wrong type");
  }
}

std::size_t get_index(const json& object, const char* key, const std::string& where, std::size_t fallback) {
  auto it = object.find(key);
  if (it == object.end()) return fallback;
  if (!it->is_number_integer() || it->get<long long>() < 0) {
    fail("key '" + (where.empty() ? "" : where + ".") + key + "' must be a non-negative integer");
  }
  return it->get<std::size_t>();
}

NoiseKind parse_kind(const std::string& text) {
  if (text == "white-gaussian") return NoiseKind::white_gaussian;
  if (text == "surrogate-industrial") return NoiseKind::surrogate_industrial;
  if (text == "trace-file") return NoiseKind::trace_file;
  fail("noise.kind must be white-gaussian, surrogate-industrial or trace-file, got '" + text + "'");
}

const char* kind_name(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::white_gaussian: return "white-gaussian";
    case NoiseKind::surrogate_industrial: return "surrogate-industrial";
    case NoiseKind::trace_file: return "trace-file";
  }
  return "white-gaussian";
}

json& descend(json& node, const std::string& segment, const std::string& key) {
  // a missing parent addressed by index becomes an array
  if (node.is_null() && !segment.empty() && std::all_of(segment.begin(), segment.end(), ::isdigit)) {
    node = json::array();
  }
  if (node.is_array()) {
    std::size_t index = 0;
    try {
      std::size_t used = 0;
      index = std::stoul(segment, &used);
      if (used != segment.size()) throw std::invalid_argument(segment);
    } catch (const std::exception&) {
      fail("override '" + key + "': '" + segment + "' is not an array index");
    }
    if (index > node.size()) fail("override '" + key + "': index " + segment + " out of range");
    if (index == node.size()) node.push_back(json::object());
    return node[index];
  }
  if (node.is_null()) node = json::object();
  if (!node.is_object()) fail("override '" + key + "': cannot descend into a scalar");
  return node[segment];
}

void apply_override(json& root, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) fail("override must look like key=value, got '" + assignment + "'");
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);

  json* node = &root;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string segment = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (segment.empty()) fail("override key '" + key + "' has an empty segment");
    node = &descend(*node, segment, key);
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  json value = json::parse(raw, nullptr, false);
  *node = value.is_discarded() ? json(raw) : value;
}

ScenarioConfig decode(const json& root) {
  reject_unknown(root,
                 {"scenario_id", "n_bins", "n_frames", "sample_rate_hz", "noise", "reference_noise_power_mw",
                  "subband_count", "signals", "snr_schedule", "noise_steps"},
                 "");
  ScenarioConfig c;
  c.scenario_id = get<std::string>(root, "scenario_id", "", c.scenario_id);
  c.n_bins = get_index(root, "n_bins", "", c.n_bins);
  c.n_frames = get_index(root, "n_frames", "", c.n_frames);
  c.sample_rate_hz = get<double>(root, "sample_rate_hz", "", c.sample_rate_hz);
  c.reference_noise_power_mw = get<double>(root, "reference_noise_power_mw", "", c.reference_noise_power_mw);
  c.subband_count = get_index(root, "subband_count", "", c.subband_count);

  if (auto it = root.find("noise"); it != root.end()) {
    const json& n = *it;
    reject_unknown(n, {"kind", "seed", "path", "impulse_rate", "impulse_factor", "tilt_db"}, "noise");
    c.noise.kind = parse_kind(get<std::string>(n, "kind", "noise", "white-gaussian"));
    c.noise.seed = get<std::uint64_t>(n, "seed", "noise", c.noise.seed);
    c.noise.path = get<std::string>(n, "path", "noise", "");
    c.noise.params.impulse_rate = get<double>(n, "impulse_rate", "noise", c.noise.params.impulse_rate);
    c.noise.params.impulse_factor = get<double>(n, "impulse_factor", "noise", c.noise.params.impulse_factor);
    c.noise.params.tilt_db = get<double>(n, "tilt_db", "noise", c.noise.params.tilt_db);
  }

  auto array_of = [&](const char* key) -> const json* {
    auto it = root.find(key);
    if (it == root.end()) return nullptr;
    if (!it->is_array()) fail(std::string(key) + " must be an array");
    return &*it;
  };

  if (const json* signals = array_of("signals")) {
    for (std::size_t i = 0; i < signals->size(); ++i) {
      const json& s = (*signals)[i];
      const std::string where = "signals." + std::to_string(i);
      reject_unknown(s,
                     {"subband_index", "occupancy_fraction", "amplitude_mv", "target_snr_db", "frame_start",
                      "frame_end"},
                     where);
      if (s.contains("amplitude_mv") == s.contains("target_snr_db")) {
        fail(where + " needs exactly one of amplitude_mv or target_snr_db");
      }
      SubbandSignal sig;
      sig.subband_index = get_index(s, "subband_index", where, 0);
      sig.occupancy_fraction = get<double>(s, "occupancy_fraction", where, 1.0);
      sig.amplitude_mv = get<double>(s, "amplitude_mv", where, 0.0);
      if (s.contains("target_snr_db")) sig.target_snr_db = get<double>(s, "target_snr_db", where, 0.0);
      sig.frame_start = get_index(s, "frame_start", where, 0);
      if (s.contains("frame_end")) sig.frame_end = get_index(s, "frame_end", where, 0);
      c.signals.push_back(sig);
    }
  }
  if (const json* schedule = array_of("snr_schedule")) {
    for (std::size_t i = 0; i < schedule->size(); ++i) {
      const json& s = (*schedule)[i];
      const std::string where = "snr_schedule." + std::to_string(i);
      reject_unknown(s, {"frame_start", "frame_end", "snr_db"}, where);
      if (!s.contains("frame_end") || !s.contains("snr_db")) fail(where + " needs frame_end and snr_db");
      c.snr_schedule.push_back({get_index(s, "frame_start", where, 0), get_index(s, "frame_end", where, 0),
                                get<double>(s, "snr_db", where, 0.0)});
    }
  }
  if (const json* steps = array_of("noise_steps")) {
    for (std::size_t i = 0; i < steps->size(); ++i) {
      const json& s = (*steps)[i];
      const std::string where = "noise_steps." + std::to_string(i);
      reject_unknown(s, {"frame_start", "frame_end", "power_mw"}, where);
      if (!s.contains("frame_end") || !s.contains("power_mw")) fail(where + " needs frame_end and power_mw");
      c.noise_steps.push_back({get_index(s, "frame_start", where, 0), get_index(s, "frame_end", where, 0),
                               get<double>(s, "power_mw", where, 1.0)});
    }
  }
  c.validate();
  return c;
}

json parse_json(std::string_view text) {
  json root = json::parse(text, nullptr, false);
  if (root.is_discarded()) fail("config is not valid JSON");
  return root;
}

}  // namespace

ScenarioConfig parse_config(std::string_view json_text) { return decode(parse_json(json_text)); }

ScenarioConfig parse_config(std::string_view json_text, const std::vector<std::string>& overrides) {
  json root = parse_json(json_text);
  for (const auto& o : overrides) apply_override(root, o);
  return decode(root);
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string config_to_json(const ScenarioConfig& c) {
  json root;
  root["scenario_id"] = c.scenario_id;
  root["n_bins"] = c.n_bins;
  root["n_frames"] = c.n_frames;
  root["sample_rate_hz"] = c.sample_rate_hz;
  root["reference_noise_power_mw"] = c.reference_noise_power_mw;
  root["subband_count"] = c.subband_count;
  json noise{{"kind", kind_name(c.noise.kind)}, {"seed", c.noise.seed}};
  if (c.noise.kind == NoiseKind::trace_file) noise["path"] = c.noise.path.string();
  if (c.noise.kind == NoiseKind::surrogate_industrial) {
    noise["impulse_rate"] = c.noise.params.impulse_rate;
    noise["impulse_factor"] = c.noise.params.impulse_factor;
    noise["tilt_db"] = c.noise.params.tilt_db;
  }
  root["noise"] = noise;
  root["signals"] = json::array();
  for (const auto& s : c.signals) {
    json j{{"subband_index", s.subband_index},
           {"occupancy_fraction", s.occupancy_fraction},
           {"frame_start", s.frame_start}};
    if (s.target_snr_db) {
      j["target_snr_db"] = *s.target_snr_db;
    } else {
      j["amplitude_mv"] = s.amplitude_mv;
    }
    if (s.frame_end) j["frame_end"] = *s.frame_end;
    root["signals"].push_back(j);
  }
  root["snr_schedule"] = json::array();
  for (const auto& s : c.snr_schedule) {
    root["snr_schedule"].push_back({{"frame_start", s.frame_start}, {"frame_end", s.frame_end}, {"snr_db", s.snr_db}});
  }
  root["noise_steps"] = json::array();
  for (const auto& s : c.noise_steps) {
    root["noise_steps"].push_back(
        {{"frame_start", s.frame_start}, {"frame_end", s.frame_end}, {"power_mw", s.power_mw}});
  }
  return root.dump(2) + "\n";
}

std::string config_help() {
  return R"(Config keys (JSON object; unknown keys are rejected):
  scenario_id                string, copied into every CSV row (default "scenario")
  n_bins                     N, bins per frame, >= 4 (default 512)
  n_frames                   total frames in the run (default 100)
  sample_rate_hz             trace sample rate (default 10e6)
  reference_noise_power_mw   noise power after rescaling, > 0 (default 1)
  subband_count              equal subbands partitioning the band (default 4)
  noise.kind                 white-gaussian | surrogate-industrial | trace-file
  noise.seed                 64-bit seed for synthetic noise (default 1)
  noise.path                 raw float32 I/Q trace (trace-file only)
  noise.impulse_rate         surrogate impulse probability per sample (default 1e-3)
  noise.impulse_factor       surrogate impulse size in base RMS units (default 10)
  noise.tilt_db              surrogate DC-to-Nyquist power tilt in dB (default 0)
  signals[].subband_index    subband carrying the rectangle
  signals[].occupancy_fraction  share of the subband occupied, (0, 1] (default 1)
  signals[].amplitude_mv     rectangle amplitude in mV  (exactly one of these two)
  signals[].target_snr_db    whole-band SNR the rectangle should produce
  signals[].frame_start      first active frame (default 0)
  signals[].frame_end        one past the last active frame (default: end of run)
  snr_schedule[].frame_start, .frame_end, .snr_db
                             rescale active signals to a whole-band SNR on a frame range
  noise_steps[].frame_start, .frame_end, .power_mw
                             override the noise power on a frame range
Overrides: --override key=value with dotted keys, e.g. noise.seed=7 or signals.0.target_snr_db=-3
)";
}

}  // namespace noisebench
