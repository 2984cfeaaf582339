#include <gtest/gtest.h>

#include <fstream>

#include "noisebench/config.hpp"
#include "noisebench/error.hpp"
#include "test_support.hpp"

using namespace noisebench;

namespace {

const char* kFull = R"({
  "scenario_id": "lab-7",
  "n_bins": 256,
  "n_frames": 40,
  "sample_rate_hz": 5e6,
  "reference_noise_power_mw": 2.0,
  "subband_count": 8,
  "noise": {"kind": "surrogate-industrial", "seed": 99, "impulse_rate": 0.002, "impulse_factor": 7, "tilt_db": 3},
  "signals": [
    {"subband_index": 2, "occupancy_fraction": 0.5, "target_snr_db": -3},
    {"subband_index": 5, "amplitude_mv": 12.5, "frame_start": 4, "frame_end": 30}
  ],
  "snr_schedule": [{"frame_start": 10, "frame_end": 20, "snr_db": 3}],
  "noise_steps": [{"frame_start": 0, "frame_end": 5, "power_mw": 4}]
})";

ErrorKind kind_of(const std::string& text, const std::vector<std::string>& overrides = {}) {
  try {
    parse_config(text, overrides);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error for " << text;
  return ErrorKind::numerical_failure;
}

}  // namespace

TEST(Config, ParsesEveryKey) {
  const auto c = parse_config(kFull);
  EXPECT_EQ(c.scenario_id, "lab-7");
  EXPECT_EQ(c.n_bins, 256u);
  EXPECT_EQ(c.n_frames, 40u);
  EXPECT_EQ(c.sample_rate_hz, 5e6);
  EXPECT_EQ(c.reference_noise_power_mw, 2.0);
  EXPECT_EQ(c.subband_count, 8u);
  EXPECT_EQ(c.noise.kind, NoiseKind::surrogate_industrial);
  EXPECT_EQ(c.noise.seed, 99u);
  EXPECT_EQ(c.noise.params.impulse_rate, 0.002);
  EXPECT_EQ(c.noise.params.impulse_factor, 7.0);
  EXPECT_EQ(c.noise.params.tilt_db, 3.0);
  ASSERT_EQ(c.signals.size(), 2u);
  EXPECT_EQ(c.signals[0].target_snr_db, -3.0);
  EXPECT_FALSE(c.signals[0].frame_end.has_value());
  EXPECT_EQ(c.signals[1].amplitude_mv, 12.5);
  EXPECT_EQ(c.signals[1].frame_end, 30u);
  ASSERT_EQ(c.snr_schedule.size(), 1u);
  EXPECT_EQ(c.snr_schedule[0].snr_db, 3.0);
  ASSERT_EQ(c.noise_steps.size(), 1u);
  EXPECT_EQ(c.noise_steps[0].power_mw, 4.0);
}

TEST(Config, DefaultsFromEmptyObject) {
  const auto c = parse_config("{}");
  EXPECT_EQ(c.n_bins, 512u);
  EXPECT_EQ(c.noise.kind, NoiseKind::white_gaussian);
  EXPECT_TRUE(c.signals.empty());
}

TEST(Config, RejectsUnknownKeysAtEveryLevel) {
  EXPECT_EQ(kind_of(R"({"n_bin": 64})"), ErrorKind::config);
  EXPECT_EQ(kind_of(R"({"noise": {"kind": "white-gaussian", "sed": 1}})"), ErrorKind::config);
  EXPECT_EQ(kind_of(R"({"signals": [{"subband_index": 0, "amplitude_mv": 1, "width": 3}]})"), ErrorKind::config);
}

TEST(Config, RejectsWrongTypes) {
  EXPECT_EQ(kind_of(R"({"n_bins": "many"})"), ErrorKind::config);
  EXPECT_EQ(kind_of(R"({"n_bins": -4})"), ErrorKind::config);
  EXPECT_EQ(kind_of(R"({"n_bins": 64.5})"), ErrorKind::config);
  EXPECT_EQ(kind_of(R"({"signals": {}})"), ErrorKind::config);
  EXPECT_EQ(kind_of(R"({"noise": {"kind": "pink"}})"), ErrorKind::config);
  EXPECT_EQ(kind_of("[1, 2]"), ErrorKind::config);
  EXPECT_EQ(kind_of("{not json"), ErrorKind::config);
}

TEST(Config, SignalNeedsExactlyOneLevel) {
  EXPECT_EQ(kind_of(R"({"signals": [{"subband_index": 0}]})"), ErrorKind::config);
  EXPECT_EQ(kind_of(R"({"signals": [{"subband_index": 0, "amplitude_mv": 1, "target_snr_db": 0}]})"),
            ErrorKind::config);
}

TEST(Config, ValidationRunsAfterDecoding) {
  EXPECT_THROW(parse_config(R"({"n_bins": 2})"), Error);
  EXPECT_THROW(parse_config(R"({"signals": [{"subband_index": 9, "amplitude_mv": 1}]})"), Error);
}

TEST(Config, OverridesScalarsAndArrayElements) {
  const auto c = parse_config(kFull, {"noise.seed=7", "signals.0.target_snr_db=-6", "scenario_id=other",
                                      "n_frames=30", "signals.1.frame_end=10"});
  EXPECT_EQ(c.noise.seed, 7u);
  EXPECT_EQ(c.signals[0].target_snr_db, -6.0);
  EXPECT_EQ(c.scenario_id, "other");
  EXPECT_EQ(c.n_frames, 30u);
  EXPECT_EQ(c.signals[1].frame_end, 10u);
}

TEST(Config, OverrideCanAppendAndCreate) {
  const auto c = parse_config("{}", {"signals.0.subband_index=1", "signals.0.amplitude_mv=3", "noise.kind=trace-file",
                                     "noise.path=/tmp/x.iq"});
  ASSERT_EQ(c.signals.size(), 1u);
  EXPECT_EQ(c.signals[0].subband_index, 1u);
  EXPECT_EQ(c.noise.kind, NoiseKind::trace_file);
  EXPECT_EQ(c.noise.path, "/tmp/x.iq");
}

TEST(Config, BadOverrides) {
  EXPECT_EQ(kind_of("{}", {"noise.seed"}), ErrorKind::config);
  EXPECT_EQ(kind_of("{}", {"=3"}), ErrorKind::config);
  EXPECT_EQ(kind_of("{}", {"noise..seed=3"}), ErrorKind::config);
  EXPECT_EQ(kind_of(kFull, {"signals.x.amplitude_mv=1"}), ErrorKind::config);
  EXPECT_EQ(kind_of(kFull, {"signals.5.amplitude_mv=1"}), ErrorKind::config);
  EXPECT_EQ(kind_of(kFull, {"n_bins.x=1"}), ErrorKind::config);
  EXPECT_EQ(kind_of(kFull, {"n_bins=abc"}), ErrorKind::config);
  EXPECT_EQ(kind_of(kFull, {"bogus=1"}), ErrorKind::config);
}

TEST(Config, JsonRoundTrip) {
  for (const auto& c : {parse_config(kFull), reference_scenario(128, 9, -3.0, 4), parse_config("{}")}) {
    const auto text = config_to_json(c);
    const auto back = parse_config(text);
    EXPECT_EQ(config_to_json(back), text);
    EXPECT_EQ(back.n_bins, c.n_bins);
    EXPECT_EQ(back.signals.size(), c.signals.size());
    EXPECT_EQ(back.noise.seed, c.noise.seed);
  }
}

TEST(Config, LoadFromFile) {
  const auto path = testing_support::temp_path("config.json");
  std::ofstream(path) << kFull;
  EXPECT_EQ(load_config(path).scenario_id, "lab-7");
  try {
    load_config(testing_support::temp_path("missing.json"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::io);
  }
}

TEST(Config, HelpListsEveryKey) {
  const auto help = config_help();
  for (const char* key :
       {"scenario_id", "n_bins", "n_frames", "sample_rate_hz", "reference_noise_power_mw", "subband_count",
        "noise.kind", "noise.seed", "noise.path", "noise.impulse_rate", "noise.impulse_factor", "noise.tilt_db",
        "signals[].subband_index", "signals[].occupancy_fraction", "signals[].amplitude_mv",
        "signals[].target_snr_db", "signals[].frame_start", "signals[].frame_end", "snr_schedule[]",
        "noise_steps[]"}) {
    EXPECT_NE(help.find(key), std::string::npos) << key;
  }
}
