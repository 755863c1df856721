// Copyright 2026 The dqrecover Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli_app.hpp"
#include "config.hpp"
#include "doctest.h"

using namespace dqr;
using namespace dqr::cli;

namespace {

namespace fs = std::filesystem;

const std::string kDefault = std::string(DQR_SOURCE_DIR) + "/configs/default.yaml";

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "dqrecover");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("dqr_test_cli_" + name);
  fs::remove_all(p);
  return p;
}

// Runs parse_config and returns the ConfigError it raised.
ConfigError config_error(const std::string& text) {
  try {
    parse_config(text, "t.yaml");
  } catch (const ConfigError& e) {
    return e;
  }
  FAIL("expected a ConfigError");
  return ConfigError("", 0, 0, "");
}

std::string replace(std::string text, const std::string& from, const std::string& to) {
  const auto at = text.find(from);
  REQUIRE(at != std::string::npos);
  return text.replace(at, from.size(), to);
}

}  // namespace

TEST_CASE("help documents every configuration key") {
  const Result r = invoke({"--help"});
  CHECK(r.code == 0);
  for (const std::string& s : kSections) CHECK(r.out.find("  " + s + ":") != std::string::npos);
  for (const KeyInfo& k : config_keys()) {
    INFO(k.section << "." << k.key);
    CHECK(r.out.find("    " + k.key + " (") != std::string::npos);
    CHECK_FALSE(k.help.empty());
    CHECK_FALSE(k.default_value.empty());
  }
}

TEST_CASE("shipped default config parses and lists every key") {
  const ExperimentConfig cfg = load_config(kDefault);
  CHECK(cfg.impulse == ImpulseModel::kCoupled);
  std::ifstream in(kDefault);
  std::stringstream ss;
  ss << in.rdbuf();
  for (const KeyInfo& k : config_keys()) {
    INFO(k.key);
    CHECK(ss.str().find(k.key + ":") != std::string::npos);
  }
}

TEST_CASE("dump_config round-trips") {
  ExperimentConfig cfg;
  cfg.scenario_params.mass = 1.37;
  cfg.contact.e = 0.123456789;
  cfg.controller.kind = ControllerKind::kBaseline;
  cfg.impulse = ImpulseModel::kMatrix;
  cfg.seed = 987654321;
  cfg.random_yaw = false;
  cfg.scenario_params.sphere = true;
  const std::string text = dump_config(cfg);
  const ExperimentConfig back = parse_config(text);
  CHECK(dump_config(back) == text);
  CHECK(back.scenario_params.mass == 1.37);
  CHECK(back.contact.e == 0.123456789);
  CHECK(back.seed == 987654321);
  CHECK(back.controller.kind == ControllerKind::kBaseline);
  CHECK(dump_config(parse_config(dump_config(ExperimentConfig{}))) == dump_config(ExperimentConfig{}));
}

TEST_CASE("config errors name the line and column") {
  const std::string base = dump_config(ExperimentConfig{});

  const ConfigError unknown = config_error(replace(base, "  mass:", "  bogus: 1\n  mass:"));
  CHECK(std::string(unknown.what()).find("bogus") != std::string::npos);
  CHECK(std::string(unknown.what()).rfind("t.yaml:", 0) == 0);
  CHECK(unknown.line() > 1);
  CHECK(unknown.column() == 3);

  const ConfigError bad_type = config_error(replace(base, "  mass: 1", "  mass: heavy #"));
  CHECK(std::string(bad_type.what()).find("mass") != std::string::npos);
  CHECK(bad_type.line() > 1);

  const ConfigError missing = config_error("body:\n  mass: 1.0\n");
  CHECK(std::string(missing.what()).find("missing section") != std::string::npos);

  const ConfigError section = config_error(base + "extras:\n  x: 1\n");
  CHECK(std::string(section.what()).find("extras") != std::string::npos);

  const ConfigError enum_value = config_error(replace(base, "impulse: decoupled", "impulse: psychic"));
  CHECK(std::string(enum_value.what()).find("psychic") != std::string::npos);

  CHECK_THROWS_AS(parse_config("body: [1, 2"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/dqr.yaml"), ConfigError);
}

TEST_CASE("equivalence subcommand: pass, injected fault and bad usage") {
  const Result ok = invoke({"equivalence", "--samples", "500", "--seed", "3"});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("PASS") != std::string::npos);
  const Result fault = invoke({"equivalence", "--samples", "500", "--inject-fault"});
  CHECK(fault.code == 1);
  CHECK(fault.out.find("FAIL") != std::string::npos);
  CHECK(invoke({"equivalence", "--samples", "0"}).code == 2);
  CHECK(invoke({"equivalence", "--samples", "many"}).code == 2);
  CHECK(invoke({"nonsense"}).code == 2);
  CHECK(invoke({}).code == 2);
}

TEST_CASE("simulate writes the episode for both controllers") {
  for (const char* kind : {"dq", "baseline"}) {
    const fs::path dir = scratch(std::string("sim_") + kind);
    const Result r = invoke({"simulate", "--config", kDefault, "--controller", kind, "--out", dir.string()});
    INFO(r.err);
    CHECK(r.code == 0);
    CHECK(fs::exists(dir / "episode.csv"));
    CHECK(fs::exists(dir / "episode.svg"));
    CHECK(r.out.find("jumps       1") != std::string::npos);
    fs::remove_all(dir);
  }
  CHECK(invoke({"simulate", "--controller", "pid"}).code == 2);
  CHECK(invoke({"simulate", "--config", "/nonexistent.yaml"}).code == 2);
}

TEST_CASE("montecarlo and bench write their outputs") {
  const fs::path dir = scratch("mc");
  const Result mc = invoke({"montecarlo", "--config", kDefault, "--trials", "2", "--out", dir.string()});
  CHECK(mc.code == 0);
  CHECK(fs::exists(dir / "metrics.csv"));
  CHECK(fs::exists(dir / "summary.txt"));
  CHECK(invoke({"montecarlo", "--trials", "0"}).code == 2);

  const Result b = invoke({"bench", "--iterations", "2000", "--out", dir.string()});
  CHECK(b.code == 0);
  CHECK(b.out.find("op-count reduction matrix -> dq: 29.7%") != std::string::npos);
  CHECK(fs::exists(dir / "bench.csv"));
  CHECK(invoke({"bench", "--formulations", "abacus"}).code == 2);
  fs::remove_all(dir);
}
