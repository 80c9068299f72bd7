//
// Copyright 2025 The dpmon Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <fstream>

#include "dpmon/errors.hpp"
#include "dpmon/harness.hpp"
#include "json.hpp"

namespace dpmon {
namespace {

using nlohmann::json;

std::vector<double> as_reals(const json& j, const std::string& what) {
  if (!j.is_array()) throw ConfigError("scenario file: " + what + " must be an array");
  return j.get<std::vector<double>>();
}

std::vector<std::uint8_t> as_bits(const json& j, const std::string& what) {
  if (!j.is_array()) throw ConfigError("scenario file: " + what + " must be an array");
  std::vector<std::uint8_t> bits;
  bits.reserve(j.size());
  for (const auto& v : j) {
    const int bit = v.get<int>();
    if (bit != 0 && bit != 1) {
      throw ConfigError("scenario file: " + what + " entries must be 0 or 1");
    }
    bits.push_back(static_cast<std::uint8_t>(bit));
  }
  return bits;
}

Event parse_event(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "half_line_le") return HalfLineLE{j.at("bound").get<double>()};
  if (type == "point_set") {
    return PointSet{as_reals(j.at("points"), "event.points")};
  }
  if (type == "exact_bits") {
    return ExactBits{as_bits(j.at("pattern"), "event.pattern")};
  }
  throw ConfigError("scenario file: unknown event type '" + type +
                    "' (expected half_line_le, point_set or exact_bits)");
}

RnmVariant parse_rnm_variant(const std::string& name) {
  if (name == "return_index") return RnmVariant::kReturnIndex;
  if (name == "return_max_value") return RnmVariant::kReturnMaxValue;
  if (name == "exponential_noise_index") return RnmVariant::kExponentialNoiseIndex;
  throw ConfigError("scenario file: unknown report_noisy_max variant '" + name + "'");
}

SvtVariant parse_svt_variant(const std::string& name) {
  if (name == "v1") return SvtVariant::kV1;
  if (name == "v2") return SvtVariant::kV2;
  if (name == "v4") return SvtVariant::kV4;
  if (name == "v5") return SvtVariant::kV5;
  if (name == "v6") return SvtVariant::kV6;
  throw ConfigError("scenario file: unknown svt variant '" + name +
                    "' (expected v1, v2, v4, v5 or v6)");
}

// Mechanisms in the file carry no input vector; the tuple's x / x_prime are
// bound per side at run time.
MechanismSpec parse_mechanism(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "laplace_sum") {
    const json& noise = j.at("noise");
    const std::string noise_type = noise.at("type").get<std::string>();
    LaplaceSum spec;
    if (noise_type == "laplace") {
      spec.noise = LaplaceNoise{noise.at("scale").get<double>()};
    } else if (noise_type == "gaussian") {
      spec.noise = GaussianNoise{noise.at("variance").get<double>()};
    } else {
      throw ConfigError("scenario file: unknown noise type '" + noise_type + "'");
    }
    return spec;
  }
  if (type == "report_noisy_max") {
    ReportNoisyMax spec;
    spec.epsilon = j.at("epsilon").get<double>();
    spec.variant = parse_rnm_variant(j.at("variant").get<std::string>());
    return spec;
  }
  if (type == "svt") {
    Svt spec;
    spec.variant = parse_svt_variant(j.at("variant").get<std::string>());
    spec.epsilon = j.at("epsilon").get<double>();
    spec.threshold = j.at("threshold").get<double>();
    spec.bound = j.at("bound").get<int>();
    spec.sensitivity = j.value("sensitivity", 1.0);
    return spec;
  }
  throw ConfigError("scenario file: unknown mechanism type '" + type +
                    "' (expected laplace_sum, report_noisy_max or svt)");
}

}  // namespace

ScenarioSpec load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file: " + path);

  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("scenario file " + path + ": " + e.what());
  }

  ScenarioSpec scenario;
  try {
    scenario.id = j.at("id").get<std::string>();
    scenario.change_time = j.value("change_time", kDefaultChangeTime);
    scenario.harmful = j.value("harmful", false);

    const json& tuple = j.at("tuple");
    scenario.tuple.input_x = as_reals(tuple.at("x"), "tuple.x");
    scenario.tuple.input_x_prime = as_reals(tuple.at("x_prime"), "tuple.x_prime");
    scenario.tuple.epsilon = tuple.at("epsilon").get<double>();
    scenario.tuple.event = parse_event(tuple.at("event"));

    scenario.pre_change = with_input(parse_mechanism(j.at("pre_change")),
                                     scenario.tuple.input_x);
    scenario.post_change = with_input(parse_mechanism(j.at("post_change")),
                                      scenario.tuple.input_x);
  } catch (const json::exception& e) {
    throw ConfigError("scenario file " + path + ": " + e.what());
  }
  if (scenario.id.find(',') != std::string::npos) {
    throw ConfigError("scenario file: id must not contain commas");
  }
  validate(scenario);
  return scenario;
}

}  // namespace dpmon
