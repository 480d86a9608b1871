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

/**
 * @file serialization.hpp
 * JSON views of configs, transcripts, and attack records, plus a CSV writer
 * with deterministic float formatting so repeated runs diff cleanly.
 */
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "qpufid/adversaries.hpp"
#include "qpufid/protocol.hpp"
#include "qpufid/qpuf_device.hpp"

namespace qpufid {

using Json = nlohmann::json;

Json device_descriptor(const QPufDevice &device);

Json to_json(const ProtocolConfig &cfg);
ProtocolConfig protocol_config_from_json(const Json &j);

Json to_json(const CverVerdict &verdict);
Json to_json(const Transcript &transcript);
Json to_json(const VerificationResult &result);
Json to_json(const RobustnessReport &report);
Json to_json(const CollisionReport &report);
Json to_json(const UnforgeabilityReport &report);
Json to_json(const AttackGameRecord &record);

/// Provenance header written next to every command's outputs.
struct RunManifest {
    std::string command;
    Json config;
    std::uint64_t seed = 0;
    std::string version;
    std::vector<std::string> outputs;
    double wall_seconds = 0.0;
};
Json to_json(const RunManifest &manifest);

/// Formats doubles with "%.17g" so values round-trip bit-exactly and files
/// are byte-identical across runs with the same seed.
std::string format_double(double value);

class CsvWriter {
  public:
    explicit CsvWriter(std::vector<std::string> columns);

    void add_row(const std::vector<std::string> &cells);
    [[nodiscard]] std::string str() const;
    void write_file(const std::string &path) const;

  private:
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

} // namespace qpufid
