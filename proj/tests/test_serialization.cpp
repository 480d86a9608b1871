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

#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "qpufid/serialization.hpp"

using namespace qpufid;

TEST_CASE("protocol config round-trips through JSON") {
    ProtocolConfig cfg;
    cfg.dim = Dimension::from_qubits(5);
    cfg.database_size = 12;
    cfg.rounds = 8;
    cfg.copies = 3;
    cfg.tau = 2.0;
    cfg.kappa = 0.5;
    cfg.valid_fraction = 0.75;
    cfg.mode = SampleMode::exact;
    cfg.seed = 987654321;
    cfg.transit_budget = 17;

    const Json j = to_json(cfg);
    CHECK(j.at("n") == 5);
    CHECK(j.at("K") == 12);
    CHECK(j.at("N") == 8);
    CHECK(j.at("M") == 3);
    CHECK(j.at("mode") == "exact");
    CHECK(j.at("transit_budget") == 17);

    const ProtocolConfig back = protocol_config_from_json(j);
    CHECK(back.dim == cfg.dim);
    CHECK(back.database_size == cfg.database_size);
    CHECK(back.rounds == cfg.rounds);
    CHECK(back.copies == cfg.copies);
    CHECK(back.tau == cfg.tau);
    CHECK(back.kappa == cfg.kappa);
    CHECK(back.valid_fraction == cfg.valid_fraction);
    CHECK(back.mode == cfg.mode);
    CHECK(back.seed == cfg.seed);
    REQUIRE(back.transit_budget.has_value());
    CHECK(*back.transit_budget == 17);
}

TEST_CASE("unset transit budget stays unset through JSON") {
    ProtocolConfig cfg;
    const Json j = to_json(cfg);
    CHECK_FALSE(j.contains("transit_budget"));
    CHECK_FALSE(protocol_config_from_json(j).transit_budget.has_value());
}

TEST_CASE("partial configs only override present keys") {
    const ProtocolConfig cfg = protocol_config_from_json(Json{{"N", 6}, {"tau", 1.5}});
    CHECK(cfg.rounds == 6);
    CHECK(cfg.tau == 1.5);
    // Everything else keeps its default.
    CHECK(cfg.copies == 1);
    CHECK(cfg.valid_fraction == 0.5);
    CHECK(cfg.mode == SampleMode::sampled);
}

TEST_CASE("invalid mode strings are rejected") {
    CHECK_THROWS_AS(protocol_config_from_json(Json{{"mode", "fast"}}), std::invalid_argument);
    CHECK_NOTHROW(protocol_config_from_json(Json{{"mode", "sampled"}}));
}

TEST_CASE("verification results serialize outcome strings as bit text") {
    VerificationResult result;
    result.accepted = true;
    result.transcript.protocol = ProtocolKind::lrv;
    result.transcript.mode = SampleMode::sampled;
    result.transcript.seed = 3;
    result.transcript.quantum_messages = 4;
    result.transcript.classical_messages = 1;
    result.transcript.rounds.push_back(RoundRecord{0, 2, 0, "swap", 0.5, 1, 0});
    result.outcome_string = OutcomeString{{0, 1, 0, 1}};
    result.verdict = CverVerdict{false, true, false, 2, 1};

    const Json j = to_json(result);
    CHECK(j.at("accepted") == true);
    CHECK(j.at("outcome_string") == "0101");
    CHECK(j.at("verdict").at("pass") == false);
    CHECK(j.at("verdict").at("ones_outside") == 2);
    CHECK(j.at("transcript").at("protocol") == "lrv");
    CHECK(j.at("transcript").at("rounds").size() == 1);
    CHECK(j.at("transcript").at("rounds")[0].at("trap_mark") == 0);

    // hrv results carry no outcome string or verdict.
    VerificationResult hrv;
    hrv.accepted = true;
    hrv.transcript.protocol = ProtocolKind::hrv_swap;
    const Json jh = to_json(hrv);
    CHECK_FALSE(jh.contains("outcome_string"));
    CHECK_FALSE(jh.contains("verdict"));
}

TEST_CASE("attack records map NaN instrumentation to null") {
    AttackGameRecord rec;
    rec.protocol = "lrv";
    rec.attacker = "classical-global";
    rec.trials = 10;
    rec.successes = 2;
    rec.empirical_rate = 0.2;
    rec.analytic_bound = 0.25;

    const Json j = to_json(rec);
    CHECK(j.at("analytic_bound") == 0.25);
    CHECK(j.at("predicted_rate").is_null());
    CHECK(j.at("mean_forgery_fidelity_sq").is_null());
    CHECK(j.at("per_round_guess_accuracy").is_null());
    CHECK(j.at("learned_dimension") == -1);

    // Round-trip through text form must not hit JSON's NaN restriction.
    const std::string text = j.dump();
    CHECK(Json::parse(text).at("predicted_rate").is_null());
}

TEST_CASE("device descriptor reports the ledger but never the unitary") {
    RngStream rng(31);
    QPufDevice device = QPufDevice::generate(Dimension::from_qubits(3), rng);
    device.eval(basis_state(device.dim(), 0));
    const Json j = device_descriptor(device);
    CHECK(j.at("id") == device.id());
    CHECK(j.at("dim") == 8);
    CHECK(j.at("query_count") == 1);
    CHECK(j.at("query_budget").is_null());
    CHECK_FALSE(j.dump().find("unitary") != std::string::npos);
}

TEST_CASE("manifest serialization") {
    RunManifest manifest;
    manifest.command = "run";
    manifest.config = Json{{"N", 4}};
    manifest.seed = 11;
    manifest.version = "0.1.0";
    manifest.outputs = {"a.json", "b.csv"};
    manifest.wall_seconds = 0.5;
    const Json j = to_json(manifest);
    CHECK(j.at("command") == "run");
    CHECK(j.at("outputs").size() == 2);
    CHECK(j.at("config").at("N") == 4);
}

TEST_CASE("format_double round-trips bit-exactly") {
    for (const double v : {1.0 / 3.0, 0.1, 6.0 / 10200.0, 1e-300, 0.0, -2.5}) {
        CHECK(std::stod(format_double(v)) == v);
    }
    CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("csv writer emits deterministic bytes and validates shape") {
    CsvWriter writer({"a", "b"});
    writer.add_row({"1", "2"});
    writer.add_row({format_double(0.25), "x"});
    CHECK(writer.str() == "a,b\n1,2\n0.25,x\n");

    CHECK_THROWS_AS(writer.add_row({"only-one"}), std::invalid_argument);
    CHECK_THROWS_AS(CsvWriter({}), std::invalid_argument);

    CsvWriter again({"a", "b"});
    again.add_row({"1", "2"});
    again.add_row({format_double(0.25), "x"});
    CHECK(again.str() == writer.str());
}
