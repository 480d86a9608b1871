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

#include "qpufid/serialization.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace qpufid {
namespace {

/// JSON has no NaN; absent predictions serialize as null.
Json number_or_null(double value) {
    if (std::isnan(value)) return nullptr;
    return value;
}

} // namespace

Json device_descriptor(const QPufDevice &device) {
    return Json{{"id", device.id()},
                {"qubits", device.dim().qubits},
                {"dim", device.dim().size},
                {"generation_seed", device.generation_seed()},
                {"query_count", device.query_count()},
                {"query_budget", device.query_budget() ? Json(*device.query_budget()) : Json()}};
}

Json to_json(const ProtocolConfig &cfg) {
    Json j{{"n", cfg.dim.qubits},
           {"K", cfg.database_size},
           {"N", cfg.rounds},
           {"M", cfg.copies},
           {"tau", cfg.tau},
           {"kappa", cfg.kappa},
           {"p", cfg.valid_fraction},
           {"mode", cfg.mode == SampleMode::exact ? "exact" : "sampled"},
           {"seed", cfg.seed}};
    if (cfg.transit_budget) j["transit_budget"] = *cfg.transit_budget;
    return j;
}

ProtocolConfig protocol_config_from_json(const Json &j) {
    ProtocolConfig cfg;
    if (j.contains("n")) cfg.dim = Dimension::from_qubits(j.at("n").get<int>());
    if (j.contains("K")) cfg.database_size = j.at("K").get<int>();
    if (j.contains("N")) cfg.rounds = j.at("N").get<int>();
    if (j.contains("M")) cfg.copies = j.at("M").get<int>();
    if (j.contains("tau")) cfg.tau = j.at("tau").get<double>();
    if (j.contains("kappa")) cfg.kappa = j.at("kappa").get<double>();
    if (j.contains("p")) cfg.valid_fraction = j.at("p").get<double>();
    if (j.contains("mode")) {
        const std::string mode = j.at("mode").get<std::string>();
        if (mode == "exact") {
            cfg.mode = SampleMode::exact;
        } else if (mode == "sampled") {
            cfg.mode = SampleMode::sampled;
        } else {
            throw std::invalid_argument("config field 'mode' must be 'exact' or 'sampled'");
        }
    }
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("transit_budget"))
        cfg.transit_budget = j.at("transit_budget").get<std::uint64_t>();
    return cfg;
}

Json to_json(const CverVerdict &verdict) {
    return Json{{"pass", verdict.pass},
                {"test1_pass", verdict.test1_pass},
                {"test2_pass", verdict.test2_pass},
                {"ones_outside", verdict.ones_outside},
                {"ones_target", verdict.ones_target}};
}

Json to_json(const Transcript &transcript) {
    Json rounds = Json::array();
    for (const auto &r : transcript.rounds) {
        rounds.push_back(Json{{"round", r.round},
                              {"challenge_index", r.challenge_index},
                              {"repetition", r.repetition},
                              {"test", r.test},
                              {"accept_probability", r.accept_probability},
                              {"outcome_bit", r.outcome_bit},
                              {"trap_mark", r.trap_mark}});
    }
    return Json{{"protocol", protocol_name(transcript.protocol)},
                {"mode", transcript.mode == SampleMode::exact ? "exact" : "sampled"},
                {"seed", transcript.seed},
                {"quantum_messages", transcript.quantum_messages},
                {"classical_messages", transcript.classical_messages},
                {"response_copies_consumed", transcript.response_copies_consumed},
                {"device_queries_setup", transcript.device_queries_setup},
                {"device_queries_run", transcript.device_queries_run},
                {"rounds", std::move(rounds)}};
}

Json to_json(const VerificationResult &result) {
    Json j{{"accepted", result.accepted}, {"transcript", to_json(result.transcript)}};
    if (result.outcome_string) {
        std::string bits;
        bits.reserve(result.outcome_string->bits.size());
        for (const auto b : result.outcome_string->bits) bits.push_back(b ? '1' : '0');
        j["outcome_string"] = bits;
    }
    if (result.verdict) j["verdict"] = to_json(*result.verdict);
    return j;
}

Json to_json(const RobustnessReport &report) {
    return Json{{"trials", report.trials},
                {"delta_r", report.delta_r},
                {"min_output_fidelity", report.min_output_fidelity},
                {"max_fidelity_drift", report.max_fidelity_drift},
                {"pass", report.pass}};
}

Json to_json(const CollisionReport &report) {
    return Json{{"trials", report.trials},
                {"delta_c", report.delta_c},
                {"max_output_fidelity", report.max_output_fidelity},
                {"max_fidelity_drift", report.max_fidelity_drift},
                {"pass", report.pass}};
}

Json to_json(const UnforgeabilityReport &report) {
    return Json{{"trials", report.trials},
                {"learned_dimension", report.learned_dimension},
                {"delta", report.delta},
                {"successes", report.successes},
                {"empirical_success_rate", report.empirical_success_rate},
                {"bound", report.bound},
                {"mean_fidelity_sq", report.mean_fidelity_sq},
                {"stddev_fidelity_sq", report.stddev_fidelity_sq},
                {"bound_applicable", report.bound_applicable}};
}

Json to_json(const AttackGameRecord &record) {
    return Json{{"protocol", record.protocol},
                {"attacker", record.attacker},
                {"trials", record.trials},
                {"successes", record.successes},
                {"empirical_rate", record.empirical_rate},
                {"ci_low", record.ci.low},
                {"ci_high", record.ci.high},
                {"analytic_bound", number_or_null(record.analytic_bound)},
                {"bound_id", record.bound_id},
                {"predicted_rate", number_or_null(record.predicted_rate)},
                {"prediction_id", record.prediction_id},
                {"mean_forgery_fidelity_sq", number_or_null(record.mean_forgery_fidelity_sq)},
                {"stddev_forgery_fidelity_sq", number_or_null(record.stddev_forgery_fidelity_sq)},
                {"guess_rounds", record.guess_rounds},
                {"correct_guesses", record.correct_guesses},
                {"per_round_guess_accuracy", number_or_null(record.per_round_guess_accuracy)},
                {"per_round_accuracy_bound", number_or_null(record.per_round_accuracy_bound)},
                {"per_round_accuracy_valid", number_or_null(record.per_round_accuracy_valid)},
                {"per_round_accuracy_trap", number_or_null(record.per_round_accuracy_trap)},
                {"joint_all_correct_rate", number_or_null(record.joint_all_correct_rate)},
                {"joint_product_prediction", number_or_null(record.joint_product_prediction)},
                {"learned_dimension", record.learned_dimension},
                {"quantum_layer_elided", record.quantum_layer_elided},
                {"seed", record.seed}};
}

Json to_json(const RunManifest &manifest) {
    return Json{{"command", manifest.command},
                {"config", manifest.config},
                {"seed", manifest.seed},
                {"version", manifest.version},
                {"outputs", manifest.outputs},
                {"wall_seconds", manifest.wall_seconds}};
}

std::string format_double(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

CsvWriter::CsvWriter(std::vector<std::string> columns) : columns_(std::move(columns)) {
    if (columns_.empty()) throw std::invalid_argument("CsvWriter: no columns");
}

void CsvWriter::add_row(const std::vector<std::string> &cells) {
    if (cells.size() != columns_.size())
        throw std::invalid_argument("CsvWriter: cell count does not match columns");
    rows_.push_back(cells);
}

std::string CsvWriter::str() const {
    std::string out;
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (i != 0) out.push_back(',');
        out += columns_[i];
    }
    out.push_back('\n');
    for (const auto &row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i != 0) out.push_back(',');
            out += row[i];
        }
        out.push_back('\n');
    }
    return out;
}

void CsvWriter::write_file(const std::string &path) const {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("CsvWriter: cannot open '" + path + "' for writing");
    file << str();
}

} // namespace qpufid
