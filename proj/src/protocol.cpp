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

#include "qpufid/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace qpufid {

std::vector<int> sample_distinct_indices(int count, int population, RngStream &rng) {
    if (count < 0 || population < count)
        throw std::invalid_argument("sample_distinct_indices: need 0 <= count <= population");
    std::vector<int> pool(population);
    std::iota(pool.begin(), pool.end(), 0);
    for (int i = 0; i < count; ++i) {
        const int j = i + static_cast<int>(rng.integer(static_cast<std::uint64_t>(population - i)));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(count);
    return pool;
}

namespace {

bool nearly_integral(double x) { return std::abs(x - std::round(x)) <= 1e-9; }

} // namespace

const char *protocol_name(ProtocolKind kind) {
    switch (kind) {
    case ProtocolKind::hrv_swap:
        return "hrv-swap";
    case ProtocolKind::hrv_gswap:
        return "hrv-gswap";
    case ProtocolKind::lrv:
        return "lrv";
    }
    return "unknown";
}

ProtocolKind protocol_from_name(const std::string &name) {
    if (name == "hrv-swap") {
        return ProtocolKind::hrv_swap;
    }
    if (name == "hrv-gswap") {
        return ProtocolKind::hrv_gswap;
    }
    if (name == "lrv") {
        return ProtocolKind::lrv;
    }
    throw std::invalid_argument("unknown protocol: " + name);
}

void ProtocolConfig::validate(ProtocolKind kind) const {
    if (dim.qubits < 1 || dim.size != (1 << dim.qubits)) {
        throw std::invalid_argument("config field dim: invalid qubit count or size");
    }
    if (database_size < 1) {
        throw std::invalid_argument("config field database_size: must be >= 1");
    }
    const long long poly_cap = static_cast<long long>(dim.qubits) * dim.qubits * dim.qubits;
    if (database_size > poly_cap) {
        throw std::invalid_argument("config field database_size: exceeds polynomial cap n^3 = " +
                                    std::to_string(poly_cap));
    }
    if (rounds < 1) {
        throw std::invalid_argument("config field rounds: must be >= 1");
    }
    if (rounds > database_size) {
        throw std::invalid_argument("config field rounds: must be <= database_size");
    }
    if (kind != ProtocolKind::lrv && copies < 1) {
        throw std::invalid_argument("config field copies: must be >= 1");
    }
    if (kind == ProtocolKind::lrv) {
        if (rounds % 2 != 0) {
            throw std::invalid_argument("config field rounds: must be even for lrv");
        }
        if (valid_fraction < 0.0 || valid_fraction > 1.0) {
            throw std::invalid_argument("config field valid_fraction: must lie in [0, 1]");
        }
        if (!nearly_integral(valid_fraction * rounds)) {
            throw std::invalid_argument("config field valid_fraction: p*N must be integral");
        }
        if (valid_fraction == 0.5 && rounds % 4 != 0) {
            throw std::invalid_argument("config field rounds: must be divisible by 4 at p = 1/2");
        }
        if (tau < 0.0) {
            throw std::invalid_argument("config field tau: must be >= 0");
        }
        if (kappa < 0.0 || kappa > 1.0) {
            throw std::invalid_argument("config field kappa: must lie in [0, 1]");
        }
    }
}

const PureState &CrpDatabase::consume_response(int index) {
    auto &rec = records.at(static_cast<std::size_t>(index));
    if (rec.copies_remaining <= 0) {
        throw std::runtime_error("response copies exhausted for challenge " + std::to_string(index));
    }
    --rec.copies_remaining;
    ++copies_consumed;
    return rec.response;
}

const PureState &CrpDatabase::consume_trap(int index) {
    auto &rec = records.at(static_cast<std::size_t>(index));
    if (!rec.trap_response || rec.trap_copies_remaining <= 0) {
        throw std::runtime_error("trap copy exhausted for challenge " + std::to_string(index));
    }
    --rec.trap_copies_remaining;
    ++copies_consumed;
    return *rec.trap_response;
}

TestOutcome resolve_outcome(double accept_probability, SampleMode mode, RngStream &rng) {
    if (mode == SampleMode::exact) {
        if (accept_probability >= 1.0 - kExactModeTol) {
            return TestOutcome{true, 0};
        }
        if (accept_probability <= kExactModeTol) {
            return TestOutcome{false, 1};
        }
    }
    return sample_outcome_from_probability(accept_probability, rng);
}

HrvSession hrv_setup(ProtocolKind kind, const ProtocolConfig &cfg, RngStream &rng) {
    if (kind != ProtocolKind::hrv_swap && kind != ProtocolKind::hrv_gswap) {
        throw std::invalid_argument("hrv_setup requires an hrv protocol kind");
    }
    cfg.validate(kind);
    QPufDevice device = QPufDevice::generate(cfg.dim, rng);
    CrpDatabase db;
    db.records.reserve(static_cast<std::size_t>(cfg.database_size));
    for (int k = 0; k < cfg.database_size; ++k) {
        PureState challenge = haar_random_state(cfg.dim, rng);
        PureState response = device.eval(challenge);
        // The verifier queries each challenge M times at enrolment; the
        // remaining M-1 evaluations only feed the ledger.
        for (int extra = 1; extra < cfg.copies; ++extra) {
            device.eval(challenge);
        }
        db.records.push_back(CrpRecord{std::move(challenge), std::move(response), cfg.copies,
                                       std::nullopt, 0});
    }
    const std::uint64_t setup_queries = device.query_count();
    return HrvSession{kind, cfg, std::move(device), std::move(db), setup_queries};
}

VerificationResult hrv_run(HrvSession &session, HrvProver &prover, RngStream &rng) {
    const ProtocolConfig &cfg = session.cfg;
    const bool swap_variant = session.kind == ProtocolKind::hrv_swap;
    const TestKind test = swap_variant ? TestKind::swap_test() : TestKind::gswap_test(cfg.copies);
    const std::uint64_t queries_before = session.device.query_count();

    Transcript transcript;
    transcript.protocol = session.kind;
    transcript.mode = cfg.mode;
    transcript.seed = rng.seed();
    transcript.device_queries_setup = session.setup_queries;

    std::vector<TestOutcome> per_round;
    bool accepted = true;
    const std::vector<int> selected = sample_distinct_indices(cfg.rounds, cfg.database_size, rng);
    const int repetitions = swap_variant ? cfg.copies : 1;

    int round = 0;
    for (const int index : selected) {
        const PureState &challenge = session.database.records.at(static_cast<std::size_t>(index)).challenge;
        for (int rep = 0; rep < repetitions; ++rep) {
            PureState answer = prover.respond(challenge, rng);
            transcript.quantum_messages += 2; // challenge out, answer back
            double accept_prob = 0.0;
            if (swap_variant) {
                const PureState &reference = session.database.consume_response(index);
                accept_prob = accept_probability(test, answer, reference);
            } else {
                const PureState *reference = nullptr;
                for (int c = 0; c < cfg.copies; ++c) {
                    reference = &session.database.consume_response(index);
                }
                accept_prob = accept_probability(test, answer, *reference);
            }
            const TestOutcome outcome = resolve_outcome(accept_prob, cfg.mode, rng);
            accepted = accepted && outcome.accept;
            per_round.push_back(outcome);
            transcript.rounds.push_back(RoundRecord{round, index, rep, test.name(), accept_prob,
                                                    outcome.outcome_bit, -1});
            ++round;
        }
    }
    transcript.response_copies_consumed = session.database.copies_consumed;
    transcript.device_queries_run = session.device.query_count() - queries_before;
    return VerificationResult{accepted, std::move(per_round), std::move(transcript), std::nullopt,
                              std::nullopt};
}

LrvSession lrv_setup(const ProtocolConfig &cfg, RngStream &rng) {
    cfg.validate(ProtocolKind::lrv);
    QPufDevice device = QPufDevice::generate(cfg.dim, rng);
    CrpDatabase db;
    db.records.reserve(static_cast<std::size_t>(cfg.database_size));
    for (int k = 0; k < cfg.database_size; ++k) {
        PureState challenge = haar_random_state(cfg.dim, rng);
        PureState response = device.eval(challenge);
        PureState perp = orthogonal_state(challenge, rng);
        PureState trap = device.eval(perp);
        db.records.push_back(
            CrpRecord{std::move(challenge), std::move(response), 1, std::move(trap), 1});
    }
    const std::uint64_t setup_queries = device.query_count();
    return LrvSession{cfg, std::move(device), std::move(db), setup_queries};
}

TrapPlacement place_traps(int rounds, double valid_fraction, RngStream &rng) {
    if (rounds < 1) {
        throw std::invalid_argument("place_traps: rounds must be >= 1");
    }
    if (valid_fraction < 0.0 || valid_fraction > 1.0) {
        throw std::invalid_argument("place_traps: valid_fraction must lie in [0, 1]");
    }
    const double exact_count = valid_fraction * rounds;
    if (!nearly_integral(exact_count)) {
        throw std::invalid_argument("place_traps: p*N must be integral");
    }
    const int valid_count = static_cast<int>(std::llround(exact_count));
    std::vector<int> chosen = sample_distinct_indices(valid_count, rounds, rng);
    std::sort(chosen.begin(), chosen.end());
    TrapPlacement placement;
    placement.marks.assign(static_cast<std::size_t>(rounds), 0);
    for (const int i : chosen) {
        placement.marks[static_cast<std::size_t>(i)] = 1;
    }
    placement.valid_positions = std::move(chosen);
    return placement;
}

int ones_target(int trap_count, double kappa) {
    if (trap_count < 0 || kappa < 0.0 || kappa > 1.0) {
        throw std::invalid_argument("ones_target: bad trap count or kappa");
    }
    return static_cast<int>(std::floor(kappa * trap_count + 0.5));
}

CverVerdict cver_verdict(const OutcomeString &outcome, const TrapPlacement &placement, double tau,
                         double kappa) {
    if (outcome.size() != placement.size()) {
        throw std::invalid_argument("cver: outcome/placement length mismatch");
    }
    if (tau < 0.0) {
        throw std::invalid_argument("cver: tau must be >= 0");
    }
    bool test1 = true;
    for (const int i : placement.valid_positions) {
        if (outcome.bits[static_cast<std::size_t>(i)] != 0) {
            test1 = false;
            break;
        }
    }
    int ones_outside = 0;
    for (int i = 0; i < outcome.size(); ++i) {
        if (placement.marks[static_cast<std::size_t>(i)] == 0 &&
            outcome.bits[static_cast<std::size_t>(i)] != 0) {
            ++ones_outside;
        }
    }
    const int target = ones_target(placement.trap_count(), kappa);
    const bool test2 = std::abs(ones_outside - target) <= tau + 1e-12;
    return CverVerdict{test1 && test2, test1, test2, ones_outside, target};
}

bool cver(const OutcomeString &outcome, const TrapPlacement &placement, double tau, double kappa) {
    return cver_verdict(outcome, placement, tau, kappa).pass;
}

OutcomeString HonestLrvProver::respond(const std::vector<PureState> &challenges,
                                       const std::vector<PureState> &b_states, RngStream &rng) {
    if (challenges.size() != b_states.size()) {
        throw std::invalid_argument("honest lrv prover: round count mismatch");
    }
    OutcomeString outcome;
    outcome.bits.reserve(challenges.size());
    for (std::size_t i = 0; i < challenges.size(); ++i) {
        PureState own = device_->eval(challenges[i]);
        const double accept_prob = accept_probability(TestKind::swap_test(), own, b_states[i]);
        const TestOutcome result = resolve_outcome(accept_prob, mode_, rng);
        outcome.bits.push_back(static_cast<std::uint8_t>(result.outcome_bit));
    }
    return outcome;
}

VerificationResult lrv_run(LrvSession &session, LrvProver &prover, RngStream &rng) {
    const ProtocolConfig &cfg = session.cfg;
    const std::uint64_t queries_before = session.device.query_count();

    Transcript transcript;
    transcript.protocol = ProtocolKind::lrv;
    transcript.mode = cfg.mode;
    transcript.seed = rng.seed();
    transcript.device_queries_setup = session.setup_queries;

    const TrapPlacement placement = place_traps(cfg.rounds, cfg.valid_fraction, rng);
    const std::vector<int> selected = sample_distinct_indices(cfg.rounds, cfg.database_size, rng);

    std::vector<PureState> challenges;
    std::vector<PureState> b_states;
    challenges.reserve(static_cast<std::size_t>(cfg.rounds));
    b_states.reserve(static_cast<std::size_t>(cfg.rounds));
    for (int r = 0; r < cfg.rounds; ++r) {
        const int index = selected[static_cast<std::size_t>(r)];
        challenges.push_back(session.database.records.at(static_cast<std::size_t>(index)).challenge);
        if (placement.marks[static_cast<std::size_t>(r)] == 1) {
            b_states.push_back(session.database.consume_response(index));
        } else {
            b_states.push_back(session.database.consume_trap(index));
        }
        transcript.quantum_messages += 1; // challenge and b-state travel together
    }

    OutcomeString outcome = prover.respond(challenges, b_states, rng);
    transcript.classical_messages += 1;
    if (outcome.size() != cfg.rounds) {
        throw std::runtime_error("lrv prover returned a malformed outcome string");
    }

    const CverVerdict verdict = cver_verdict(outcome, placement, cfg.tau, cfg.kappa);
    std::vector<TestOutcome> per_round;
    per_round.reserve(static_cast<std::size_t>(cfg.rounds));
    for (int r = 0; r < cfg.rounds; ++r) {
        const int bit = outcome.bits[static_cast<std::size_t>(r)];
        per_round.push_back(TestOutcome{bit == 0, bit});
        transcript.rounds.push_back(RoundRecord{r, selected[static_cast<std::size_t>(r)], 0, "swap",
                                                -1.0, bit,
                                                placement.marks[static_cast<std::size_t>(r)]});
    }
    transcript.response_copies_consumed = session.database.copies_consumed;
    transcript.device_queries_run = session.device.query_count() - queries_before;
    return VerificationResult{verdict.pass, std::move(per_round), std::move(transcript),
                              std::move(outcome), verdict};
}

void reset_database(CrpDatabase &database, const ProtocolConfig &cfg, ProtocolKind kind) {
    const bool lrv = kind == ProtocolKind::lrv;
    for (auto &record : database.records) {
        record.copies_remaining = lrv ? 1 : cfg.copies;
        record.trap_copies_remaining = lrv && record.trap_response ? 1 : 0;
    }
    database.copies_consumed = 0;
}

} // namespace qpufid
