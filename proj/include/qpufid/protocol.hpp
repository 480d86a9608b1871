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
 * @file protocol.hpp
 * The two qPUF identification protocols.
 *
 * hrv-id ("high resource verifier"): the verifier stores quantum response
 * copies and compares the prover's answers with SWAP tests (one copy per
 * repetition, N*M rounds) or one generalized SWAP over M copies per
 * challenge (N rounds).
 *
 * lrv-id ("low resource verifier"): the verifier sends each challenge
 * together with either the valid response (mark b=1) or a trap state
 * orthogonal to it (b=0). The prover equality-tests the pair and returns the
 * N outcome bits; the classical verdict function cver checks zeros on the
 * marked positions and the 1-count statistics on the trap positions.
 */
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qpufid/equality_tests.hpp"
#include "qpufid/qpuf_device.hpp"
#include "qpufid/qstate.hpp"
#include "qpufid/rng.hpp"

namespace qpufid {

enum class ProtocolKind { hrv_swap, hrv_gswap, lrv };

const char *protocol_name(ProtocolKind kind);
ProtocolKind protocol_from_name(const std::string &name);

enum class SampleMode { exact, sampled };

/**
 * Exact mode resolves outcomes whose acceptance probability is 0 or 1
 * (within this tolerance) deterministically and samples the rest; sampled
 * mode draws every outcome. Honest runs are therefore noise-free exactly
 * where the physics is deterministic.
 */
constexpr double kExactModeTol = 1e-9;

struct ProtocolConfig {
    Dimension dim{1, 2};
    /// Stored challenge-response pairs K.
    int database_size = 1;
    /// Identification rounds N (challenges used per run).
    int rounds = 1;
    /// Response copies per challenge M (hrv variants).
    int copies = 1;
    /// Absolute tolerance on the trap-position 1-count (lrv).
    double tau = 0.0;
    /// Expected 1-rate on trap positions; 1/2 for orthogonal traps.
    double kappa = 0.5;
    /// Fraction p of positions carrying the valid response (lrv).
    double valid_fraction = 0.5;
    SampleMode mode = SampleMode::sampled;
    std::uint64_t seed = 0;
    /// Adversary queries allowed while the device is in transit;
    /// defaults to 10 per qubit when unset.
    std::optional<std::uint64_t> transit_budget;

    [[nodiscard]] std::uint64_t effective_transit_budget() const {
        return transit_budget ? *transit_budget : default_transit_budget(dim);
    }

    /// Throws std::invalid_argument naming the offending field.
    void validate(ProtocolKind kind) const;
};

struct CrpRecord {
    PureState challenge;
    PureState response;
    int copies_remaining = 0;
    std::optional<PureState> trap_response;
    int trap_copies_remaining = 0;
};

struct CrpDatabase {
    std::vector<CrpRecord> records;
    int copies_consumed = 0;

    /// Consumes one stored response copy; throws on exhaustion.
    const PureState &consume_response(int index);
    /// Consumes the stored trap copy; throws on exhaustion.
    const PureState &consume_trap(int index);
};

struct TrapPlacement {
    /// marks[i] == 1 when position i carries the valid response.
    std::vector<std::uint8_t> marks;
    /// Sorted indices with marks == 1 (the set P).
    std::vector<int> valid_positions;

    [[nodiscard]] int size() const { return static_cast<int>(marks.size()); }
    [[nodiscard]] int trap_count() const {
        return size() - static_cast<int>(valid_positions.size());
    }
};

struct OutcomeString {
    std::vector<std::uint8_t> bits;

    [[nodiscard]] int size() const { return static_cast<int>(bits.size()); }
};

struct RoundRecord {
    int round;
    int challenge_index;
    int repetition;
    std::string test;
    double accept_probability;
    int outcome_bit;
    /// lrv only: the mark bit of this round, -1 otherwise.
    int trap_mark = -1;
};

struct Transcript {
    ProtocolKind protocol;
    SampleMode mode;
    std::uint64_t seed;
    int quantum_messages = 0;
    int classical_messages = 0;
    int response_copies_consumed = 0;
    std::uint64_t device_queries_setup = 0;
    std::uint64_t device_queries_run = 0;
    std::vector<RoundRecord> rounds;
};

struct CverVerdict {
    bool pass;
    bool test1_pass;
    bool test2_pass;
    int ones_outside;
    int ones_target;

    explicit operator bool() const { return pass; }
};

struct VerificationResult {
    bool accepted;
    std::vector<TestOutcome> per_round;
    Transcript transcript;
    std::optional<OutcomeString> outcome_string;
    std::optional<CverVerdict> verdict;
};

struct HrvSession {
    ProtocolKind kind;
    ProtocolConfig cfg;
    QPufDevice device;
    CrpDatabase database;
    std::uint64_t setup_queries = 0;

    /// Adversary access window while the device changes hands.
    TransitWindow open_transit() {
        return TransitWindow(device, cfg.effective_transit_budget());
    }
};

struct LrvSession {
    ProtocolConfig cfg;
    QPufDevice device;
    CrpDatabase database;
    std::uint64_t setup_queries = 0;

    TransitWindow open_transit() {
        return TransitWindow(device, cfg.effective_transit_budget());
    }
};

/** @brief Prover side of hrv-id: answers one challenge per invocation. */
class HrvProver {
  public:
    virtual ~HrvProver() = default;
    virtual PureState respond(const PureState &challenge, RngStream &rng) = 0;
    [[nodiscard]] virtual std::string name() const = 0;
};

/// Honest prover holding the device; responses are exact evaluations.
class HonestHrvProver : public HrvProver {
  public:
    explicit HonestHrvProver(QPufDevice &device) : device_(&device) {}
    PureState respond(const PureState &challenge, RngStream &) override {
        return device_->eval(challenge);
    }
    [[nodiscard]] std::string name() const override { return "honest"; }

  private:
    QPufDevice *device_;
};

/** @brief Prover side of lrv-id: sees all rounds, returns the outcome bits. */
class LrvProver {
  public:
    virtual ~LrvProver() = default;
    virtual OutcomeString respond(const std::vector<PureState> &challenges,
                                  const std::vector<PureState> &b_states, RngStream &rng) = 0;
    [[nodiscard]] virtual std::string name() const = 0;
};

/// Honest prover: evaluates each challenge and SWAP-tests against the
/// received state, reporting the classical outcome bits.
class HonestLrvProver : public LrvProver {
  public:
    HonestLrvProver(QPufDevice &device, SampleMode mode) : device_(&device), mode_(mode) {}
    OutcomeString respond(const std::vector<PureState> &challenges,
                          const std::vector<PureState> &b_states, RngStream &rng) override;
    [[nodiscard]] std::string name() const override { return "honest"; }

  private:
    QPufDevice *device_;
    SampleMode mode_;
};

/// Resolves a test outcome under the given mode (see kExactModeTol).
TestOutcome resolve_outcome(double accept_probability, SampleMode mode, RngStream &rng);

/**
 * @brief Enrolment for hrv-id: generates the device and a database of K
 * challenges with M response copies each (K*M device queries).
 */
HrvSession hrv_setup(ProtocolKind kind, const ProtocolConfig &cfg, RngStream &rng);

/**
 * @brief Runs one hrv-id identification against the session database.
 *
 * Draws N distinct challenge indices uniformly. The swap variant consumes
 * one copy per repetition (N*M SWAP rounds); the gswap variant consumes M
 * copies per challenge (N generalized-SWAP rounds).
 */
VerificationResult hrv_run(HrvSession &session, HrvProver &prover, RngStream &rng);

/**
 * @brief Enrolment for lrv-id: K challenges, one response copy and one trap
 * state (response of an orthogonal challenge) each; 2K device queries.
 */
LrvSession lrv_setup(const ProtocolConfig &cfg, RngStream &rng);

/// Uniform placement of round(p*N) valid-response marks among N positions.
TrapPlacement place_traps(int rounds, double valid_fraction, RngStream &rng);

/// count distinct indices drawn uniformly from [0, population).
std::vector<int> sample_distinct_indices(int count, int population, RngStream &rng);

/// Restocks consumed response copies so a session can be rerun. This is a
/// harness convenience for repeated-trial experiments, not a protocol move.
void reset_database(CrpDatabase &database, const ProtocolConfig &cfg, ProtocolKind kind);

/// Expected 1-count on `trap_count` trap positions (kappa * traps, rounded
/// half up so protocol-valid configurations keep their integral target).
int ones_target(int trap_count, double kappa);

/**
 * @brief Classical verdict over the prover's outcome bits.
 *
 * test1: every marked (b=1) position reported 0.
 * test2: the trap-position 1-count lies within tau of ones_target.
 */
CverVerdict cver_verdict(const OutcomeString &outcome, const TrapPlacement &placement, double tau,
                         double kappa);
bool cver(const OutcomeString &outcome, const TrapPlacement &placement, double tau, double kappa);

/** @brief Runs one lrv-id identification (placement, N rounds, cver). */
VerificationResult lrv_run(LrvSession &session, LrvProver &prover, RngStream &rng);

} // namespace qpufid
