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
 * @file adversaries.hpp
 * Adversary models for both protocol families and the attack-game harness
 * that pits them against full protocol runs.
 *
 * Classical adversaries submit outcome strings without touching any quantum
 * state; quantum adversaries get a bounded number of device queries while
 * the hardware is in transit and build forgeries from the learned subspace.
 */
#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "qpufid/protocol.hpp"
#include "qpufid/qpuf_device.hpp"
#include "qpufid/qstate.hpp"
#include "qpufid/rng.hpp"
#include "qpufid/stats.hpp"

namespace qpufid {

/// String with each bit independently 0 with probability alpha.
OutcomeString independent_guess_string(int rounds, double alpha, RngStream &rng);

/// String with exactly `ones` 1-bits at uniformly random positions.
OutcomeString fixed_weight_string(int rounds, int ones, RngStream &rng);

/// Global strategy: draw the 1-count uniformly from the admissible window
/// around the expected trap-position count, then place it uniformly.
OutcomeString global_strategy_string(int rounds, double valid_fraction, double tau, double kappa,
                                     RngStream &rng);

/// hrv baseline with no device access: answers every challenge with a fresh
/// Haar-random state.
class HaarResponder : public HrvProver {
  public:
    explicit HaarResponder(Dimension dim) : dim_(dim) {}
    PureState respond(const PureState &, RngStream &rng) override {
        return haar_random_state(dim_, rng);
    }
    [[nodiscard]] std::string name() const override { return "haar-responder"; }

  private:
    Dimension dim_;
};

/// How the learning adversary picks its transit-window challenges.
enum class ChallengeStyle { haar, computational };

/**
 * @brief Bounded-query adversary that learns a d-dimensional slice of the
 * device unitary and forges by projecting challenges onto it.
 *
 * Learning orthonormalizes the queried challenges and applies the same
 * eliminations to the responses, producing matched input/output bases of a
 * partial isometry that agrees with the device on the learned span.
 */
class SubspaceAdversary : public Forger {
  public:
    /// Spends `queries` transit-window evaluations; throws
    /// QueryBudgetExhausted when the window is too small.
    static SubspaceAdversary learn(TransitWindow &window, int queries, RngStream &rng,
                                   ChallengeStyle style = ChallengeStyle::haar);

    /// Projection of the challenge onto the learned span, mapped through the
    /// output basis; falls back to a Haar draw from the unlearned complement
    /// when the challenge has no weight on the span.
    PureState forge(const PureState &challenge, RngStream &rng) override;

    [[nodiscard]] int learned_dimension() const override { return input_basis_.dimension(); }

    /// Squared norm of the challenge's projection onto the learned span.
    [[nodiscard]] double projection_weight(const PureState &challenge) const;

    [[nodiscard]] const SubspaceBasis &input_basis() const { return input_basis_; }
    [[nodiscard]] const SubspaceBasis &output_basis() const { return output_basis_; }
    [[nodiscard]] int space_dimension() const { return space_dim_; }

  private:
    SubspaceAdversary(SubspaceBasis in, SubspaceBasis out, int space_dim)
        : input_basis_(std::move(in)), output_basis_(std::move(out)), space_dim_(space_dim) {}

    SubspaceBasis input_basis_;
    SubspaceBasis output_basis_;
    int space_dim_;
};

/// Adapter exposing a Forger as an hrv prover, with optional fidelity
/// instrumentation against the privileged ground truth.
class ForgingHrvProver : public HrvProver {
  public:
    ForgingHrvProver(Forger &forger, QPufDevice &device)
        : forger_(&forger), device_(&device) {}
    PureState respond(const PureState &challenge, RngStream &rng) override;
    [[nodiscard]] std::string name() const override { return "subspace-forger"; }

    [[nodiscard]] std::uint64_t responses() const { return responses_; }
    [[nodiscard]] double mean_fidelity_sq() const;
    [[nodiscard]] double stddev_fidelity_sq() const;

  private:
    Forger *forger_;
    QPufDevice *device_;
    std::uint64_t responses_ = 0;
    double sum_f2_ = 0.0;
    double sum_f2_sq_ = 0.0;
};

/// Mapping from the adversary's equality-test outcome to its validity guess.
enum class TrapDecisionRule { accept_means_valid, always_valid, coin_flip };

/// Collective attacks treat rounds independently; coherent attacks may
/// correlate them. Both reduce to per-round decisions here, and the harness
/// records the product structure so the reduction can be checked empirically.
enum class AttackMode { collective, coherent };

struct TrapGuess {
    int guessed_mark;
    TestOutcome outcome;
    /// The forged reference the test ran against.
    PureState reference;
};

/// One round of trap detection: forge a reference for the challenge, run the
/// sampled ideal equality test against the unknown state, and map the result
/// through the decision rule. Coherent attacks reduce to the same per-round
/// map applied in product form, so both modes share this implementation.
TrapGuess trap_distinguish(SubspaceAdversary &adversary, const PureState &challenge,
                           const PureState &unknown, AttackMode mode, TrapDecisionRule rule,
                           RngStream &rng);

/// lrv prover that ignores the quantum states and submits a strategy string.
class ClassicalLrvProver : public LrvProver {
  public:
    enum class Strategy { independent, global, guess_set };

    ClassicalLrvProver(Strategy strategy, const ProtocolConfig &cfg, double alpha);
    OutcomeString respond(const std::vector<PureState> &challenges,
                          const std::vector<PureState> &b_states, RngStream &rng) override;
    [[nodiscard]] std::string name() const override;

  private:
    Strategy strategy_;
    int rounds_;
    double alpha_;
    double valid_fraction_;
    double tau_;
    double kappa_;
};

/// lrv prover that runs trap detection per round and reports zeros on rounds
/// guessed valid while distributing the expected 1-count over rounds guessed
/// to be traps.
class SubspaceLrvProver : public LrvProver {
  public:
    SubspaceLrvProver(SubspaceAdversary &adversary, double kappa, AttackMode mode,
                      TrapDecisionRule rule)
        : adversary_(&adversary), kappa_(kappa), mode_(mode), rule_(rule) {}
    OutcomeString respond(const std::vector<PureState> &challenges,
                          const std::vector<PureState> &b_states, RngStream &rng) override;
    [[nodiscard]] std::string name() const override { return "subspace-distinguisher"; }

    /// Per-round validity guesses from the most recent respond() call.
    [[nodiscard]] const std::vector<int> &last_guesses() const { return last_guesses_; }

  private:
    SubspaceAdversary *adversary_;
    double kappa_;
    AttackMode mode_;
    TrapDecisionRule rule_;
    std::vector<int> last_guesses_;
};

enum class AttackerKind {
    honest,
    haar_responder,
    classical_independent,
    classical_global,
    classical_guess_set,
    quantum_collective,
    quantum_coherent,
};

const char *attacker_name(AttackerKind kind);
AttackerKind attacker_from_name(const std::string &name);

struct AttackerSpec {
    AttackerKind kind = AttackerKind::honest;
    /// classical_independent: probability of guessing 0 per position.
    double alpha = 0.75;
    /// quantum attackers: transit-window queries to spend on learning.
    int learn_queries = 0;
    TrapDecisionRule rule = TrapDecisionRule::accept_means_valid;
    ChallengeStyle style = ChallengeStyle::haar;
};

struct AttackGameOptions {
    /// Worker threads for trials with no shared mutable state (classical
    /// strategies). Stateful games run sequentially regardless.
    unsigned threads = 1;
    /// Keep the per-trial success bits for serialization.
    bool keep_per_trial = true;
};

struct AttackGameRecord {
    std::string protocol;
    std::string attacker;
    int trials = 0;
    std::uint64_t successes = 0;
    double empirical_rate = 0.0;
    /// Wilson 95% interval; for zero successes the upper end is the exact
    /// one-sided 95% bound.
    BinomialCi ci{0.0, 0.0};
    double analytic_bound = std::numeric_limits<double>::quiet_NaN();
    std::string bound_id;
    double predicted_rate = std::numeric_limits<double>::quiet_NaN();
    std::string prediction_id;

    // Quantum-attack instrumentation.
    double mean_forgery_fidelity_sq = std::numeric_limits<double>::quiet_NaN();
    double stddev_forgery_fidelity_sq = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t guess_rounds = 0;
    std::uint64_t correct_guesses = 0;
    double per_round_guess_accuracy = std::numeric_limits<double>::quiet_NaN();
    double per_round_accuracy_bound = std::numeric_limits<double>::quiet_NaN();
    /// Guess accuracy conditioned on the round's true mark. The projection
    /// test is highly asymmetric between the classes, so the pooled accuracy
    /// alone does not determine the joint rate below.
    double per_round_accuracy_valid = std::numeric_limits<double>::quiet_NaN();
    double per_round_accuracy_trap = std::numeric_limits<double>::quiet_NaN();
    double joint_all_correct_rate = std::numeric_limits<double>::quiet_NaN();
    /// Product of the mark-conditional accuracies over the per-run
    /// valid/trap split; rounds are independent for collective attacks, so
    /// the joint rate should match this within sampling error.
    double joint_product_prediction = std::numeric_limits<double>::quiet_NaN();
    int learned_dimension = -1;

    /// True when the game skipped state preparation because the strategy
    /// never inspects the states; the verdict distribution is unchanged.
    bool quantum_layer_elided = false;
    std::uint64_t seed = 0;
    std::vector<std::uint8_t> per_trial_success;
};

/**
 * @brief Runs `trials` independent protocol executions against the given
 * adversary and aggregates acceptance statistics with their analytic
 * predictions. Trial t draws from substream t+1 of cfg.seed; enrolment and
 * learning use substream 0, so results are reproducible at any thread count.
 */
AttackGameRecord run_attack_game(ProtocolKind kind, const AttackerSpec &attacker,
                                 const ProtocolConfig &cfg, int trials,
                                 const AttackGameOptions &options = {});

} // namespace qpufid
