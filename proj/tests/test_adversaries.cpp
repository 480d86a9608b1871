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
#include <stdexcept>
#include <string>

#include "qpufid/adversaries.hpp"
#include "qpufid/analysis.hpp"

using namespace qpufid;

namespace {

ProtocolConfig lrv_cfg(int qubits, int rounds, double tau, std::uint64_t seed) {
    ProtocolConfig cfg;
    cfg.dim = Dimension::from_qubits(qubits);
    cfg.database_size = rounds;
    cfg.rounds = rounds;
    cfg.tau = tau;
    cfg.seed = seed;
    return cfg;
}

} // namespace

TEST_CASE("independent guess strings hit the requested zero rate") {
    RngStream rng(51);
    const double alpha = 0.7;
    const int rounds = 50;
    const int trials = 400;
    int zeros = 0;
    for (int t = 0; t < trials; ++t) {
        const OutcomeString s = independent_guess_string(rounds, alpha, rng);
        REQUIRE(s.size() == rounds);
        for (const auto b : s.bits) zeros += b == 0 ? 1 : 0;
    }
    const double rate = static_cast<double>(zeros) / (rounds * trials);
    const double sigma = std::sqrt(alpha * (1.0 - alpha) / (rounds * trials));
    CHECK(std::abs(rate - alpha) < 4.0 * sigma);
}

TEST_CASE("fixed weight strings have exactly the requested weight") {
    RngStream rng(52);
    for (int ones : {0, 3, 8}) {
        const OutcomeString s = fixed_weight_string(8, ones, rng);
        int weight = 0;
        for (const auto b : s.bits) weight += b;
        CHECK(weight == ones);
    }
    CHECK_THROWS_AS(fixed_weight_string(4, 5, rng), std::invalid_argument);
}

TEST_CASE("global strategy strings keep their weight inside the window") {
    RngStream rng(53);
    const int rounds = 8;
    const double tau = 1.0;
    bool saw_low = false;
    bool saw_high = false;
    for (int t = 0; t < 400; ++t) {
        const OutcomeString s = global_strategy_string(rounds, 0.5, tau, 0.5, rng);
        int weight = 0;
        for (const auto b : s.bits) weight += b;
        CHECK(weight >= 1); // target 2 with tau 1
        CHECK(weight <= 3);
        saw_low = saw_low || weight == 1;
        saw_high = saw_high || weight == 3;
    }
    CHECK(saw_low);
    CHECK(saw_high);
}

TEST_CASE("learning with no queries yields an empty span") {
    RngStream rng(54);
    const Dimension dim = Dimension::from_qubits(4);
    QPufDevice device = QPufDevice::generate(dim, rng);
    TransitWindow window(device, 10);
    SubspaceAdversary adversary = SubspaceAdversary::learn(window, 0, rng);
    CHECK(adversary.learned_dimension() == 0);
    CHECK(window.remaining() == 10);

    const PureState challenge = haar_random_state(dim, rng);
    CHECK(adversary.projection_weight(challenge) == doctest::Approx(0.0));
    const PureState forged = adversary.forge(challenge, rng);
    CHECK(forged.amplitudes.norm() == doctest::Approx(1.0));
}

TEST_CASE("haar learning spans one dimension per query") {
    RngStream rng(55);
    const Dimension dim = Dimension::from_qubits(10);
    QPufDevice device = QPufDevice::generate(dim, rng);
    TransitWindow window(device, 100);
    SubspaceAdversary adversary = SubspaceAdversary::learn(window, 10, rng);
    CHECK(adversary.learned_dimension() == 10);
    CHECK(adversary.space_dimension() == 1024);
    CHECK(device.query_count() == 10);

    CHECK_THROWS_AS(
        [&] {
            TransitWindow tight(device, 3);
            SubspaceAdversary::learn(tight, 5, rng);
        }(),
        QueryBudgetExhausted);
}

TEST_CASE("computational-style learning spans the first basis states") {
    RngStream rng(56);
    const Dimension dim = Dimension::from_qubits(3);
    QPufDevice device = QPufDevice::generate(dim, rng);
    TransitWindow window(device, 30);
    SubspaceAdversary adversary =
        SubspaceAdversary::learn(window, 4, rng, ChallengeStyle::computational);
    CHECK(adversary.learned_dimension() == 4);
    for (int i = 0; i < 8; ++i) {
        const double w = adversary.projection_weight(basis_state(dim, i));
        CHECK(w == doctest::Approx(i < 4 ? 1.0 : 0.0));
    }
}

TEST_CASE("forgeries are exact on the learned span") {
    RngStream rng(57);
    const Dimension dim = Dimension::from_qubits(5);
    QPufDevice device = QPufDevice::generate(dim, rng);
    TransitWindow window(device, 50);

    // Remember the queried challenges by replaying the learning stream.
    SubspaceAdversary adversary =
        SubspaceAdversary::learn(window, 6, rng, ChallengeStyle::computational);

    // A combination of learned basis states is still inside the span.
    Vector combo = Vector::Zero(dim.size);
    combo(0) = Complex(0.6, 0.0);
    combo(3) = Complex(0.0, 0.8);
    const PureState challenge = normalized_state(combo);
    CHECK(adversary.projection_weight(challenge) == doctest::Approx(1.0));

    const PureState forged = adversary.forge(challenge, rng);
    const PureState truth = DeviceInspector::apply(device, challenge);
    CHECK(fidelity(forged, truth) >= 1.0 - 1e-9);
}

TEST_CASE("forgeries of unlearned challenges match the subspace overlap law") {
    RngStream rng(58);
    const Dimension dim = Dimension::from_qubits(6);
    QPufDevice device = QPufDevice::generate(dim, rng);
    TransitWindow window(device, 60);
    SubspaceAdversary adversary = SubspaceAdversary::learn(window, 8, rng);

    const int trials = 2000;
    double sum_f2 = 0.0;
    for (int t = 0; t < trials; ++t) {
        const PureState challenge = haar_random_state(dim, rng);
        const PureState forged = adversary.forge(challenge, rng);
        const double f = fidelity(forged, DeviceInspector::apply(device, challenge));
        sum_f2 += f * f;
    }
    const double mean = sum_f2 / trials;
    const double d = 8.0;
    const double space = 64.0;
    // F^2 is Beta(d, D-d) under Haar challenges.
    const double var = d * (space - d) / (space * space * (space + 1.0));
    CHECK(std::abs(mean - d / space) < 4.0 * std::sqrt(var / trials));
}

TEST_CASE("forging a challenge orthogonal to the span avoids the learned output") {
    RngStream rng(59);
    const Dimension dim = Dimension::from_qubits(3);
    QPufDevice device = QPufDevice::generate(dim, rng);
    TransitWindow window(device, 30);
    SubspaceAdversary adversary =
        SubspaceAdversary::learn(window, 4, rng, ChallengeStyle::computational);

    const PureState unlearned = basis_state(dim, 6);
    CHECK(adversary.projection_weight(unlearned) == doctest::Approx(0.0));
    const PureState forged = adversary.forge(unlearned, rng);
    CHECK(forged.amplitudes.norm() == doctest::Approx(1.0));
    CHECK(subspace_overlap(forged, adversary.output_basis()) < 1e-9);
}

TEST_CASE("trap distinguishing is perfect with a fully learned device") {
    RngStream rng(60);
    const Dimension dim = Dimension::from_qubits(2);
    QPufDevice device = QPufDevice::generate(dim, rng);
    TransitWindow window(device, 20);
    SubspaceAdversary adversary =
        SubspaceAdversary::learn(window, 4, rng, ChallengeStyle::computational);
    CHECK(adversary.learned_dimension() == 4);

    const PureState challenge = haar_random_state(dim, rng);
    const PureState truth = DeviceInspector::apply(device, challenge);
    const PureState trap = DeviceInspector::apply(device, orthogonal_state(challenge, rng));

    for (int t = 0; t < 10; ++t) {
        const TrapGuess valid = trap_distinguish(adversary, challenge, truth,
                                                 AttackMode::collective,
                                                 TrapDecisionRule::accept_means_valid, rng);
        CHECK(valid.guessed_mark == 1);
        CHECK(valid.outcome.accept);
        CHECK(fidelity(valid.reference, truth) >= 1.0 - 1e-9);

        const TrapGuess invalid = trap_distinguish(adversary, challenge, trap,
                                                   AttackMode::collective,
                                                   TrapDecisionRule::accept_means_valid, rng);
        CHECK(invalid.guessed_mark == 0);

        // The coherent mode reduces to the same per-round map.
        CHECK(trap_distinguish(adversary, challenge, trap, AttackMode::coherent,
                               TrapDecisionRule::accept_means_valid, rng)
                  .guessed_mark == 0);
        CHECK(trap_distinguish(adversary, challenge, trap, AttackMode::collective,
                               TrapDecisionRule::always_valid, rng)
                  .guessed_mark == 1);
    }
}

TEST_CASE("attacker names round-trip") {
    for (const AttackerKind kind :
         {AttackerKind::honest, AttackerKind::haar_responder, AttackerKind::classical_independent,
          AttackerKind::classical_global, AttackerKind::classical_guess_set,
          AttackerKind::quantum_collective, AttackerKind::quantum_coherent}) {
        CHECK(attacker_from_name(attacker_name(kind)) == kind);
    }
    CHECK_THROWS_AS(attacker_from_name("nope"), std::invalid_argument);
}

TEST_CASE("attack game rejects incompatible pairings") {
    const ProtocolConfig cfg = lrv_cfg(4, 8, 1.0, 1);
    AttackerSpec spec;
    spec.kind = AttackerKind::classical_global;
    CHECK_THROWS_AS(run_attack_game(ProtocolKind::hrv_swap, spec, cfg, 10), std::invalid_argument);
    spec.kind = AttackerKind::haar_responder;
    CHECK_THROWS_AS(run_attack_game(ProtocolKind::lrv, spec, cfg, 10), std::invalid_argument);
    spec.kind = AttackerKind::honest;
    CHECK_THROWS_AS(run_attack_game(ProtocolKind::lrv, spec, cfg, 0), std::invalid_argument);
}

TEST_CASE("honest hrv attack game accepts every exact-mode trial") {
    ProtocolConfig cfg;
    cfg.dim = Dimension::from_qubits(3);
    cfg.database_size = 4;
    cfg.rounds = 3;
    cfg.copies = 2;
    cfg.mode = SampleMode::exact;
    cfg.seed = 77;

    AttackerSpec spec;
    spec.kind = AttackerKind::honest;
    const AttackGameRecord rec = run_attack_game(ProtocolKind::hrv_gswap, spec, cfg, 40);
    CHECK(rec.empirical_rate == 1.0);
    CHECK(rec.analytic_bound == 1.0);
    CHECK(rec.predicted_rate == 1.0);
    CHECK(rec.protocol == std::string("hrv-gswap"));
    CHECK(rec.attacker == std::string("honest"));
    CHECK(rec.per_trial_success.size() == 40);
}

TEST_CASE("honest lrv attack game beats the completeness bound") {
    ProtocolConfig cfg = lrv_cfg(4, 16, 2.0, 78);
    AttackerSpec spec;
    spec.kind = AttackerKind::honest;
    const AttackGameRecord rec = run_attack_game(ProtocolKind::lrv, spec, cfg, 400);
    CHECK(rec.bound_id == std::string("cver_completeness_lower"));
    CHECK(rec.empirical_rate >= rec.analytic_bound);
    // The true acceptance rate is P(|Bin(8,1/2) - 4| <= 2) = 238/256.
    const double exact = 238.0 / 256.0;
    CHECK(std::abs(rec.empirical_rate - exact) < 4.5 * std::sqrt(exact * (1 - exact) / 400));
}

TEST_CASE("classical attack games land on their predictions") {
    const int trials = 20000;

    AttackGameOptions options;
    options.keep_per_trial = false;

    SUBCASE("independent at the optimal alpha") {
        ProtocolConfig cfg = lrv_cfg(4, 8, 0.0, 101);
        AttackerSpec spec;
        spec.kind = AttackerKind::classical_independent;
        spec.alpha = 0.75;
        const AttackGameRecord rec =
            run_attack_game(ProtocolKind::lrv, spec, cfg, trials, options);
        CHECK(rec.quantum_layer_elided);
        CHECK(rec.per_trial_success.empty());
        const double p = independent_success(8, 0.0, 0.75).value;
        CHECK(rec.predicted_rate == doctest::Approx(p));
        CHECK(std::abs(rec.empirical_rate - p) < 4.0 * std::sqrt(p * (1 - p) / trials));
    }

    SUBCASE("independent at a suboptimal alpha") {
        ProtocolConfig cfg = lrv_cfg(4, 8, 0.0, 102);
        AttackerSpec spec;
        spec.kind = AttackerKind::classical_independent;
        spec.alpha = 0.6;
        const AttackGameRecord rec =
            run_attack_game(ProtocolKind::lrv, spec, cfg, trials, options);
        const double p = independent_success(8, 0.0, 0.6).value;
        CHECK(std::abs(rec.empirical_rate - p) < 4.0 * std::sqrt(p * (1 - p) / trials));
    }

    SUBCASE("global with a widened window") {
        ProtocolConfig cfg = lrv_cfg(4, 8, 1.0, 103);
        AttackerSpec spec;
        spec.kind = AttackerKind::classical_global;
        const AttackGameRecord rec =
            run_attack_game(ProtocolKind::lrv, spec, cfg, trials, options);
        const double p = 11.0 / 42.0;
        CHECK(rec.predicted_rate == doctest::Approx(p));
        CHECK(std::abs(rec.empirical_rate - p) < 4.0 * std::sqrt(p * (1 - p) / trials));
        CHECK(rec.analytic_bound == doctest::Approx(11.0 / 14.0));
    }

    SUBCASE("guess-set") {
        ProtocolConfig cfg = lrv_cfg(4, 8, 0.0, 104);
        AttackerSpec spec;
        spec.kind = AttackerKind::classical_guess_set;
        const AttackGameRecord rec =
            run_attack_game(ProtocolKind::lrv, spec, cfg, trials, options);
        const double p = 3.0 / 14.0;
        CHECK(rec.predicted_rate == doctest::Approx(p));
        CHECK(std::abs(rec.empirical_rate - p) < 4.0 * std::sqrt(p * (1 - p) / trials));
    }
}

TEST_CASE("attack games are reproducible and thread-count invariant") {
    ProtocolConfig cfg = lrv_cfg(4, 8, 0.0, 105);
    AttackerSpec spec;
    spec.kind = AttackerKind::classical_independent;

    const AttackGameRecord a = run_attack_game(ProtocolKind::lrv, spec, cfg, 2000);
    const AttackGameRecord b = run_attack_game(ProtocolKind::lrv, spec, cfg, 2000);
    CHECK(a.per_trial_success == b.per_trial_success);

    AttackGameOptions two_threads;
    two_threads.threads = 2;
    const AttackGameRecord c = run_attack_game(ProtocolKind::lrv, spec, cfg, 2000, two_threads);
    CHECK(a.per_trial_success == c.per_trial_success);
    CHECK(a.successes == c.successes);
}

TEST_CASE("haar responder stays near the hrv soundness bound") {
    ProtocolConfig cfg;
    cfg.dim = Dimension::from_qubits(2);
    cfg.database_size = 4;
    cfg.rounds = 2;
    cfg.copies = 2;
    cfg.seed = 106;

    AttackerSpec spec;
    spec.kind = AttackerKind::haar_responder;
    const int trials = 3000;
    const AttackGameRecord rec = run_attack_game(ProtocolKind::hrv_swap, spec, cfg, trials);

    // Per repetition the acceptance probability averages 1/2 + 1/(2D), and
    // repetitions are independent, so the bound is also the exact rate.
    const double p = std::pow(0.5 + 1.0 / 8.0, 4.0);
    CHECK(rec.analytic_bound == doctest::Approx(p));
    CHECK(std::abs(rec.empirical_rate - p) < 5.0 * std::sqrt(p * (1 - p) / trials));
}

TEST_CASE("subspace forger against hrv reports its fidelity instrumentation") {
    ProtocolConfig cfg;
    cfg.dim = Dimension::from_qubits(6);
    cfg.database_size = 6;
    cfg.rounds = 4;
    cfg.copies = 2;
    cfg.seed = 107;

    AttackerSpec spec;
    spec.kind = AttackerKind::quantum_collective;
    spec.learn_queries = 8;
    const AttackGameRecord rec = run_attack_game(ProtocolKind::hrv_swap, spec, cfg, 200);
    CHECK(rec.learned_dimension == 8);
    CHECK(rec.mean_forgery_fidelity_sq > 0.0);
    CHECK(rec.mean_forgery_fidelity_sq < 1.0);
    CHECK(rec.stddev_forgery_fidelity_sq >= 0.0);
    CHECK(rec.empirical_rate <= 0.2);
}

TEST_CASE("fully informed subspace prover wins the lrv game outright") {
    // At n = 2 a computational-style learner with 4 queries knows the whole
    // unitary; every trap guess and the submitted string are then exact.
    ProtocolConfig cfg = lrv_cfg(2, 4, 0.0, 108);
    cfg.database_size = 8;

    AttackerSpec spec;
    spec.kind = AttackerKind::quantum_collective;
    spec.learn_queries = 4;
    spec.style = ChallengeStyle::computational;

    const AttackGameRecord rec = run_attack_game(ProtocolKind::lrv, spec, cfg, 50);
    CHECK(rec.learned_dimension == 4);
    CHECK(rec.empirical_rate == 1.0);
    CHECK(rec.per_round_guess_accuracy == 1.0);
    CHECK(rec.joint_all_correct_rate == 1.0);
    CHECK(rec.joint_product_prediction == doctest::Approx(1.0));
    CHECK(rec.guess_rounds == 200);
}

TEST_CASE("partially informed subspace prover stays under the accuracy bound") {
    ProtocolConfig cfg = lrv_cfg(6, 4, 1.0, 109);
    cfg.database_size = 8;

    AttackerSpec spec;
    spec.kind = AttackerKind::quantum_collective;
    spec.learn_queries = 8;

    const AttackGameRecord rec = run_attack_game(ProtocolKind::lrv, spec, cfg, 300);
    CHECK(rec.guess_rounds == 1200);
    CHECK(rec.per_round_accuracy_bound == doctest::Approx(0.5 + 9.0 / 128.0));
    // Accuracy concentrates near 1/2 + (d-1)/(2D); allow generous slack.
    CHECK(rec.per_round_guess_accuracy > 0.40);
    CHECK(rec.per_round_guess_accuracy <
          rec.per_round_accuracy_bound + 4.0 * std::sqrt(0.25 / 1200.0));
    CHECK(std::isfinite(rec.joint_all_correct_rate));
    CHECK(std::isfinite(rec.joint_product_prediction));
    // The projection test is asymmetric between the mark classes: near-blind
    // on valid rounds, near-perfect on traps. The joint prediction is the
    // product of the conditional accuracies over the 2 + 2 per-run split.
    CHECK(rec.per_round_accuracy_valid < 0.5);
    CHECK(rec.per_round_accuracy_trap > 0.9);
    CHECK(rec.joint_product_prediction ==
          doctest::Approx(rec.per_round_accuracy_valid * rec.per_round_accuracy_valid *
                          rec.per_round_accuracy_trap * rec.per_round_accuracy_trap));
}
