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

#include "qpufid/adversaries.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <stdexcept>
#include <thread>

#include "qpufid/analysis.hpp"
#include "qpufid/equality_tests.hpp"

namespace qpufid {
namespace {

constexpr double kProjectionFloor = 1e-12;
constexpr double kCountTol = 1e-12;

int rounded_valid_count(int rounds, double valid_fraction) {
    const double exact = valid_fraction * rounds;
    const int valid = static_cast<int>(std::llround(exact));
    if (std::abs(exact - valid) > 1e-9)
        throw std::invalid_argument("valid_fraction * rounds must be integral");
    return valid;
}

/// Admissible 1-count window around the expected trap-position count.
std::pair<int, int> ones_window(int rounds, int traps, double tau, double kappa) {
    const int center = ones_target(traps, kappa);
    const int lo = std::max(0, static_cast<int>(std::ceil(center - tau - kCountTol)));
    const int hi = std::min(rounds, static_cast<int>(std::floor(center + tau + kCountTol)));
    return {lo, hi};
}

/// Pass probability of a fixed string with `ones` 1-bits over the uniform
/// placement of `valid` marks: C(rounds-ones, valid) / C(rounds, valid),
/// conditioned on the count lying in the admissible window.
double fixed_weight_pass_rate(int rounds, int valid, int ones) {
    if (ones < 0 || ones > rounds - valid) return 0.0;
    return std::exp(log_binomial(rounds - ones, valid) - log_binomial(rounds, valid));
}

double global_event_sum(int rounds, int valid, double tau, double kappa) {
    const auto [lo, hi] = ones_window(rounds, rounds - valid, tau, kappa);
    double sum = 0.0;
    for (int c1 = lo; c1 <= hi; ++c1) sum += fixed_weight_pass_rate(rounds, valid, c1);
    return sum;
}

double independent_rate_generic(int rounds, int valid, double tau, double kappa, double alpha) {
    const auto [lo, hi] = ones_window(rounds, rounds - valid, tau, kappa);
    double rate = 0.0;
    for (int w = lo; w <= hi; ++w) {
        const double pass = fixed_weight_pass_rate(rounds, valid, w);
        if (pass == 0.0) continue;
        const double log_weight_prob = log_binomial(rounds, w) +
                                       (rounds - w) * std::log(alpha) +
                                       w * std::log1p(-alpha);
        rate += std::exp(log_weight_prob) * pass;
    }
    if (alpha == 0.0) rate = rounds == 0 ? 1.0 : 0.0;
    if (alpha == 1.0) rate = lo == 0 ? fixed_weight_pass_rate(rounds, valid, 0) : 0.0;
    return rate;
}

void run_trials(int trials, unsigned threads, std::vector<std::uint8_t> &out,
                const std::function<bool(int)> &trial) {
    out.assign(static_cast<std::size_t>(trials), 0);
    if (threads <= 1) {
        for (int t = 0; t < trials; ++t) out[static_cast<std::size_t>(t)] = trial(t) ? 1 : 0;
        return;
    }
    std::atomic<int> next{0};
    auto worker = [&] {
        for (;;) {
            const int t = next.fetch_add(1);
            if (t >= trials) return;
            out[static_cast<std::size_t>(t)] = trial(t) ? 1 : 0;
        }
    };
    std::vector<std::thread> pool;
    const unsigned count = std::min<unsigned>(threads, std::thread::hardware_concurrency());
    for (unsigned i = 0; i + 1 < std::max(1u, count); ++i) pool.emplace_back(worker);
    worker();
    for (auto &th : pool) th.join();
}

} // namespace

OutcomeString independent_guess_string(int rounds, double alpha, RngStream &rng) {
    if (rounds < 1) throw std::invalid_argument("independent_guess_string: rounds must be positive");
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw std::invalid_argument("independent_guess_string: alpha must lie in [0, 1]");
    OutcomeString s;
    s.bits.resize(static_cast<std::size_t>(rounds));
    for (auto &bit : s.bits) bit = rng.bernoulli(alpha) ? 0 : 1;
    return s;
}

OutcomeString fixed_weight_string(int rounds, int ones, RngStream &rng) {
    if (rounds < 1) throw std::invalid_argument("fixed_weight_string: rounds must be positive");
    if (ones < 0 || ones > rounds)
        throw std::invalid_argument("fixed_weight_string: ones out of range");
    OutcomeString s;
    s.bits.assign(static_cast<std::size_t>(rounds), 0);
    for (const int i : sample_distinct_indices(ones, rounds, rng))
        s.bits[static_cast<std::size_t>(i)] = 1;
    return s;
}

OutcomeString global_strategy_string(int rounds, double valid_fraction, double tau, double kappa,
                                     RngStream &rng) {
    const int valid = rounded_valid_count(rounds, valid_fraction);
    const auto [lo, hi] = ones_window(rounds, rounds - valid, tau, kappa);
    const int count = lo + static_cast<int>(rng.integer(static_cast<std::uint64_t>(hi - lo + 1)));
    return fixed_weight_string(rounds, count, rng);
}

SubspaceAdversary SubspaceAdversary::learn(TransitWindow &window, int queries, RngStream &rng,
                                           ChallengeStyle style) {
    const Dimension dim = window.device().dim();
    if (queries < 0) throw std::invalid_argument("SubspaceAdversary: queries must be nonnegative");
    if (queries > dim.size)
        throw std::invalid_argument("SubspaceAdversary: queries exceed the space dimension");

    std::vector<Vector> inputs;
    std::vector<Vector> outputs;
    inputs.reserve(static_cast<std::size_t>(queries));
    outputs.reserve(static_cast<std::size_t>(queries));
    for (int i = 0; i < queries; ++i) {
        const PureState challenge = style == ChallengeStyle::haar
                                        ? haar_random_state(dim, rng)
                                        : basis_state(dim, i);
        const PureState response = window.query(challenge);
        inputs.push_back(challenge.amplitudes);
        outputs.push_back(response.amplitudes);
    }

    // Gram-Schmidt on the inputs with the same eliminations applied to the
    // outputs, so basis pairs stay matched under the hidden unitary.
    SubspaceBasis in_basis;
    SubspaceBasis out_basis;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        Vector u = inputs[i];
        Vector v = outputs[i];
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t j = 0; j < in_basis.vectors.size(); ++j) {
                const Complex c = in_basis.vectors[j].amplitudes.dot(u);
                u -= c * in_basis.vectors[j].amplitudes;
                v -= c * out_basis.vectors[j].amplitudes;
            }
        }
        const double norm = u.norm();
        if (norm < kRankTol) continue;
        in_basis.vectors.push_back(PureState{u / norm});
        out_basis.vectors.push_back(PureState{v / norm});
    }
    return SubspaceAdversary(std::move(in_basis), std::move(out_basis), dim.size);
}

double SubspaceAdversary::projection_weight(const PureState &challenge) const {
    double weight = 0.0;
    for (const auto &e : input_basis_.vectors)
        weight += std::norm(e.amplitudes.dot(challenge.amplitudes));
    return weight;
}

PureState SubspaceAdversary::forge(const PureState &challenge, RngStream &rng) {
    if (challenge.dim() != space_dim_)
        throw std::invalid_argument("SubspaceAdversary: challenge dimension mismatch");
    if (!input_basis_.empty()) {
        Vector image = Vector::Zero(space_dim_);
        double weight = 0.0;
        for (std::size_t j = 0; j < input_basis_.vectors.size(); ++j) {
            const Complex c = input_basis_.vectors[j].amplitudes.dot(challenge.amplitudes);
            weight += std::norm(c);
            image += c * output_basis_.vectors[j].amplitudes;
        }
        if (weight > kProjectionFloor) return PureState{image / image.norm()};
    }
    // Nothing learned applies; guess Haar-uniformly outside the known image.
    return complement_haar_state(output_basis_, space_dim_, rng);
}

PureState ForgingHrvProver::respond(const PureState &challenge, RngStream &rng) {
    PureState answer = forger_->forge(challenge, rng);
    const PureState truth = DeviceInspector::apply(*device_, challenge);
    const double f = fidelity(answer, truth);
    const double f2 = f * f;
    ++responses_;
    sum_f2_ += f2;
    sum_f2_sq_ += f2 * f2;
    return answer;
}

double ForgingHrvProver::mean_fidelity_sq() const {
    return responses_ == 0 ? std::numeric_limits<double>::quiet_NaN()
                           : sum_f2_ / static_cast<double>(responses_);
}

double ForgingHrvProver::stddev_fidelity_sq() const {
    if (responses_ == 0) return std::numeric_limits<double>::quiet_NaN();
    const double mean = mean_fidelity_sq();
    return std::sqrt(std::max(0.0, sum_f2_sq_ / static_cast<double>(responses_) - mean * mean));
}

TrapGuess trap_distinguish(SubspaceAdversary &adversary, const PureState &challenge,
                           const PureState &unknown, AttackMode, TrapDecisionRule rule,
                           RngStream &rng) {
    PureState reference = adversary.forge(challenge, rng);
    const TestOutcome outcome = sample_outcome(TestKind::ideal_test(), reference, unknown, rng);
    int guess = 1;
    switch (rule) {
    case TrapDecisionRule::accept_means_valid:
        guess = outcome.accept ? 1 : 0;
        break;
    case TrapDecisionRule::always_valid:
        guess = 1;
        break;
    case TrapDecisionRule::coin_flip:
        guess = rng.bernoulli(0.5) ? 1 : 0;
        break;
    }
    return TrapGuess{guess, outcome, std::move(reference)};
}

ClassicalLrvProver::ClassicalLrvProver(Strategy strategy, const ProtocolConfig &cfg, double alpha)
    : strategy_(strategy), rounds_(cfg.rounds), alpha_(alpha),
      valid_fraction_(cfg.valid_fraction), tau_(cfg.tau), kappa_(cfg.kappa) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw std::invalid_argument("ClassicalLrvProver: alpha must lie in [0, 1]");
}

OutcomeString ClassicalLrvProver::respond(const std::vector<PureState> &challenges,
                                          const std::vector<PureState> &, RngStream &rng) {
    const int rounds = static_cast<int>(challenges.size());
    switch (strategy_) {
    case Strategy::independent:
        return independent_guess_string(rounds, alpha_, rng);
    case Strategy::global:
        return global_strategy_string(rounds, valid_fraction_, tau_, kappa_, rng);
    case Strategy::guess_set: {
        const int traps = rounds - rounded_valid_count(rounds, valid_fraction_);
        return fixed_weight_string(rounds, std::min(ones_target(traps, kappa_), rounds), rng);
    }
    }
    throw std::logic_error("ClassicalLrvProver: unknown strategy");
}

std::string ClassicalLrvProver::name() const {
    switch (strategy_) {
    case Strategy::independent:
        return "classical-independent";
    case Strategy::global:
        return "classical-global";
    case Strategy::guess_set:
        return "classical-guess-set";
    }
    return "classical";
}

OutcomeString SubspaceLrvProver::respond(const std::vector<PureState> &challenges,
                                         const std::vector<PureState> &b_states, RngStream &rng) {
    if (challenges.size() != b_states.size())
        throw std::invalid_argument("SubspaceLrvProver: challenge/state count mismatch");
    const int rounds = static_cast<int>(challenges.size());
    last_guesses_.assign(static_cast<std::size_t>(rounds), 1);
    std::vector<int> trap_rounds;
    for (int i = 0; i < rounds; ++i) {
        const TrapGuess g =
            trap_distinguish(*adversary_, challenges[static_cast<std::size_t>(i)],
                             b_states[static_cast<std::size_t>(i)], mode_, rule_, rng);
        last_guesses_[static_cast<std::size_t>(i)] = g.guessed_mark;
        if (g.guessed_mark == 0) trap_rounds.push_back(i);
    }
    OutcomeString s;
    s.bits.assign(static_cast<std::size_t>(rounds), 0);
    const int traps = static_cast<int>(trap_rounds.size());
    const int ones = std::min(ones_target(traps, kappa_), traps);
    for (const int idx : sample_distinct_indices(ones, traps, rng))
        s.bits[static_cast<std::size_t>(trap_rounds[static_cast<std::size_t>(idx)])] = 1;
    return s;
}

const char *attacker_name(AttackerKind kind) {
    switch (kind) {
    case AttackerKind::honest:
        return "honest";
    case AttackerKind::haar_responder:
        return "haar-responder";
    case AttackerKind::classical_independent:
        return "classical-independent";
    case AttackerKind::classical_global:
        return "classical-global";
    case AttackerKind::classical_guess_set:
        return "classical-guess-set";
    case AttackerKind::quantum_collective:
        return "quantum-collective";
    case AttackerKind::quantum_coherent:
        return "quantum-coherent";
    }
    throw std::invalid_argument("attacker_name: unknown kind");
}

AttackerKind attacker_from_name(const std::string &name) {
    if (name == "honest") return AttackerKind::honest;
    if (name == "haar-responder") return AttackerKind::haar_responder;
    if (name == "classical-independent") return AttackerKind::classical_independent;
    if (name == "classical-global") return AttackerKind::classical_global;
    if (name == "classical-guess-set") return AttackerKind::classical_guess_set;
    if (name == "quantum-collective") return AttackerKind::quantum_collective;
    if (name == "quantum-coherent") return AttackerKind::quantum_coherent;
    throw std::invalid_argument("attacker_from_name: unknown attacker '" + name + "'");
}

namespace {

bool classical_attacker(AttackerKind kind) {
    return kind == AttackerKind::classical_independent ||
           kind == AttackerKind::classical_global || kind == AttackerKind::classical_guess_set;
}

void fill_classical_predictions(AttackGameRecord &rec, const AttackerSpec &spec,
                                const ProtocolConfig &cfg) {
    const int rounds = cfg.rounds;
    const int valid = rounded_valid_count(rounds, cfg.valid_fraction);
    const auto [lo, hi] = ones_window(rounds, rounds - valid, cfg.tau, cfg.kappa);
    switch (spec.kind) {
    case AttackerKind::classical_independent:
        rec.predicted_rate =
            independent_rate_generic(rounds, valid, cfg.tau, cfg.kappa, spec.alpha);
        rec.prediction_id = "independent_success_exact";
        rec.analytic_bound = rec.predicted_rate;
        rec.bound_id = "independent_success_exact";
        break;
    case AttackerKind::classical_global: {
        const double sum = global_event_sum(rounds, valid, cfg.tau, cfg.kappa);
        rec.predicted_rate = sum / static_cast<double>(hi - lo + 1);
        rec.prediction_id = "global_strategy_rate";
        rec.analytic_bound = std::min(1.0, sum);
        rec.bound_id = "global_success";
        break;
    }
    case AttackerKind::classical_guess_set: {
        const int target = ones_target(rounds - valid, cfg.kappa);
        rec.predicted_rate = target >= lo && target <= hi
                                 ? fixed_weight_pass_rate(rounds, valid, target)
                                 : 0.0;
        rec.prediction_id = "fixed_weight_rate";
        rec.analytic_bound = std::exp(-log_binomial(rounds, valid));
        rec.bound_id = "guess_set_success";
        break;
    }
    default:
        break;
    }
}

} // namespace

AttackGameRecord run_attack_game(ProtocolKind kind, const AttackerSpec &spec,
                                 const ProtocolConfig &cfg, int trials,
                                 const AttackGameOptions &options) {
    cfg.validate(kind);
    if (trials < 1) throw std::invalid_argument("run_attack_game: trials must be positive");
    const bool lrv = kind == ProtocolKind::lrv;
    if (spec.kind == AttackerKind::haar_responder && lrv)
        throw std::invalid_argument("run_attack_game: haar-responder targets hrv variants");
    if (classical_attacker(spec.kind) && !lrv)
        throw std::invalid_argument("run_attack_game: classical string attackers target lrv");

    AttackGameRecord rec;
    rec.protocol = protocol_name(kind);
    rec.attacker = attacker_name(spec.kind);
    rec.trials = trials;
    rec.seed = cfg.seed;
    const RngStream base(cfg.seed);

    if (classical_attacker(spec.kind)) {
        // The strategy never inspects the transmitted states, so the game
        // draws only the placement and the submitted string. The verdict
        // distribution matches the full protocol exactly.
        rec.quantum_layer_elided = true;
        fill_classical_predictions(rec, spec, cfg);
        const int rounds = cfg.rounds;
        auto trial = [&](int t) -> bool {
            RngStream rng = base.substream(static_cast<std::uint64_t>(t) + 1);
            const TrapPlacement placement = place_traps(rounds, cfg.valid_fraction, rng);
            OutcomeString s;
            switch (spec.kind) {
            case AttackerKind::classical_independent:
                s = independent_guess_string(rounds, spec.alpha, rng);
                break;
            case AttackerKind::classical_global:
                s = global_strategy_string(rounds, cfg.valid_fraction, cfg.tau, cfg.kappa, rng);
                break;
            default: {
                const int valid = rounded_valid_count(rounds, cfg.valid_fraction);
                s = fixed_weight_string(
                    rounds, std::min(ones_target(rounds - valid, cfg.kappa), rounds), rng);
                break;
            }
            }
            return cver(s, placement, cfg.tau, cfg.kappa);
        };
        run_trials(trials, options.threads, rec.per_trial_success, trial);
    } else if (!lrv) {
        RngStream setup_rng = base.substream(0);
        HrvSession session = hrv_setup(kind, cfg, setup_rng);
        const double dim = static_cast<double>(cfg.dim.size);

        std::unique_ptr<SubspaceAdversary> learned;
        std::unique_ptr<HrvProver> prover;
        ForgingHrvProver *instrumented = nullptr;
        switch (spec.kind) {
        case AttackerKind::honest:
            prover = std::make_unique<HonestHrvProver>(session.device);
            rec.predicted_rate = 1.0;
            rec.prediction_id = "completeness_exact";
            rec.analytic_bound = 1.0;
            rec.bound_id = "completeness_exact";
            break;
        case AttackerKind::haar_responder: {
            prover = std::make_unique<HaarResponder>(cfg.dim);
            const BoundValue bound =
                kind == ProtocolKind::hrv_swap
                    ? swap_soundness_bound(cfg.rounds, cfg.copies, 1.0 / dim)
                    : gswap_soundness_bound(cfg.rounds, cfg.copies, 1.0 / dim);
            rec.analytic_bound = bound.value;
            rec.bound_id = bound.formula_id + "(delta=1/D)";
            rec.predicted_rate = bound.value;
            rec.prediction_id = rec.bound_id;
            break;
        }
        default: {
            TransitWindow window = session.open_transit();
            learned = std::make_unique<SubspaceAdversary>(
                SubspaceAdversary::learn(window, spec.learn_queries, setup_rng, spec.style));
            rec.learned_dimension = learned->learned_dimension();
            auto forging = std::make_unique<ForgingHrvProver>(*learned, session.device);
            instrumented = forging.get();
            prover = std::move(forging);
            break;
        }
        }

        auto trial = [&](int t) -> bool {
            reset_database(session.database, cfg, kind);
            RngStream rng = base.substream(static_cast<std::uint64_t>(t) + 1);
            return hrv_run(session, *prover, rng).accepted;
        };
        run_trials(trials, 1, rec.per_trial_success, trial);
        if (instrumented != nullptr) {
            rec.mean_forgery_fidelity_sq = instrumented->mean_fidelity_sq();
            rec.stddev_forgery_fidelity_sq = instrumented->stddev_fidelity_sq();
        }
    } else {
        RngStream setup_rng = base.substream(0);
        LrvSession session = lrv_setup(cfg, setup_rng);

        if (spec.kind == AttackerKind::honest) {
            rec.analytic_bound = cver_completeness_bound(cfg.rounds, cfg.tau).value;
            rec.bound_id = "cver_completeness_lower";
            HonestLrvProver prover(session.device, cfg.mode);
            auto trial = [&](int t) -> bool {
                reset_database(session.database, cfg, kind);
                RngStream rng = base.substream(static_cast<std::uint64_t>(t) + 1);
                return lrv_run(session, prover, rng).accepted;
            };
            run_trials(trials, 1, rec.per_trial_success, trial);
        } else {
            TransitWindow window = session.open_transit();
            SubspaceAdversary adversary =
                SubspaceAdversary::learn(window, spec.learn_queries, setup_rng, spec.style);
            rec.learned_dimension = adversary.learned_dimension();
            rec.per_round_accuracy_bound =
                0.5 + (adversary.learned_dimension() + 1) /
                          (2.0 * static_cast<double>(cfg.dim.size));
            const AttackMode mode = spec.kind == AttackerKind::quantum_coherent
                                        ? AttackMode::coherent
                                        : AttackMode::collective;
            SubspaceLrvProver prover(adversary, cfg.kappa, mode, spec.rule);

            std::uint64_t all_correct = 0;
            std::uint64_t valid_rounds = 0;
            std::uint64_t valid_correct = 0;
            std::uint64_t trap_correct = 0;
            auto trial = [&](int t) -> bool {
                reset_database(session.database, cfg, kind);
                RngStream rng = base.substream(static_cast<std::uint64_t>(t) + 1);
                const VerificationResult result = lrv_run(session, prover, rng);
                const auto &guesses = prover.last_guesses();
                bool correct_all = true;
                for (std::size_t i = 0; i < guesses.size(); ++i) {
                    ++rec.guess_rounds;
                    const int mark = result.transcript.rounds[i].trap_mark;
                    if (mark == 1) ++valid_rounds;
                    if (guesses[i] == mark) {
                        ++rec.correct_guesses;
                        (mark == 1 ? valid_correct : trap_correct) += 1;
                    } else {
                        correct_all = false;
                    }
                }
                if (correct_all) ++all_correct;
                return result.accepted;
            };
            run_trials(trials, 1, rec.per_trial_success, trial);
            rec.per_round_guess_accuracy =
                static_cast<double>(rec.correct_guesses) / static_cast<double>(rec.guess_rounds);
            rec.joint_all_correct_rate =
                static_cast<double>(all_correct) / static_cast<double>(trials);
            const std::uint64_t trap_rounds = rec.guess_rounds - valid_rounds;
            const int valid_per_run = rounded_valid_count(cfg.rounds, cfg.valid_fraction);
            if (valid_rounds > 0)
                rec.per_round_accuracy_valid =
                    static_cast<double>(valid_correct) / static_cast<double>(valid_rounds);
            if (trap_rounds > 0)
                rec.per_round_accuracy_trap =
                    static_cast<double>(trap_correct) / static_cast<double>(trap_rounds);
            // The trap placement fixes the per-run mark split, so the joint
            // guessing rate factorizes over the conditional accuracies, not
            // over the pooled one.
            rec.joint_product_prediction =
                std::pow(valid_rounds > 0 ? rec.per_round_accuracy_valid : 1.0,
                         static_cast<double>(valid_per_run)) *
                std::pow(trap_rounds > 0 ? rec.per_round_accuracy_trap : 1.0,
                         static_cast<double>(cfg.rounds - valid_per_run));
        }
    }

    rec.successes = 0;
    for (const auto s : rec.per_trial_success) rec.successes += s;
    rec.empirical_rate = static_cast<double>(rec.successes) / static_cast<double>(trials);
    rec.ci = wilson_interval(rec.successes, static_cast<std::uint64_t>(trials));
    if (rec.successes == 0) rec.ci.high = zero_success_upper(static_cast<std::uint64_t>(trials));
    if (!options.keep_per_trial) rec.per_trial_success.clear();
    return rec;
}

} // namespace qpufid
