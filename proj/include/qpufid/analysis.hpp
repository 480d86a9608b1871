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
 * @file analysis.hpp
 * Closed-form soundness/completeness bounds, classical cheating rates, and
 * the brute-force verifier oracle used to cross-check them.
 *
 * Every probability-valued formula is evaluated in log space so that extreme
 * parameter ranges (N up to 10^4) neither underflow nor overflow. Results
 * carry both the linear value (clamped into [0, 1] when the raw formula
 * leaves the unit interval) and the log2 of the raw, unclamped value.
 */
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qpufid {

/// A bound or rate together with bookkeeping about how it was evaluated.
struct BoundValue {
    double value = 0.0;      ///< Final value, clamped into [0, 1] when flagged.
    double raw_value = 0.0;  ///< Unclamped formula output.
    double log2_value = 0.0; ///< log2 of the raw value (-inf when raw <= 0).
    bool flagged = false;    ///< True when the raw value left [0, 1] or the
                             ///< parameters hit a degenerate regime.
    std::string formula_id;  ///< Stable identifier for serialization.
};

/// log(n choose k) via lgamma; accepts real n, k with n >= k >= 0.
double log_binomial(double n, double k);

/// Exact binomial coefficient for n <= 62 (fits in unsigned 64-bit).
std::uint64_t exact_binomial(int n, int k);

/// (1/2 + delta/2)^(N*M): cheating bound for the swap-test identification
/// variant with N rounds of M repetitions against responses of squared
/// fidelity at most delta.
BoundValue swap_soundness_bound(int rounds, int copies, double delta);

/// (1/(M+1) + M*delta/(M+1))^N for the generalized test with M copies.
BoundValue gswap_soundness_bound(int rounds, int copies, double delta);

/// Honest-pass lower bound 1 - 2*exp(-4*tau^2 / N) for the trap-based
/// verifier. Negative raw values clamp to 0 and set the flag.
BoundValue cver_completeness_bound(int rounds, double tau);

/// Exact success probability of the per-position independent classical
/// strategy (guess 0 with probability alpha):
///   alpha^(N/2) * sum_{|x - N/4| <= tau} C(N/2, x) (1-alpha)^x alpha^(N/2-x).
/// Requires N divisible by 4.
BoundValue independent_success(int rounds, double tau, double alpha);

/// Loose closed-form approximation of the same quantity:
///   (2*tau + 1) * C(N/2, N/4) * alpha^(3N/4) * (1-alpha)^(N/4).
BoundValue independent_success_approx(int rounds, double tau, double alpha);

/// Event-space bound for the global (set-guessing) classical strategy:
///   sum_{|c1 - N/4| <= tau} C(N/2, c1) / C(N, c1).
/// The sum can exceed 1 for tau > 0; the value clamps and flags.
BoundValue global_success(int rounds, double tau);

/// Realized pass probability of the sampler that picks c1 uniformly from the
/// admissible window and then a uniform weight-c1 string: the event-space sum
/// divided by the window size.
BoundValue global_strategy_expected_rate(int rounds, double tau);

/// 1 / C(N, N/2): probability of guessing the trap set outright.
BoundValue guess_set_success(int rounds);

/// Global strategy generalized to a known valid fraction p, with tau = 0.
struct GlobalSuccessP {
    BoundValue conditional;  ///< C(N-Np, (N-Np)/2) / C(N, (N-Np)/2).
    double guess_factor;     ///< 1 / (N/2 + 1) for the unknown-count guess.
    BoundValue hidden;       ///< conditional * guess_factor.
};
GlobalSuccessP global_success_p(int rounds, double valid_fraction);

/// Average of the p-generalized success over the uniform prior on the trap
/// count, evaluated by the exact factorial series, plus its large-N
/// asymptote 6 / (N (N + 2)).
struct AvgSuccessUniformP {
    double series_value;
    double asymptote;
    double inner_sum;       ///< The series' inner sum, which tends to 3.
    int rounds;
};
AvgSuccessUniformP avg_success_uniform_p(int rounds);

/// Grid maximizer for independent_success over alpha in [0, 1].
struct AlphaArgmax {
    double alpha;
    double value;
};
AlphaArgmax alpha_argmax_independent(int rounds, double tau, int grid_points = 2001);
AlphaArgmax alpha_argmax_independent_approx(int rounds, double tau, int grid_points = 2001);

/// Security bits per protocol round: -log2(P) / N.
double bits_per_round(const BoundValue &bound, int rounds);

/// Strategy selector for the brute-force oracle.
enum class OracleStrategy {
    independent, ///< Per-position independent guessing at a given alpha.
    global,      ///< Uniform window count, then uniform weight-c1 string.
    guess_set,   ///< Uniform string at exactly the target weight.
    optimal,     ///< Best single string over all 2^N candidates.
};

/// Exhaustive verification-rate oracle. Enumerates every trap placement
/// (all C(N, pN) subsets) and scores strings with the production verifier
/// decision, so any change to the verifier is caught by equivalence tests.
struct CverOracleResult {
    double strategy_rate = 0.0;          ///< Realized pass rate of the strategy.
    double event_space_sum = 0.0;        ///< Sum of per-count rates over the window.
    double per_c1_max = 0.0;             ///< Best per-count rate inside the window.
    double optimal_rate = 0.0;           ///< Best single-string rate overall.
    std::uint32_t optimal_string = 0;    ///< Argmax string (bit i = position i).
    double max_rate_outside_window = 0.0;///< Best rate among strings whose weight
                                         ///< falls outside the admissible window.
    std::uint64_t placements = 0;        ///< Number of trap placements enumerated.
    int window_low = 0;                  ///< Admissible ones-count window.
    int window_high = 0;
};
CverOracleResult brute_force_cver(int rounds, double tau, double valid_fraction,
                                  OracleStrategy strategy, double alpha = 0.75,
                                  double kappa = 0.5);

/// One row of the resource comparison across protocol variants at a target
/// soundness error epsilon.
struct ResourceRow {
    std::string protocol;
    double epsilon;
    std::string security_formula;
    int verifier_memory;   ///< Challenge copies the verifier stores.
    int prover_memory;     ///< Quantum memory the prover needs beyond the device.
    std::string verifier_compute;
    std::string prover_compute;
    int quantum_rounds;
    int classical_rounds;
};
std::vector<ResourceRow> resource_table(double epsilon, int copies);

} // namespace qpufid
