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
 * @file equality_tests.hpp
 * Quantum equality testing: SWAP, generalized SWAP over M copies, and the
 * ideal asymptotic test.
 *
 * Acceptance probabilities are computed analytically from fidelity; sampling
 * draws the one-bit classical outcome from that exact distribution. The
 * classical outcome bit is 0 on accept, 1 on reject.
 */
#pragma once

#include "qpufid/qstate.hpp"
#include "qpufid/rng.hpp"

namespace qpufid {

struct TestKind {
    enum class Family { swap_test, gswap_test, ideal_test };

    Family family = Family::swap_test;
    /// Reference copies M for the generalized test; 1 otherwise.
    int copies = 1;

    static TestKind swap_test() { return {Family::swap_test, 1}; }
    static TestKind gswap_test(int copies);
    static TestKind ideal_test() { return {Family::ideal_test, 1}; }

    [[nodiscard]] const char *name() const;
};

struct TestOutcome {
    bool accept;
    /// Classical measurement bit: 0 <=> accept.
    int outcome_bit;
};

/**
 * @brief Acceptance probability as a function of fidelity F in [0, 1].
 *
 * swap:  1/2 + F^2/2
 * gswap: 1/(M+1) + M F^2/(M+1)   (equals swap at M = 1, tends to F^2)
 * ideal: F^2
 */
double accept_probability_from_fidelity(TestKind kind, double f);

double accept_probability(TestKind kind, const PureState &a, const PureState &b);
double accept_probability(TestKind kind, const DensityMatrix &a, const PureState &b);

TestOutcome sample_outcome(TestKind kind, const PureState &a, const PureState &b, RngStream &rng);
TestOutcome sample_outcome(TestKind kind, const DensityMatrix &a, const PureState &b, RngStream &rng);

/// Draws the outcome directly from a precomputed acceptance probability.
TestOutcome sample_outcome_from_probability(double accept_probability, RngStream &rng);

/**
 * @brief Smallest repetition/copy count with one-sided error <= epsilon when
 * distinguishing states of fidelity F < 1.
 *
 * swap:  repetitions M with (1/2 + F^2/2)^M <= epsilon
 * gswap: copies M with 1/(M+1) + M F^2/(M+1) <= epsilon; throws
 *        std::domain_error when epsilon <= F^2 (unreachable for finite M)
 * ideal: repetitions M with (F^2)^M <= epsilon
 */
int repetitions_for_error(TestKind kind, double fidelity_value, double epsilon);

} // namespace qpufid
