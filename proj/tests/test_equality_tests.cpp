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

#include "qpufid/equality_tests.hpp"

using namespace qpufid;

TEST_CASE("acceptance probabilities follow the closed forms") {
    CHECK(accept_probability_from_fidelity(TestKind::swap_test(), 0.0) == doctest::Approx(0.5));
    CHECK(accept_probability_from_fidelity(TestKind::swap_test(), 1.0) == doctest::Approx(1.0));
    CHECK(accept_probability_from_fidelity(TestKind::swap_test(), 0.6) ==
          doctest::Approx(0.5 + 0.18));

    CHECK(accept_probability_from_fidelity(TestKind::gswap_test(3), 0.0) == doctest::Approx(0.25));
    CHECK(accept_probability_from_fidelity(TestKind::gswap_test(3), 1.0) == doctest::Approx(1.0));
    CHECK(accept_probability_from_fidelity(TestKind::gswap_test(9), 0.5) ==
          doctest::Approx(0.1 + 0.9 * 0.25));

    CHECK(accept_probability_from_fidelity(TestKind::ideal_test(), 0.7) == doctest::Approx(0.49));

    CHECK_THROWS_AS(accept_probability_from_fidelity(TestKind::swap_test(), -0.1),
                    std::invalid_argument);
    CHECK_THROWS_AS(accept_probability_from_fidelity(TestKind::swap_test(), 1.1),
                    std::invalid_argument);
}

TEST_CASE("generalized test at one copy reduces to the swap test") {
    for (double f = 0.0; f <= 1.0; f += 0.05) {
        CHECK(accept_probability_from_fidelity(TestKind::gswap_test(1), f) ==
              doctest::Approx(accept_probability_from_fidelity(TestKind::swap_test(), f)));
    }
}

TEST_CASE("generalized test tends to the ideal test as copies grow") {
    const double f = 0.4;
    const double ideal = accept_probability_from_fidelity(TestKind::ideal_test(), f);
    double prev = accept_probability_from_fidelity(TestKind::gswap_test(1), f);
    for (int m : {2, 8, 64, 4096}) {
        const double cur = accept_probability_from_fidelity(TestKind::gswap_test(m), f);
        CHECK(cur < prev);
        prev = cur;
    }
    CHECK(std::abs(prev - ideal) < 1e-3);
}

TEST_CASE("state overloads agree with the fidelity form") {
    RngStream rng(17);
    const Dimension dim = Dimension::from_qubits(3);
    const PureState a = haar_random_state(dim, rng);
    const PureState b = haar_random_state(dim, rng);
    const double f = fidelity(a, b);
    for (const TestKind kind : {TestKind::swap_test(), TestKind::gswap_test(4),
                                TestKind::ideal_test()}) {
        CHECK(accept_probability(kind, a, b) ==
              doctest::Approx(accept_probability_from_fidelity(kind, f)));
    }

    DensityMatrix rho{a.amplitudes * a.amplitudes.adjoint()};
    CHECK(accept_probability(TestKind::swap_test(), rho, b) ==
          doctest::Approx(0.5 + 0.5 * f * f));
}

TEST_CASE("sampled outcomes match the analytic acceptance rate") {
    RngStream rng(29);
    const Dimension dim = Dimension::from_qubits(2);
    const PureState a = haar_random_state(dim, rng);
    const PureState b = haar_random_state(dim, rng);
    const double p = accept_probability(TestKind::swap_test(), a, b);

    const int trials = 20000;
    int accepts = 0;
    for (int t = 0; t < trials; ++t) {
        const TestOutcome o = sample_outcome(TestKind::swap_test(), a, b, rng);
        CHECK(o.outcome_bit == (o.accept ? 0 : 1));
        accepts += o.accept ? 1 : 0;
    }
    const double rate = static_cast<double>(accepts) / trials;
    const double sigma = std::sqrt(p * (1.0 - p) / trials);
    CHECK(std::abs(rate - p) < 4.0 * sigma);
}

TEST_CASE("degenerate acceptance probabilities are deterministic") {
    RngStream rng(5);
    for (int t = 0; t < 50; ++t) {
        CHECK(sample_outcome_from_probability(1.0, rng).accept);
        CHECK_FALSE(sample_outcome_from_probability(0.0, rng).accept);
    }
    CHECK_THROWS_AS(sample_outcome_from_probability(1.5, rng), std::invalid_argument);
    CHECK_THROWS_AS(sample_outcome_from_probability(-0.5, rng), std::invalid_argument);
}

TEST_CASE("swap repetition count hits the target error exactly at F = 0") {
    const int reps = repetitions_for_error(TestKind::swap_test(), 0.0, std::pow(2.0, -20));
    CHECK(reps == 20);
    // One fewer repetition misses the target.
    CHECK(std::pow(0.5, reps - 1) > std::pow(2.0, -20));
}

TEST_CASE("swap repetition count respects nonzero fidelity") {
    const double f = 0.5;
    const double eps = 1e-6;
    const int reps = repetitions_for_error(TestKind::swap_test(), f, eps);
    const double per_round = 0.5 + 0.5 * f * f;
    CHECK(std::pow(per_round, reps) <= eps);
    CHECK(std::pow(per_round, reps - 1) > eps);
}

TEST_CASE("gswap copy count solves the error inequality") {
    CHECK(repetitions_for_error(TestKind::gswap_test(1), 0.0, 0.25) == 3);
    const double eps = std::pow(2.0, -10);
    const int m = repetitions_for_error(TestKind::gswap_test(1), 0.0, eps);
    CHECK(1.0 / (m + 1.0) <= eps);
    CHECK(1.0 / (static_cast<double>(m)) > eps);
    // The error floor F^2 is unreachable for any finite copy count.
    CHECK_THROWS_AS(repetitions_for_error(TestKind::gswap_test(1), 0.5, 0.2), std::domain_error);
}

TEST_CASE("ideal repetition count") {
    CHECK(repetitions_for_error(TestKind::ideal_test(), 0.0, 1e-9) == 1);
    const int reps = repetitions_for_error(TestKind::ideal_test(), 0.5, 1e-6);
    CHECK(std::pow(0.25, reps) <= 1e-6);
    CHECK(std::pow(0.25, reps - 1) > 1e-6);
}

TEST_CASE("test kinds validate and name themselves") {
    CHECK_THROWS_AS(TestKind::gswap_test(0), std::invalid_argument);
    CHECK(std::string(TestKind::swap_test().name()) == "swap");
    CHECK(std::string(TestKind::gswap_test(3).name()) == "gswap");
    CHECK(std::string(TestKind::ideal_test().name()) == "ideal");
    CHECK_THROWS_AS(repetitions_for_error(TestKind::swap_test(), 1.0, 0.5),
                    std::invalid_argument);
    CHECK_THROWS_AS(repetitions_for_error(TestKind::swap_test(), 0.5, 0.0),
                    std::invalid_argument);
}
