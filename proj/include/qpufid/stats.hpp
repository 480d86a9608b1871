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
 * @file stats.hpp
 * Small statistics helpers shared by tests and attack-game reporting.
 */
#pragma once

#include <cstdint>
#include <vector>

namespace qpufid {

struct BinomialCi {
    double low;
    double high;
};

/// Wilson score interval (two-sided, z standard deviations).
BinomialCi wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = 1.96);

/// Exact one-sided upper confidence bound for zero observed successes:
/// 1 - (1 - confidence)^(1/trials).
double zero_success_upper(std::uint64_t trials, double confidence = 0.95);

/// Asymptotic Kolmogorov-Smirnov p-value for samples against Uniform[0, 1].
/// Samples need not be sorted.
double ks_uniform_pvalue(std::vector<double> samples);

/// Chi-square statistic of observed counts against a uniform expectation.
double chi_square_uniform(const std::vector<std::uint64_t> &counts);

} // namespace qpufid
