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

#include "qpufid/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qpufid {

BinomialCi wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
    if (trials == 0) throw std::invalid_argument("wilson_interval: trials must be positive");
    if (successes > trials) throw std::invalid_argument("wilson_interval: successes exceed trials");
    const double n = static_cast<double>(trials);
    const double phat = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = phat + z2 / (2.0 * n);
    const double spread = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n));
    return {std::max(0.0, (center - spread) / denom), std::min(1.0, (center + spread) / denom)};
}

double zero_success_upper(std::uint64_t trials, double confidence) {
    if (trials == 0) throw std::invalid_argument("zero_success_upper: trials must be positive");
    if (confidence <= 0.0 || confidence >= 1.0)
        throw std::invalid_argument("zero_success_upper: confidence must lie in (0, 1)");
    return 1.0 - std::pow(1.0 - confidence, 1.0 / static_cast<double>(trials));
}

double ks_uniform_pvalue(std::vector<double> samples) {
    if (samples.empty()) throw std::invalid_argument("ks_uniform_pvalue: no samples");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double cdf = samples[i];
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        d = std::max({d, cdf - lo, hi - cdf});
    }
    // Kolmogorov asymptotic tail with the standard finite-n correction.
    const double lambda = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
    double p = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = 2.0 * std::pow(-1.0, k - 1) * std::exp(-2.0 * k * k * lambda * lambda);
        p += term;
        if (std::abs(term) < 1e-12) break;
    }
    return std::clamp(p, 0.0, 1.0);
}

double chi_square_uniform(const std::vector<std::uint64_t> &counts) {
    if (counts.empty()) throw std::invalid_argument("chi_square_uniform: no bins");
    std::uint64_t total = 0;
    for (const auto c : counts) total += c;
    if (total == 0) throw std::invalid_argument("chi_square_uniform: empty sample");
    const double expected = static_cast<double>(total) / static_cast<double>(counts.size());
    double stat = 0.0;
    for (const auto c : counts) {
        const double diff = static_cast<double>(c) - expected;
        stat += diff * diff / expected;
    }
    return stat;
}

} // namespace qpufid
