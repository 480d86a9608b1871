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

#include "qpufid/analysis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qpufid/protocol.hpp"

namespace qpufid {
namespace {

constexpr double kLn2 = 0.6931471805599453;
constexpr double kCountTol = 1e-12;

double logsumexp(const std::vector<double> &logs) {
    double m = -std::numeric_limits<double>::infinity();
    for (const double v : logs) m = std::max(m, v);
    if (!std::isfinite(m)) return m;
    double acc = 0.0;
    for (const double v : logs) acc += std::exp(v - m);
    return m + std::log(acc);
}

BoundValue make_bound(double raw, std::string formula_id, bool degenerate = false) {
    BoundValue b;
    b.raw_value = raw;
    b.log2_value = raw > 0.0 ? std::log2(raw) : -std::numeric_limits<double>::infinity();
    b.value = std::clamp(raw, 0.0, 1.0);
    b.flagged = degenerate || raw < 0.0 || raw > 1.0;
    b.formula_id = std::move(formula_id);
    return b;
}

/// Bound expressed through its base-2 log to survive N*M in the thousands.
BoundValue make_bound_log2(double log2_raw, std::string formula_id, bool degenerate = false) {
    BoundValue b;
    b.log2_value = log2_raw;
    b.raw_value = std::exp2(log2_raw);
    b.value = std::clamp(b.raw_value, 0.0, 1.0);
    b.flagged = degenerate || log2_raw > 0.0;
    b.formula_id = std::move(formula_id);
    return b;
}

void require_rounds(int rounds, const char *who) {
    if (rounds < 1) throw std::invalid_argument(std::string(who) + ": rounds must be positive");
}

void require_probability(double x, const char *who, const char *name) {
    if (!(x >= 0.0 && x <= 1.0))
        throw std::invalid_argument(std::string(who) + ": " + name + " must lie in [0, 1]");
}

/// Integer ones-count window |c - center| <= tau intersected with [0, limit].
std::pair<int, int> count_window(int center, double tau, int limit) {
    const int lo = std::max(0, static_cast<int>(std::ceil(center - tau - kCountTol)));
    const int hi = std::min(limit, static_cast<int>(std::floor(center + tau + kCountTol)));
    return {lo, hi};
}

int ceil_guarded(double x) { return static_cast<int>(std::ceil(x - 1e-9)); }

} // namespace

double log_binomial(double n, double k) {
    if (k < 0.0 || n < k) throw std::invalid_argument("log_binomial: need n >= k >= 0");
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

std::uint64_t exact_binomial(int n, int k) {
    if (k < 0 || n < k) throw std::invalid_argument("exact_binomial: need n >= k >= 0");
    if (n > 62) throw std::invalid_argument("exact_binomial: n must be at most 62");
    k = std::min(k, n - k);
    std::uint64_t result = 1;
    for (int i = 1; i <= k; ++i) {
        result = result * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    }
    return result;
}

BoundValue swap_soundness_bound(int rounds, int copies, double delta) {
    require_rounds(rounds, "swap_soundness_bound");
    if (copies < 1) throw std::invalid_argument("swap_soundness_bound: copies must be positive");
    require_probability(delta, "swap_soundness_bound", "delta");
    const double per_round = 0.5 + 0.5 * delta;
    const double log2_raw = static_cast<double>(rounds) * copies * std::log2(per_round);
    return make_bound_log2(log2_raw, "swap_soundness", delta == 1.0);
}

BoundValue gswap_soundness_bound(int rounds, int copies, double delta) {
    require_rounds(rounds, "gswap_soundness_bound");
    if (copies < 1) throw std::invalid_argument("gswap_soundness_bound: copies must be positive");
    require_probability(delta, "gswap_soundness_bound", "delta");
    const double m = static_cast<double>(copies);
    const double per_round = (1.0 + m * delta) / (m + 1.0);
    const double log2_raw = static_cast<double>(rounds) * std::log2(per_round);
    return make_bound_log2(log2_raw, "gswap_soundness", delta == 1.0);
}

BoundValue cver_completeness_bound(int rounds, double tau) {
    require_rounds(rounds, "cver_completeness_bound");
    if (tau < 0.0) throw std::invalid_argument("cver_completeness_bound: tau must be nonnegative");
    const double raw = 1.0 - 2.0 * std::exp(-4.0 * tau * tau / static_cast<double>(rounds));
    return make_bound(raw, "cver_completeness");
}

namespace {

void require_quarterable(int rounds, const char *who) {
    require_rounds(rounds, who);
    if (rounds % 4 != 0)
        throw std::invalid_argument(std::string(who) + ": rounds must be divisible by 4");
}

} // namespace

BoundValue independent_success(int rounds, double tau, double alpha) {
    require_quarterable(rounds, "independent_success");
    if (tau < 0.0) throw std::invalid_argument("independent_success: tau must be nonnegative");
    require_probability(alpha, "independent_success", "alpha");
    const int half = rounds / 2;
    const int quarter = rounds / 4;
    const auto [lo, hi] = count_window(quarter, tau, half);
    if (alpha == 0.0) return make_bound(0.0, "independent_success_exact");
    if (alpha == 1.0) {
        const double raw = lo == 0 ? 1.0 : 0.0;
        return make_bound(raw, "independent_success_exact");
    }
    std::vector<double> logs;
    logs.reserve(static_cast<std::size_t>(hi - lo + 1));
    for (int x = lo; x <= hi; ++x) {
        logs.push_back(log_binomial(half, x) + x * std::log1p(-alpha) +
                       (half - x) * std::log(alpha));
    }
    const double log_raw = half * std::log(alpha) + logsumexp(logs);
    return make_bound_log2(log_raw / kLn2, "independent_success_exact");
}

BoundValue independent_success_approx(int rounds, double tau, double alpha) {
    require_quarterable(rounds, "independent_success_approx");
    if (tau < 0.0) throw std::invalid_argument("independent_success_approx: tau must be nonnegative");
    require_probability(alpha, "independent_success_approx", "alpha");
    if (alpha == 0.0 || alpha == 1.0) return make_bound(0.0, "independent_success_approx");
    const int half = rounds / 2;
    const int quarter = rounds / 4;
    const double log_raw = std::log(2.0 * tau + 1.0) + log_binomial(half, quarter) +
                           (3.0 * rounds / 4.0) * std::log(alpha) +
                           (rounds / 4.0) * std::log1p(-alpha);
    return make_bound_log2(log_raw / kLn2, "independent_success_approx");
}

BoundValue global_success(int rounds, double tau) {
    require_quarterable(rounds, "global_success");
    if (tau < 0.0) throw std::invalid_argument("global_success: tau must be nonnegative");
    const int half = rounds / 2;
    const int quarter = rounds / 4;
    const auto [lo, hi] = count_window(quarter, tau, half);
    std::vector<double> logs;
    for (int c1 = lo; c1 <= hi; ++c1) {
        logs.push_back(log_binomial(half, c1) - log_binomial(rounds, c1));
    }
    if (logs.empty()) return make_bound(0.0, "global_success");
    const double log_raw = logsumexp(logs);
    return make_bound_log2(log_raw / kLn2, "global_success");
}

BoundValue global_strategy_expected_rate(int rounds, double tau) {
    const BoundValue sum = global_success(rounds, tau);
    const int quarter = rounds / 4;
    // The sampler draws the count from the full admissible window, including
    // counts above N/2 whose strings always fail.
    const auto [lo, hi] = count_window(quarter, tau, rounds);
    const double window = static_cast<double>(hi - lo + 1);
    BoundValue b;
    b.formula_id = "global_strategy_rate";
    b.log2_value = sum.log2_value - std::log2(window);
    b.raw_value = std::exp2(b.log2_value);
    b.value = std::clamp(b.raw_value, 0.0, 1.0);
    b.flagged = b.raw_value > 1.0;
    return b;
}

BoundValue guess_set_success(int rounds) {
    require_rounds(rounds, "guess_set_success");
    if (rounds % 2 != 0) throw std::invalid_argument("guess_set_success: rounds must be even");
    return make_bound_log2(-log_binomial(rounds, rounds / 2) / kLn2, "guess_set_success");
}

GlobalSuccessP global_success_p(int rounds, double valid_fraction) {
    require_rounds(rounds, "global_success_p");
    if (rounds % 2 != 0) throw std::invalid_argument("global_success_p: rounds must be even");
    require_probability(valid_fraction, "global_success_p", "valid_fraction");
    const double valid_exact = valid_fraction * rounds;
    const int valid = static_cast<int>(std::llround(valid_exact));
    if (std::abs(valid_exact - valid) > 1e-9)
        throw std::invalid_argument("global_success_p: valid_fraction * rounds must be integral");
    const int traps = rounds - valid;
    if (traps % 2 != 0)
        throw std::invalid_argument("global_success_p: trap count must be even");
    const int z = traps / 2;
    GlobalSuccessP out;
    const double log_cond = log_binomial(traps, z) - log_binomial(rounds, z);
    out.conditional = make_bound_log2(log_cond / kLn2, "global_success_p_conditional");
    out.guess_factor = 1.0 / (rounds / 2.0 + 1.0);
    out.hidden = make_bound_log2(out.conditional.log2_value + std::log2(out.guess_factor),
                                 "global_success_p_hidden");
    return out;
}

AvgSuccessUniformP avg_success_uniform_p(int rounds) {
    require_rounds(rounds, "avg_success_uniform_p");
    if (rounds % 2 != 0) throw std::invalid_argument("avg_success_uniform_p: rounds must be even");
    const double n = static_cast<double>(rounds);
    double inner = 0.0;
    for (int k = 0; k <= rounds; ++k) {
        const double log_term = std::lgamma(n - k + 1.0) + std::lgamma((n + k) / 2.0 + 1.0) -
                                std::lgamma(n + 1.0) - std::lgamma((n - k) / 2.0 + 1.0);
        inner += std::exp(log_term);
    }
    AvgSuccessUniformP out;
    out.rounds = rounds;
    out.inner_sum = inner;
    out.series_value = 2.0 / (n * (n + 2.0)) * inner;
    out.asymptote = 6.0 / (n * (n + 2.0));
    return out;
}

namespace {

AlphaArgmax argmax_on_grid(int rounds, double tau, int grid_points, bool approximate) {
    if (grid_points < 2) throw std::invalid_argument("alpha argmax: need at least 2 grid points");
    AlphaArgmax best{0.0, -1.0};
    for (int i = 0; i < grid_points; ++i) {
        const double alpha = static_cast<double>(i) / (grid_points - 1);
        const BoundValue v = approximate ? independent_success_approx(rounds, tau, alpha)
                                         : independent_success(rounds, tau, alpha);
        if (v.raw_value > best.value) best = {alpha, v.raw_value};
    }
    return best;
}

} // namespace

AlphaArgmax alpha_argmax_independent(int rounds, double tau, int grid_points) {
    return argmax_on_grid(rounds, tau, grid_points, false);
}

AlphaArgmax alpha_argmax_independent_approx(int rounds, double tau, int grid_points) {
    return argmax_on_grid(rounds, tau, grid_points, true);
}

double bits_per_round(const BoundValue &bound, int rounds) {
    require_rounds(rounds, "bits_per_round");
    return -bound.log2_value / static_cast<double>(rounds);
}

namespace {

struct PlacementScratch {
    TrapPlacement placement;
    OutcomeString outcome;
};

/// Production-verifier verdict for a string/placement pair given as bitmasks.
bool cver_reference(std::uint32_t string_mask, std::uint32_t valid_mask, int rounds, double tau,
                    double kappa, PlacementScratch &scratch) {
    scratch.placement.marks.assign(static_cast<std::size_t>(rounds), 0);
    scratch.placement.valid_positions.clear();
    for (int i = 0; i < rounds; ++i) {
        if ((valid_mask >> i) & 1u) {
            scratch.placement.marks[static_cast<std::size_t>(i)] = 1;
            scratch.placement.valid_positions.push_back(i);
        }
    }
    scratch.outcome.bits.assign(static_cast<std::size_t>(rounds), 0);
    for (int i = 0; i < rounds; ++i) {
        scratch.outcome.bits[static_cast<std::size_t>(i)] =
            static_cast<std::uint8_t>((string_mask >> i) & 1u);
    }
    return cver(scratch.outcome, scratch.placement, tau, kappa);
}

} // namespace

CverOracleResult brute_force_cver(int rounds, double tau, double valid_fraction,
                                  OracleStrategy strategy, double alpha, double kappa) {
    if (rounds < 2 || rounds > 16)
        throw std::invalid_argument("brute_force_cver: rounds must lie in [2, 16]");
    if (rounds % 2 != 0) throw std::invalid_argument("brute_force_cver: rounds must be even");
    if (tau < 0.0) throw std::invalid_argument("brute_force_cver: tau must be nonnegative");
    require_probability(valid_fraction, "brute_force_cver", "valid_fraction");
    require_probability(alpha, "brute_force_cver", "alpha");
    require_probability(kappa, "brute_force_cver", "kappa");
    const double valid_exact = valid_fraction * rounds;
    const int valid = static_cast<int>(std::llround(valid_exact));
    if (std::abs(valid_exact - valid) > 1e-9)
        throw std::invalid_argument("brute_force_cver: valid_fraction * rounds must be integral");
    const int traps = rounds - valid;
    const int target = ones_target(traps, kappa);
    const auto [win_lo, win_hi] = count_window(target, tau, rounds);

    // Enumerate every placement of the valid set as a bitmask.
    std::vector<std::uint32_t> placements;
    if (valid == 0) {
        placements.push_back(0u);
    } else {
        std::uint32_t mask = (1u << valid) - 1u;
        const std::uint32_t limit = 1u << rounds;
        while (mask < limit) {
            placements.push_back(mask);
            const std::uint32_t c = mask & (~mask + 1u);
            const std::uint32_t r = mask + c;
            mask = (((r ^ mask) >> 2) / c) | r;
            if (c == 0) break;
        }
    }

    const std::uint32_t num_strings = 1u << rounds;
    const bool cross_check = rounds <= 8;
    PlacementScratch scratch;

    // Integer acceptance window for the fast verdict.
    const int t_lo = std::max(0, static_cast<int>(std::ceil(target - tau - kCountTol)));
    const int t_hi = static_cast<int>(std::floor(target + tau + kCountTol));

    std::vector<double> pass_fraction(num_strings, 0.0);
    std::vector<double> weight_rate_sum(static_cast<std::size_t>(rounds) + 1, 0.0);
    const double placement_count = static_cast<double>(placements.size());
    for (std::uint32_t s = 0; s < num_strings; ++s) {
        std::uint64_t passes = 0;
        for (const std::uint32_t p : placements) {
            const bool test1 = (s & p) == 0u;
            const int ones_outside = std::popcount(s & ~p);
            const bool pass = test1 && ones_outside >= t_lo && ones_outside <= t_hi;
            if (pass) ++passes;
            if (cross_check) {
                const bool reference = cver_reference(s, p, rounds, tau, kappa, scratch);
                if (reference != pass)
                    throw std::logic_error("brute_force_cver: fast verdict disagrees with verifier");
            }
        }
        pass_fraction[s] = static_cast<double>(passes) / placement_count;
        weight_rate_sum[static_cast<std::size_t>(std::popcount(s))] += pass_fraction[s];
    }

    std::vector<double> mean_rate(static_cast<std::size_t>(rounds) + 1, 0.0);
    for (int w = 0; w <= rounds; ++w) {
        mean_rate[static_cast<std::size_t>(w)] =
            weight_rate_sum[static_cast<std::size_t>(w)] /
            static_cast<double>(exact_binomial(rounds, w));
    }

    CverOracleResult out;
    out.placements = placements.size();
    out.window_low = win_lo;
    out.window_high = win_hi;
    for (int c1 = win_lo; c1 <= win_hi; ++c1) {
        out.event_space_sum += mean_rate[static_cast<std::size_t>(c1)];
        out.per_c1_max = std::max(out.per_c1_max, mean_rate[static_cast<std::size_t>(c1)]);
    }
    for (std::uint32_t s = 0; s < num_strings; ++s) {
        const int w = std::popcount(s);
        if (pass_fraction[s] > out.optimal_rate) {
            out.optimal_rate = pass_fraction[s];
            out.optimal_string = s;
        }
        if (w < win_lo || w > win_hi)
            out.max_rate_outside_window = std::max(out.max_rate_outside_window, pass_fraction[s]);
    }

    switch (strategy) {
    case OracleStrategy::independent: {
        double rate = 0.0;
        for (std::uint32_t s = 0; s < num_strings; ++s) {
            const int w = std::popcount(s);
            const double prob = std::pow(alpha, rounds - w) * std::pow(1.0 - alpha, w);
            rate += prob * pass_fraction[s];
        }
        out.strategy_rate = rate;
        break;
    }
    case OracleStrategy::global:
        out.strategy_rate = out.event_space_sum / static_cast<double>(win_hi - win_lo + 1);
        break;
    case OracleStrategy::guess_set:
        if (target < 0 || target > rounds)
            throw std::invalid_argument("brute_force_cver: target weight out of range");
        out.strategy_rate = mean_rate[static_cast<std::size_t>(target)];
        break;
    case OracleStrategy::optimal:
        out.strategy_rate = out.optimal_rate;
        break;
    }
    return out;
}

std::vector<ResourceRow> resource_table(double epsilon, int copies) {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument("resource_table: epsilon must lie in (0, 1)");
    if (copies < 1) throw std::invalid_argument("resource_table: copies must be positive");
    const double security_bits = -std::log2(epsilon);
    const int base_rounds = ceil_guarded(security_bits);
    const int gswap_rounds = ceil_guarded(security_bits / std::log2(copies + 1.0));

    std::vector<ResourceRow> rows;
    rows.push_back({"hrv-swap", epsilon, "swap_soundness", base_rounds, 0, "O(polylog(D))", "0",
                    base_rounds, 0});
    rows.push_back({"hrv-gswap", epsilon, "gswap_soundness", copies * gswap_rounds, 0,
                    "O(polylog(M*D))", "0", gswap_rounds, 0});
    rows.push_back({"lrv", epsilon, "lrv_trap_soundness", base_rounds, 1, "0", "O(polylog(D))",
                    base_rounds, 1});
    return rows;
}

} // namespace qpufid
