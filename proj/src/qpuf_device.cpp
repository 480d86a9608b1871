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

#include "qpufid/qpuf_device.hpp"

#include <cmath>
#include <utility>

namespace qpufid {

namespace {

std::string hex_id(std::uint64_t word) {
    static const char *digits = "0123456789abcdef";
    std::string out = "qpuf-";
    for (int shift = 60; shift >= 0; shift -= 4) {
        out.push_back(digits[(word >> shift) & 0xf]);
    }
    return out;
}

/// Pair of states with |<a|b>| == target, target in [0, 1].
std::pair<PureState, PureState> pair_with_fidelity(Dimension dim, double target, RngStream &rng) {
    PureState a = haar_random_state(dim, rng);
    PureState b_perp = orthogonal_state(a, rng);
    const double phase_angle = 2.0 * M_PI * rng.uniform();
    const Complex phase(std::cos(phase_angle), std::sin(phase_angle));
    Vector v = target * a.amplitudes + std::sqrt(std::max(0.0, 1.0 - target * target)) * phase * b_perp.amplitudes;
    return {a, normalized_state(v)};
}

} // namespace

QPufDevice::QPufDevice(std::string id, Dimension dim, UnitaryMatrix unitary, std::uint64_t seed)
    : id_(std::move(id)), dim_(dim), unitary_(std::move(unitary)), generation_seed_(seed) {}

QPufDevice QPufDevice::generate(Dimension dim, RngStream &rng) {
    const std::uint64_t id_word = rng.engine()();
    UnitaryMatrix u = haar_random_unitary(dim, rng);
    return QPufDevice(hex_id(id_word), dim, std::move(u), rng.seed());
}

QPufDevice QPufDevice::with_unitary(std::string id, UnitaryMatrix unitary) {
    if (!is_unitary(unitary)) {
        throw std::invalid_argument("with_unitary: matrix is not unitary");
    }
    const int size = unitary.dim();
    int qubits = 0;
    while ((1 << qubits) < size) {
        ++qubits;
    }
    if ((1 << qubits) != size) {
        throw std::invalid_argument("with_unitary: dimension is not a power of two");
    }
    return QPufDevice(std::move(id), Dimension{qubits, size}, std::move(unitary), 0);
}

PureState QPufDevice::eval(const PureState &challenge) {
    if (challenge.dim() != dim_.size) {
        throw std::invalid_argument("eval: challenge dimension mismatch");
    }
    require_normalized(challenge);
    if (query_budget_ && query_count_ >= *query_budget_) {
        throw QueryBudgetExhausted("device " + id_ + " query budget exhausted");
    }
    ++query_count_;
    return PureState{unitary_.matrix * challenge.amplitudes};
}

PureState DeviceInspector::apply(const QPufDevice &device, const PureState &challenge) {
    return qpufid::apply(device.unitary_, challenge);
}

PureState TransitWindow::query(const PureState &challenge) {
    if (remaining_ == 0) {
        throw QueryBudgetExhausted("transit window budget exhausted");
    }
    --remaining_;
    return device_->eval(challenge);
}

std::uint64_t default_transit_budget(Dimension dim) {
    return static_cast<std::uint64_t>(10) * static_cast<std::uint64_t>(dim.qubits);
}

void require_consistent_deltas(double delta_r, double delta_c) {
    if (delta_r < 0.0 || delta_r > 1.0 || delta_c < 0.0 || delta_c > 1.0) {
        throw std::invalid_argument("robustness/collision deltas must lie in [0, 1]");
    }
    if (delta_c > 1.0 - delta_r) {
        throw std::invalid_argument("inconsistent deltas: delta_c must be <= 1 - delta_r");
    }
}

RobustnessReport check_robustness(QPufDevice &device, int trials, double delta_r, RngStream &rng) {
    if (trials < 1 || delta_r < 0.0 || delta_r > 1.0) {
        throw std::invalid_argument("check_robustness: bad trials or delta_r");
    }
    double min_out = 1.0;
    double max_drift = 0.0;
    for (int t = 0; t < trials; ++t) {
        const double target = delta_r + (1.0 - delta_r) * rng.uniform();
        auto [a, b] = pair_with_fidelity(device.dim(), target, rng);
        const double f_in = fidelity(a, b);
        const double f_out = fidelity(device.eval(a), device.eval(b));
        min_out = std::min(min_out, f_out);
        max_drift = std::max(max_drift, std::abs(f_out - f_in));
    }
    return RobustnessReport{trials, delta_r, min_out, max_drift, min_out >= delta_r - kAlgebraTol};
}

CollisionReport check_collision_resistance(QPufDevice &device, int trials, double delta_c,
                                           RngStream &rng) {
    if (trials < 1 || delta_c < 0.0 || delta_c > 1.0) {
        throw std::invalid_argument("check_collision_resistance: bad trials or delta_c");
    }
    const double ceiling = 1.0 - delta_c;
    double max_out = 0.0;
    double max_drift = 0.0;
    for (int t = 0; t < trials; ++t) {
        const double target = ceiling * rng.uniform();
        auto [a, b] = pair_with_fidelity(device.dim(), target, rng);
        const double f_in = fidelity(a, b);
        const double f_out = fidelity(device.eval(a), device.eval(b));
        max_out = std::max(max_out, f_out);
        max_drift = std::max(max_drift, std::abs(f_out - f_in));
    }
    return CollisionReport{trials, delta_c, max_out, max_drift, max_out <= ceiling + kAlgebraTol};
}

UnforgeabilityReport run_unforgeability_game(QPufDevice &device, Forger &forger,
                                             const UnforgeabilityConfig &config, RngStream &rng) {
    if (config.trials < 1) {
        throw std::invalid_argument("unforgeability game needs at least one trial");
    }
    if (config.delta <= 0.0 || config.delta > 1.0) {
        throw std::invalid_argument("unforgeability delta must lie in (0, 1]");
    }
    const int d = forger.learned_dimension();
    const int space = device.dim().size;
    if (config.learn_queries >= space) {
        throw std::invalid_argument("learning phase must stay below the space dimension");
    }

    std::uint64_t successes = 0;
    double sum_f2 = 0.0;
    double sum_f2_sq = 0.0;
    for (int t = 0; t < config.trials; ++t) {
        RngStream trial_rng = rng.substream(static_cast<std::uint64_t>(t));
        PureState challenge = haar_random_state(device.dim(), trial_rng);
        PureState truth = DeviceInspector::apply(device, challenge);
        PureState forgery = forger.forge(challenge, trial_rng);
        const double f = fidelity(forgery, truth);
        const double f2 = f * f;
        sum_f2 += f2;
        sum_f2_sq += f2 * f2;
        if (f2 >= config.delta) {
            ++successes;
        }
    }
    const double n = static_cast<double>(config.trials);
    const double mean = sum_f2 / n;
    const double var = std::max(0.0, sum_f2_sq / n - mean * mean);
    return UnforgeabilityReport{
        config.trials,
        d,
        config.delta,
        successes,
        static_cast<double>(successes) / n,
        static_cast<double>(d + 1) / static_cast<double>(space),
        mean,
        std::sqrt(var),
        forger.is_qpt(),
    };
}

} // namespace qpufid
