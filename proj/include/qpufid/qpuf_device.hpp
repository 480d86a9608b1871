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
 * @file qpuf_device.hpp
 * Simulated unitary qPUF device: generation, black-box evaluation with a
 * query ledger, transit query windows, and the device-level security games
 * (robustness, collision resistance, selective unforgeability).
 *
 * The hidden unitary is reachable only through DeviceInspector, which models
 * simulator-privileged debug access; protocol and adversary code must go
 * through eval() and pay the ledger.
 */
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include "qpufid/qstate.hpp"
#include "qpufid/rng.hpp"

namespace qpufid {

class QueryBudgetExhausted : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct DeviceInspector;

class QPufDevice {
  public:
    /**
     * @brief Manufactures a device with a fresh Haar-random unitary.
     *
     * The same stream state yields the identical device; distinct seeds give
     * distinct ids. No query budget is set by default (the legitimate holder
     * is unrestricted); transit access is bounded separately.
     */
    static QPufDevice generate(Dimension dim, RngStream &rng);

    /// Test fixture: wraps a caller-supplied unitary.
    static QPufDevice with_unitary(std::string id, UnitaryMatrix unitary);

    /// Black-box evaluation. Increments the query ledger; fails closed once
    /// the budget (if any) is exhausted. Validates dimension and norm.
    PureState eval(const PureState &challenge);

    [[nodiscard]] const std::string &id() const { return id_; }
    [[nodiscard]] Dimension dim() const { return dim_; }
    [[nodiscard]] std::uint64_t query_count() const { return query_count_; }
    [[nodiscard]] std::optional<std::uint64_t> query_budget() const { return query_budget_; }
    void set_query_budget(std::optional<std::uint64_t> budget) { query_budget_ = budget; }
    /// Seed of the stream the device was manufactured from (0 for fixtures).
    [[nodiscard]] std::uint64_t generation_seed() const { return generation_seed_; }

  private:
    QPufDevice(std::string id, Dimension dim, UnitaryMatrix unitary, std::uint64_t seed);

    friend struct DeviceInspector;

    std::string id_;
    Dimension dim_;
    UnitaryMatrix unitary_;
    std::uint64_t generation_seed_;
    std::uint64_t query_count_ = 0;
    std::optional<std::uint64_t> query_budget_;
};

/** @brief Simulator-privileged access that bypasses the query ledger. */
struct DeviceInspector {
    static const UnitaryMatrix &unitary(const QPufDevice &device) { return device.unitary_; }
    static PureState apply(const QPufDevice &device, const PureState &challenge);
};

/**
 * @brief Bounded query window an adversary gets while the device is in
 * transit. Queries pass through to the device (and its ledger) and consume
 * the window budget; exhaustion throws QueryBudgetExhausted.
 */
class TransitWindow {
  public:
    TransitWindow(QPufDevice &device, std::uint64_t budget)
        : device_(&device), remaining_(budget) {}

    PureState query(const PureState &challenge);

    [[nodiscard]] std::uint64_t remaining() const { return remaining_; }
    [[nodiscard]] QPufDevice &device() { return *device_; }

  private:
    QPufDevice *device_;
    std::uint64_t remaining_;
};

/// Default transit budget: 10 queries per qubit of security parameter.
std::uint64_t default_transit_budget(Dimension dim);

struct RobustnessReport {
    int trials;
    double delta_r;
    double min_output_fidelity;
    /// max |F_out - F_in| observed; 0 for any unitary evaluation.
    double max_fidelity_drift;
    bool pass;
};

struct CollisionReport {
    int trials;
    double delta_c;
    double max_output_fidelity;
    double max_fidelity_drift;
    bool pass;
};

/// Requires delta_c <= 1 - delta_r; throws std::invalid_argument otherwise.
void require_consistent_deltas(double delta_r, double delta_c);

/**
 * @brief Samples challenge pairs with input fidelity >= delta_r and checks
 * the response fidelity stays >= delta_r.
 */
RobustnessReport check_robustness(QPufDevice &device, int trials, double delta_r, RngStream &rng);

/**
 * @brief Samples challenge pairs with input fidelity <= 1 - delta_c and
 * checks the response fidelity stays <= 1 - delta_c.
 */
CollisionReport check_collision_resistance(QPufDevice &device, int trials, double delta_c,
                                           RngStream &rng);

/** @brief Forging adversary interface for the unforgeability game. */
class Forger {
  public:
    virtual ~Forger() = default;
    virtual PureState forge(const PureState &challenge, RngStream &rng) = 0;
    /// Dimension of the challenge subspace the forger has learned.
    [[nodiscard]] virtual int learned_dimension() const = 0;
    /// False for baselines outside the quantum-polynomial-time model.
    [[nodiscard]] virtual bool is_qpt() const { return true; }
};

/// Baseline forger that holds the device itself; answers are always perfect.
class DeviceHolderForger : public Forger {
  public:
    explicit DeviceHolderForger(QPufDevice &device) : device_(&device) {}
    PureState forge(const PureState &challenge, RngStream &) override {
        return device_->eval(challenge);
    }
    [[nodiscard]] int learned_dimension() const override { return device_->dim().size; }
    [[nodiscard]] bool is_qpt() const override { return false; }

  private:
    QPufDevice *device_;
};

struct UnforgeabilityConfig {
    /// Challenges the forger may learn from before the game.
    int learn_queries = 0;
    int trials = 1000;
    /// Success threshold on squared fidelity, in (0, 1].
    double delta = 0.5;
};

struct UnforgeabilityReport {
    int trials;
    int learned_dimension;
    double delta;
    std::uint64_t successes;
    double empirical_success_rate;
    /// Selective unforgeability bound (d+1)/D on Pr[F^2 >= delta].
    double bound;
    double mean_fidelity_sq;
    double stddev_fidelity_sq;
    /// False when the forger sits outside the bounded-adversary model, in
    /// which case `bound` does not apply.
    bool bound_applicable;
};

/**
 * @brief Selective unforgeability game: Haar challenges are drawn, the
 * forger answers, and success means F(forgery, response)^2 >= delta.
 * Ground-truth responses come from privileged inspection, so the game does
 * not consume device budget.
 */
UnforgeabilityReport run_unforgeability_game(QPufDevice &device, Forger &forger,
                                             const UnforgeabilityConfig &config, RngStream &rng);

} // namespace qpufid
