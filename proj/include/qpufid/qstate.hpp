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
 * @file qstate.hpp
 * Dense state-vector kernel: pure states, density matrices, Haar sampling,
 * fidelity, and subspace utilities on n-qubit Hilbert spaces.
 */
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "qpufid/rng.hpp"

namespace qpufid {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

/// Tolerance for algebraic identities (norms, hermiticity, unitarity).
constexpr double kAlgebraTol = 1e-10;
/// Tolerance below which a vector is treated as linearly dependent.
constexpr double kRankTol = 1e-8;

/** @brief Hilbert-space dimension derived from a qubit count n in [1, 12]. */
struct Dimension {
    int qubits;
    int size;

    static Dimension from_qubits(int n);
    bool operator==(const Dimension &) const = default;
};

/** @brief Unit-norm state vector. */
struct PureState {
    Vector amplitudes;

    [[nodiscard]] int dim() const { return static_cast<int>(amplitudes.size()); }
};

/** @brief Hermitian, trace-one, positive semidefinite operator. */
struct DensityMatrix {
    Matrix matrix;

    [[nodiscard]] int dim() const { return static_cast<int>(matrix.rows()); }
};

struct UnitaryMatrix {
    Matrix matrix;

    [[nodiscard]] int dim() const { return static_cast<int>(matrix.rows()); }
};

/** @brief Orthonormal set spanning a d-dimensional subspace. */
struct SubspaceBasis {
    std::vector<PureState> vectors;

    [[nodiscard]] int dimension() const { return static_cast<int>(vectors.size()); }
    [[nodiscard]] bool empty() const { return vectors.empty(); }
};

/// Throws std::invalid_argument unless `state` is unit norm within kAlgebraTol.
void require_normalized(const PureState &state);

/// Throws std::invalid_argument unless hermitian, unit trace, PSD within kAlgebraTol.
void require_density(const DensityMatrix &rho);

[[nodiscard]] bool is_unitary(const UnitaryMatrix &u, double tol = kAlgebraTol);

/// Normalizes a raw vector into a PureState. Throws on (near-)zero input.
PureState normalized_state(const Vector &v);

/// Computational basis vector |index>.
PureState basis_state(Dimension dim, int index);

PureState haar_random_state(Dimension dim, RngStream &rng);

/**
 * @brief Haar-distributed unitary via complex Ginibre + QR.
 *
 * The raw Householder Q is phase-corrected by diag(R)/|diag(R)| so the
 * resulting distribution is exactly the unitary-group Haar measure.
 */
UnitaryMatrix haar_random_unitary(Dimension dim, RngStream &rng);

/// Uhlmann fidelity F in [0, 1] (not squared). Pure-pure case: |<a|b>|.
double fidelity(const PureState &a, const PureState &b);
double fidelity(const DensityMatrix &rho, const PureState &psi);
double fidelity(const PureState &psi, const DensityMatrix &rho);
double fidelity(const DensityMatrix &rho, const DensityMatrix &sigma);

PureState apply(const UnitaryMatrix &u, const PureState &state);

/// Haar-uniform state in the orthogonal complement of `state`. Requires D >= 2.
PureState orthogonal_state(const PureState &state, RngStream &rng);

/// Haar-uniform state orthogonal to every basis vector. Requires d < space_dim.
PureState complement_haar_state(const SubspaceBasis &basis, int space_dim, RngStream &rng);

/**
 * @brief Modified Gram-Schmidt with dependent-vector dropping.
 *
 * Vectors whose residual norm falls below kRankTol are discarded, so the
 * returned basis dimension can be smaller than the input count.
 */
SubspaceBasis orthonormalize(const std::vector<PureState> &states);

/// Sum of |<e_i|phi>|^2 over the basis; clamped to [0, 1].
double subspace_overlap(const PureState &phi, const SubspaceBasis &basis);

} // namespace qpufid
