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

#include "qpufid/qstate.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qpufid {

namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

Vector gaussian_vector(int size, RngStream &rng) {
    Vector v(size);
    for (int i = 0; i < size; ++i) {
        v(i) = Complex(rng.gaussian(), rng.gaussian());
    }
    return v;
}

/// Projects `basis` out of `v` in place (two passes for numerical stability).
void project_out(const SubspaceBasis &basis, Vector &v) {
    for (int pass = 0; pass < 2; ++pass) {
        for (const auto &e : basis.vectors) {
            v -= e.amplitudes * e.amplitudes.dot(v);
        }
    }
}

} // namespace

Dimension Dimension::from_qubits(int n) {
    if (n < 1 || n > 12) {
        throw std::invalid_argument("qubit count must be in [1, 12], got " + std::to_string(n));
    }
    return Dimension{n, 1 << n};
}

void require_normalized(const PureState &state) {
    if (state.dim() == 0) {
        throw std::invalid_argument("empty state vector");
    }
    const double norm = state.amplitudes.norm();
    if (std::abs(norm - 1.0) > kAlgebraTol) {
        throw std::invalid_argument("state vector norm " + std::to_string(norm) + " is not 1");
    }
}

void require_density(const DensityMatrix &rho) {
    const auto &m = rho.matrix;
    if (m.rows() == 0 || m.rows() != m.cols()) {
        throw std::invalid_argument("density matrix must be square and non-empty");
    }
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > kAlgebraTol) {
        throw std::invalid_argument("density matrix is not hermitian");
    }
    if (std::abs(m.trace().real() - 1.0) > kAlgebraTol || std::abs(m.trace().imag()) > kAlgebraTol) {
        throw std::invalid_argument("density matrix trace is not 1");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -kAlgebraTol) {
        throw std::invalid_argument("density matrix is not positive semidefinite");
    }
}

bool is_unitary(const UnitaryMatrix &u, double tol) {
    const auto &m = u.matrix;
    if (m.rows() == 0 || m.rows() != m.cols()) {
        return false;
    }
    Matrix delta = m.adjoint() * m - Matrix::Identity(m.rows(), m.cols());
    return delta.cwiseAbs().maxCoeff() <= tol;
}

PureState normalized_state(const Vector &v) {
    const double norm = v.norm();
    if (norm < kRankTol) {
        throw std::invalid_argument("cannot normalize a (near-)zero vector");
    }
    return PureState{v / norm};
}

PureState basis_state(Dimension dim, int index) {
    if (index < 0 || index >= dim.size) {
        throw std::invalid_argument("basis index out of range");
    }
    Vector v = Vector::Zero(dim.size);
    v(index) = Complex(1.0, 0.0);
    return PureState{v};
}

PureState haar_random_state(Dimension dim, RngStream &rng) {
    return normalized_state(gaussian_vector(dim.size, rng));
}

UnitaryMatrix haar_random_unitary(Dimension dim, RngStream &rng) {
    const int d = dim.size;
    Matrix ginibre(d, d);
    const double scale = 1.0 / std::sqrt(2.0);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            ginibre(i, j) = Complex(rng.gaussian() * scale, rng.gaussian() * scale);
        }
    }
    Eigen::HouseholderQR<Matrix> qr(ginibre);
    Matrix q = qr.householderQ();
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    // Phase correction: without it the QR factorization is not Haar.
    for (int j = 0; j < d; ++j) {
        const Complex rjj = r(j, j);
        const double mag = std::abs(rjj);
        const Complex phase = mag > 0.0 ? rjj / mag : Complex(1.0, 0.0);
        q.col(j) *= phase;
    }
    return UnitaryMatrix{q};
}

double fidelity(const PureState &a, const PureState &b) {
    if (a.dim() != b.dim()) {
        throw std::invalid_argument("fidelity: dimension mismatch");
    }
    return clamp01(std::abs(a.amplitudes.dot(b.amplitudes)));
}

double fidelity(const DensityMatrix &rho, const PureState &psi) {
    if (rho.dim() != psi.dim()) {
        throw std::invalid_argument("fidelity: dimension mismatch");
    }
    const double overlap = (psi.amplitudes.dot(rho.matrix * psi.amplitudes)).real();
    return std::sqrt(clamp01(overlap));
}

double fidelity(const PureState &psi, const DensityMatrix &rho) { return fidelity(rho, psi); }

double fidelity(const DensityMatrix &rho, const DensityMatrix &sigma) {
    if (rho.dim() != sigma.dim()) {
        throw std::invalid_argument("fidelity: dimension mismatch");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix);
    Vector sqrt_evals = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().cast<Complex>();
    Matrix sqrt_rho = es.eigenvectors() * sqrt_evals.asDiagonal() * es.eigenvectors().adjoint();
    Eigen::SelfAdjointEigenSolver<Matrix> inner(sqrt_rho * sigma.matrix * sqrt_rho, Eigen::EigenvaluesOnly);
    double f = 0.0;
    for (int i = 0; i < inner.eigenvalues().size(); ++i) {
        f += std::sqrt(std::max(0.0, inner.eigenvalues()(i)));
    }
    return clamp01(f);
}

PureState apply(const UnitaryMatrix &u, const PureState &state) {
    if (u.dim() != state.dim()) {
        throw std::invalid_argument("apply: dimension mismatch");
    }
    return PureState{u.matrix * state.amplitudes};
}

PureState orthogonal_state(const PureState &state, RngStream &rng) {
    if (state.dim() < 2) {
        throw std::invalid_argument("orthogonal_state requires dimension >= 2");
    }
    SubspaceBasis avoid{{state}};
    return complement_haar_state(avoid, state.dim(), rng);
}

PureState complement_haar_state(const SubspaceBasis &basis, int space_dim, RngStream &rng) {
    if (basis.dimension() >= space_dim) {
        throw std::invalid_argument("complement is empty: basis dimension >= space dimension");
    }
    for (int attempt = 0; attempt < 64; ++attempt) {
        Vector v = gaussian_vector(space_dim, rng);
        project_out(basis, v);
        if (v.norm() >= kRankTol) {
            return normalized_state(v);
        }
    }
    throw std::runtime_error("complement_haar_state: repeated rank-deficient draws");
}

SubspaceBasis orthonormalize(const std::vector<PureState> &states) {
    SubspaceBasis basis;
    for (const auto &s : states) {
        Vector v = s.amplitudes;
        project_out(basis, v);
        const double norm = v.norm();
        if (norm >= kRankTol) {
            basis.vectors.push_back(PureState{v / norm});
        }
    }
    return basis;
}

double subspace_overlap(const PureState &phi, const SubspaceBasis &basis) {
    double total = 0.0;
    for (const auto &e : basis.vectors) {
        if (e.dim() != phi.dim()) {
            throw std::invalid_argument("subspace_overlap: dimension mismatch");
        }
        total += std::norm(e.amplitudes.dot(phi.amplitudes));
    }
    return clamp01(total);
}

} // namespace qpufid
