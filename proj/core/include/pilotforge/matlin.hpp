// SPDX-License-Identifier: Apache-2.0
//
// pilotforge: joint pilot and analog combiner design for multi-cell massive MIMO
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "pilotforge/errors.hpp"

/// Dense complex linear algebra used by every other module.
///
/// Tolerances are relative to the Frobenius norm of the input so that the
/// checks behave the same for a 2x2 toy and a 300x300 Gram matrix.
namespace pilotforge::matlin {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kPsdTol = 1e-10;
inline constexpr double kPinvCutoff = 1e-12;
inline constexpr double kMaxCondition = 1e14;

/// Eigen-decomposition of a Hermitian matrix, largest eigenvalue first.
struct HermEig {
    RVector values;
    CMatrix vectors;  // columns, unitary
};

CMatrix kron(const CMatrix& a, const CMatrix& b);

/// Column-stacking vectorization.
CMatrix vec(const CMatrix& a);

CMatrix blkdiag(std::span<const CMatrix> blocks);

/// Throws NotHermitian when ||a - a*||_F > 1e-10 ||a||_F.
///
/// Eigenvectors are phase-normalized so that their first entry of
/// significant modulus is real and positive; exact ties keep the solver's
/// order. Both rules make the output reproducible across runs.
HermEig herm_eig(const CMatrix& a);

/// Principal square root of a Hermitian PSD matrix. Eigenvalues in
/// [-1e-10 ||a||_F, 0) are clamped to zero; anything more negative throws NotPSD.
CMatrix psd_sqrt(const CMatrix& a);

/// Inverse of the principal square root of a Hermitian positive definite
/// matrix. Throws Singular when the condition number exceeds 1e14.
CMatrix psd_inv_sqrt(const CMatrix& a);

/// Orthogonal projector onto range(a), computed from the SVD with singular
/// values below 1e-12 sigma_max discarded. A zero matrix maps to zero.
CMatrix range_projector(const CMatrix& a);

/// Solves a x = b for Hermitian positive definite a. Throws Singular when the
/// Cholesky factorization fails or the reciprocal condition estimate drops
/// below 1e-14.
CMatrix solve_hpd(const CMatrix& a, const CMatrix& b);

/// Numerical rank with the same relative cutoff as range_projector.
Eigen::Index rank(const CMatrix& a);

bool is_hermitian(const CMatrix& a, double rel_tol = kHermitianTol);
bool all_finite(const CMatrix& a);

/// ||a - b||_F / max(||b||_F, tiny).
double rel_diff(const CMatrix& a, const CMatrix& b);

/// Real part of tr(a); callers use it on Hermitian products.
double real_trace(const CMatrix& a);

/// Column-wise squared 2-norms.
RVector column_power(const CMatrix& a);

}  // namespace pilotforge::matlin
