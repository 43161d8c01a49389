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

#include "pilotforge/matlin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace pilotforge::matlin {

namespace {

double frob(const CMatrix& a) { return a.norm(); }

CMatrix hermitian_part(const CMatrix& a) { return 0.5 * (a + a.adjoint()); }

void require_square(const CMatrix& a, const char* what) {
    if (a.rows() != a.cols()) {
        throw Error(ErrorCode::DimMismatch, std::string(what) + ": matrix is not square");
    }
}

void require_finite(const CMatrix& a, const char* what) {
    if (!all_finite(a)) {
        throw Error(ErrorCode::NonFinite, std::string(what) + ": non-finite entry");
    }
}

}  // namespace

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

CMatrix vec(const CMatrix& a) {
    // Eigen storage is column-major, so the reshape is exactly column stacking.
    return a.reshaped(a.size(), 1);
}

CMatrix blkdiag(std::span<const CMatrix> blocks) {
    Eigen::Index rows = 0;
    Eigen::Index cols = 0;
    for (const auto& b : blocks) {
        rows += b.rows();
        cols += b.cols();
    }
    CMatrix out = CMatrix::Zero(rows, cols);
    Eigen::Index r = 0;
    Eigen::Index c = 0;
    for (const auto& b : blocks) {
        out.block(r, c, b.rows(), b.cols()) = b;
        r += b.rows();
        c += b.cols();
    }
    return out;
}

bool all_finite(const CMatrix& a) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag())) {
                return false;
            }
        }
    }
    return true;
}

bool is_hermitian(const CMatrix& a, double rel_tol) {
    if (a.rows() != a.cols()) {
        return false;
    }
    return (a - a.adjoint()).norm() <= rel_tol * frob(a);
}

HermEig herm_eig(const CMatrix& a) {
    require_square(a, "herm_eig");
    require_finite(a, "herm_eig");
    if (!is_hermitian(a)) {
        throw Error(ErrorCode::NotHermitian, "herm_eig: input fails the symmetry check");
    }
    const Eigen::Index n = a.rows();
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian_part(a));
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::Singular, "herm_eig: eigensolver did not converge");
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    const RVector& vals = solver.eigenvalues();
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index x, Eigen::Index y) { return vals(x) > vals(y); });

    HermEig out;
    out.values.resize(n);
    out.vectors.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const Eigen::Index src = order[static_cast<std::size_t>(k)];
        out.values(k) = vals(src);
        CVector v = solver.eigenvectors().col(src);
        const double vmax = v.cwiseAbs().maxCoeff();
        for (Eigen::Index i = 0; i < n; ++i) {
            if (std::abs(v(i)) > 1e-8 * vmax) {
                v *= std::conj(v(i)) / std::abs(v(i));
                break;
            }
        }
        out.vectors.col(k) = v;
    }
    return out;
}

CMatrix psd_sqrt(const CMatrix& a) {
    const HermEig eig = herm_eig(a);
    const double tol = kPsdTol * frob(a);
    RVector root(eig.values.size());
    for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
        if (eig.values(k) < -tol) {
            throw Error(ErrorCode::NotPSD, "psd_sqrt: eigenvalue " + std::to_string(eig.values(k)));
        }
        root(k) = std::sqrt(std::max(eig.values(k), 0.0));
    }
    return hermitian_part(eig.vectors * root.asDiagonal() * eig.vectors.adjoint());
}

CMatrix psd_inv_sqrt(const CMatrix& a) {
    const HermEig eig = herm_eig(a);
    const Eigen::Index n = eig.values.size();
    if (n == 0) {
        return CMatrix(0, 0);
    }
    const double top = eig.values(0);
    const double bottom = eig.values(n - 1);
    if (!(top > 0.0) || bottom * kMaxCondition < top) {
        throw Error(ErrorCode::Singular, "psd_inv_sqrt: matrix is not safely positive definite");
    }
    const RVector inv_root = eig.values.cwiseSqrt().cwiseInverse();
    return hermitian_part(eig.vectors * inv_root.asDiagonal() * eig.vectors.adjoint());
}

CMatrix range_projector(const CMatrix& a) {
    require_finite(a, "range_projector");
    if (a.size() == 0) {
        return CMatrix::Zero(a.rows(), a.rows());
    }
    Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeThinU);
    const RVector& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0) {
        return CMatrix::Zero(a.rows(), a.rows());
    }
    const double cutoff = kPinvCutoff * sv(0);
    Eigen::Index r = 0;
    while (r < sv.size() && sv(r) > cutoff) {
        ++r;
    }
    const CMatrix u = svd.matrixU().leftCols(r);
    return u * u.adjoint();
}

Eigen::Index rank(const CMatrix& a) {
    if (a.size() == 0) {
        return 0;
    }
    Eigen::JacobiSVD<CMatrix> svd(a);
    const RVector& sv = svd.singularValues();
    if (sv(0) == 0.0) {
        return 0;
    }
    return (sv.array() > kPinvCutoff * sv(0)).count();
}

CMatrix solve_hpd(const CMatrix& a, const CMatrix& b) {
    require_square(a, "solve_hpd");
    if (a.rows() != b.rows()) {
        throw Error(ErrorCode::DimMismatch, "solve_hpd: right-hand side row count");
    }
    require_finite(a, "solve_hpd");
    require_finite(b, "solve_hpd");
    Eigen::LLT<CMatrix> llt(hermitian_part(a));
    if (llt.info() != Eigen::Success) {
        throw Error(ErrorCode::Singular, "solve_hpd: Cholesky factorization failed");
    }
    if (llt.rcond() * kMaxCondition < 1.0) {
        throw Error(ErrorCode::Singular, "solve_hpd: condition estimate exceeds 1e14");
    }
    return llt.solve(b);
}

double rel_diff(const CMatrix& a, const CMatrix& b) {
    const double scale = std::max(b.norm(), std::numeric_limits<double>::min());
    return (a - b).norm() / scale;
}

double real_trace(const CMatrix& a) { return a.trace().real(); }

RVector column_power(const CMatrix& a) { return a.colwise().squaredNorm().transpose(); }

}  // namespace pilotforge::matlin
