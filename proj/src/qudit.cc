// Copyright 2026 The relq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "relq/qudit.h"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <string>

#include "relq/errors.h"

namespace relq {

namespace {

void require_dim(int dim) {
    if (dim < 2) {
        throw ArgumentError("qudit dimension must be >= 2, got " + std::to_string(dim));
    }
}

Complex root_of_unity(int dim, long long power) {
    double angle = 2.0 * std::numbers::pi * static_cast<double>(power % dim) / dim;
    return {std::cos(angle), std::sin(angle)};
}

}  // namespace

PureState::PureState(Vector amps) : amps_(std::move(amps)) {
    require_dim(dim());
    if (std::abs(amps_.squaredNorm() - 1.0) > kDirectTolerance) {
        throw ArgumentError("pure state is not normalized");
    }
}

PureState PureState::basis(int dim, int j) {
    require_dim(dim);
    if (j < 0 || j >= dim) {
        throw ArgumentError("basis index out of range");
    }
    Vector v = Vector::Zero(dim);
    v[j] = 1.0;
    return PureState(std::move(v));
}

PureState PureState::normalized(Vector amps) {
    double norm = amps.norm();
    if (norm == 0.0) {
        throw ArgumentError("cannot normalize the zero vector");
    }
    return PureState(amps / norm);
}

PureState PureState::haar(int dim, Rng &rng) {
    require_dim(dim);
    Vector v(dim);
    for (int j = 0; j < dim; j++) {
        double re = rng.normal();
        double im = rng.normal();
        v[j] = Complex(re, im);
    }
    return normalized(std::move(v));
}

DensityMatrix::DensityMatrix(Matrix mat) : mat_(std::move(mat)) {
    if (mat_.rows() != mat_.cols()) {
        throw ArgumentError("density matrix must be square");
    }
    require_dim(dim());
    if ((mat_ - mat_.adjoint()).cwiseAbs().maxCoeff() > kDirectTolerance) {
        throw ArgumentError("density matrix is not Hermitian");
    }
    if (std::abs(mat_.trace() - Complex(1.0)) > kDirectTolerance) {
        throw ArgumentError("density matrix does not have unit trace");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(mat_, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -kDerivedTolerance) {
        throw ArgumentError("density matrix is not positive semidefinite");
    }
}

DensityMatrix DensityMatrix::from_pure(const PureState &psi) {
    return from_vector(psi.amps());
}

DensityMatrix DensityMatrix::from_vector(const Vector &v) {
    return DensityMatrix(v * v.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
    require_dim(dim);
    return DensityMatrix(Matrix::Identity(dim, dim) / static_cast<double>(dim));
}

WeylIndex WeylIndex::from_flat(int dim, int flat) {
    if (flat < 0 || flat >= dim * dim) {
        throw ArgumentError("flat Weyl index out of range");
    }
    return {flat / dim, flat % dim};
}

WeylIndex WeylIndex::random(int dim, Rng &rng) {
    return from_flat(dim, static_cast<int>(rng.below(static_cast<std::size_t>(dim) * dim)));
}

Unitary::Unitary(Matrix mat) : mat_(std::move(mat)) {
    if (mat_.rows() != mat_.cols() || mat_.rows() == 0) {
        throw ArgumentError("unitary must be square");
    }
    Matrix gram = mat_.adjoint() * mat_;
    if ((gram - Matrix::Identity(mat_.rows(), mat_.cols())).cwiseAbs().maxCoeff() > kDerivedTolerance) {
        throw ArgumentError("matrix is not unitary");
    }
}

Unitary Unitary::adjoint() const {
    return Unitary(mat_.adjoint());
}

PureState Unitary::apply(const PureState &psi) const {
    if (psi.dim() != dim()) {
        throw ArgumentError("dimension mismatch applying unitary");
    }
    return PureState::normalized(mat_ * psi.amps());
}

DensityMatrix Unitary::conjugate(const DensityMatrix &rho) const {
    if (rho.dim() != dim()) {
        throw ArgumentError("dimension mismatch conjugating density matrix");
    }
    Matrix out = mat_ * rho.mat() * mat_.adjoint();
    // Re-hermitize to keep roundoff below the density-matrix tolerance.
    return DensityMatrix((out + out.adjoint()) / 2.0);
}

Unitary Unitary::haar(int dim, Rng &rng) {
    Matrix g(dim, dim);
    for (int r = 0; r < dim; r++) {
        for (int c = 0; c < dim; c++) {
            double re = rng.normal();
            double im = rng.normal();
            g(r, c) = Complex(re, im);
        }
    }
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int c = 0; c < dim; c++) {
        Complex diag = r(c, c);
        q.col(c) *= diag / std::abs(diag);
    }
    return Unitary(std::move(q));
}

BipartiteState::BipartiteState(int dim_a, int dim_b, Vector amps) : dim_a_(dim_a), dim_b_(dim_b), amps_(std::move(amps)) {
    if (dim_a < 1 || dim_b < 1 || amps_.size() != static_cast<Eigen::Index>(dim_a) * dim_b) {
        throw ArgumentError("bipartite state has inconsistent dimensions");
    }
    if (std::abs(amps_.squaredNorm() - 1.0) > kDirectTolerance) {
        throw ArgumentError("bipartite state is not normalized");
    }
}

DensityMatrix BipartiteState::reduced_a() const {
    Matrix rho = amps_ * amps_.adjoint();
    return DensityMatrix(partial_trace(rho, dim_a_, dim_b_, 0));
}

DensityMatrix BipartiteState::reduced_b() const {
    Matrix rho = amps_ * amps_.adjoint();
    return DensityMatrix(partial_trace(rho, dim_a_, dim_b_, 1));
}

std::vector<double> BipartiteState::schmidt_coefficients() const {
    Matrix coeffs(dim_a_, dim_b_);
    for (int i = 0; i < dim_a_; i++) {
        for (int j = 0; j < dim_b_; j++) {
            coeffs(i, j) = amps_[i * dim_b_ + j];
        }
    }
    Eigen::JacobiSVD<Matrix> svd(coeffs);
    auto s = svd.singularValues();
    return {s.data(), s.data() + s.size()};
}

Unitary weyl_unitary(int dim, WeylIndex idx) {
    require_dim(dim);
    if (idx.a < 0 || idx.a >= dim || idx.b < 0 || idx.b >= dim) {
        throw ArgumentError("Weyl index out of range");
    }
    Matrix u = Matrix::Zero(dim, dim);
    for (int j = 0; j < dim; j++) {
        u((j + idx.a) % dim, j) = root_of_unity(dim, static_cast<long long>(idx.b) * j);
    }
    return Unitary(std::move(u));
}

const Matrix &weyl_matrix(int dim, WeylIndex idx) {
    thread_local std::vector<std::vector<Matrix>> cache;
    if (dim < 2) {
        throw ArgumentError("dimension must be at least 2");
    }
    if (cache.size() <= static_cast<std::size_t>(dim)) {
        cache.resize(dim + 1);
    }
    auto &table = cache[dim];
    if (table.empty()) {
        table.reserve(static_cast<std::size_t>(dim) * dim);
        for (int f = 0; f < dim * dim; f++) {
            table.push_back(weyl_unitary(dim, WeylIndex::from_flat(dim, f)).mat());
        }
    }
    if (idx.a < 0 || idx.a >= dim || idx.b < 0 || idx.b >= dim) {
        throw ArgumentError("Weyl index out of range");
    }
    return table[idx.flat(dim)];
}

DensityMatrix weyl_twirl(const DensityMatrix &rho) {
    int d = rho.dim();
    Matrix acc = Matrix::Zero(d, d);
    for (int a = 0; a < d; a++) {
        for (int b = 0; b < d; b++) {
            const Matrix &u = weyl_matrix(d, {a, b});
            acc += u * rho.mat() * u.adjoint();
        }
    }
    acc /= static_cast<double>(d) * d;
    return DensityMatrix((acc + acc.adjoint()) / 2.0);
}

BipartiteState bell_state(int dim) {
    return bell_basis_state(dim, {0, 0});
}

BipartiteState bell_basis_state(int dim, WeylIndex idx) {
    Matrix v = weyl_unitary(dim, idx).mat().conjugate();
    Vector amps = Vector::Zero(static_cast<Eigen::Index>(dim) * dim);
    double norm = 1.0 / std::sqrt(static_cast<double>(dim));
    for (int j = 0; j < dim; j++) {
        for (int k = 0; k < dim; k++) {
            amps[j * dim + k] = v(k, j) * norm;
        }
    }
    return BipartiteState(dim, dim, std::move(amps));
}

double fidelity(const DensityMatrix &rho, const PureState &psi) {
    if (rho.dim() != psi.dim()) {
        throw ArgumentError("dimension mismatch in fidelity");
    }
    Complex f = psi.amps().dot(rho.mat() * psi.amps());
    if (std::abs(f.imag()) > kDirectTolerance) {
        throw ArgumentError("fidelity has non-negligible imaginary part");
    }
    return std::clamp(f.real(), 0.0, 1.0);
}

bool projective_test(const DensityMatrix &rho, const PureState &psi, Rng &rng) {
    return rng.bernoulli(fidelity(rho, psi));
}

double trace_distance(const DensityMatrix &a, const DensityMatrix &b) {
    if (a.dim() != b.dim()) {
        throw ArgumentError("dimension mismatch in trace distance");
    }
    Matrix diff = a.mat() - b.mat();
    Eigen::SelfAdjointEigenSolver<Matrix> eig((diff + diff.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
    return 0.5 * eig.eigenvalues().cwiseAbs().sum();
}

Matrix partial_trace(const Matrix &rho, int dim_a, int dim_b, int keep) {
    if (rho.rows() != static_cast<Eigen::Index>(dim_a) * dim_b || rho.cols() != rho.rows()) {
        throw ArgumentError("partial trace: dimension mismatch");
    }
    if (keep == 0) {
        Matrix out = Matrix::Zero(dim_a, dim_a);
        for (int i = 0; i < dim_a; i++) {
            for (int j = 0; j < dim_a; j++) {
                for (int k = 0; k < dim_b; k++) {
                    out(i, j) += rho(i * dim_b + k, j * dim_b + k);
                }
            }
        }
        return out;
    }
    if (keep == 1) {
        Matrix out = Matrix::Zero(dim_b, dim_b);
        for (int i = 0; i < dim_b; i++) {
            for (int j = 0; j < dim_b; j++) {
                for (int k = 0; k < dim_a; k++) {
                    out(i, j) += rho(k * dim_b + i, k * dim_b + j);
                }
            }
        }
        return out;
    }
    throw ArgumentError("partial trace: keep must be 0 or 1");
}

Matrix kron(const Matrix &a, const Matrix &b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); i++) {
        for (Eigen::Index j = 0; j < a.cols(); j++) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

}  // namespace relq
