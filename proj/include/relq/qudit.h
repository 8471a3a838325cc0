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

#ifndef RELQ_QUDIT_H
#define RELQ_QUDIT_H

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "relq/rng.h"

namespace relq {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

/// Tolerance for identities derived through several matrix products.
inline constexpr double kDerivedTolerance = 1e-10;
/// Tolerance for direct invariants (normalization, hermiticity, trace).
inline constexpr double kDirectTolerance = 1e-12;

/// Normalized pure state of a single qudit.
class PureState {
   public:
    /// Throws ArgumentError unless dim >= 2 and the vector is normalized within 1e-12.
    explicit PureState(Vector amps);

    static PureState basis(int dim, int j);
    /// Normalizes `amps` first; throws on the zero vector.
    static PureState normalized(Vector amps);
    /// Haar-random state: normalized vector of i.i.d. complex Gaussians.
    static PureState haar(int dim, Rng &rng);

    int dim() const {
        return static_cast<int>(amps_.size());
    }
    const Vector &amps() const {
        return amps_;
    }
    Complex operator[](int j) const {
        return amps_[j];
    }

   private:
    Vector amps_;
};

class DensityMatrix {
   public:
    /// Validates hermiticity, unit trace and positive semidefiniteness.
    explicit DensityMatrix(Matrix mat);

    static DensityMatrix from_pure(const PureState &psi);
    static DensityMatrix from_vector(const Vector &v);
    static DensityMatrix maximally_mixed(int dim);

    int dim() const {
        return static_cast<int>(mat_.rows());
    }
    const Matrix &mat() const {
        return mat_;
    }

   private:
    Matrix mat_;
};

/// Label (a, b) of the Weyl operator X^a Z^b. The flat index a*d + b is the wire form.
struct WeylIndex {
    int a = 0;
    int b = 0;

    int flat(int dim) const {
        return a * dim + b;
    }
    static WeylIndex from_flat(int dim, int flat);
    static WeylIndex random(int dim, Rng &rng);

    bool operator==(const WeylIndex &) const = default;
};

class Unitary {
   public:
    /// Throws ArgumentError unless U^dagger U = I within 1e-10.
    explicit Unitary(Matrix mat);

    int dim() const {
        return static_cast<int>(mat_.rows());
    }
    const Matrix &mat() const {
        return mat_;
    }
    Unitary adjoint() const;
    PureState apply(const PureState &psi) const;
    DensityMatrix conjugate(const DensityMatrix &rho) const;

    static Unitary haar(int dim, Rng &rng);

   private:
    Matrix mat_;
};

/// Pure state on C^dimA (x) C^dimB, amplitudes row-major over (A, B).
class BipartiteState {
   public:
    BipartiteState(int dim_a, int dim_b, Vector amps);

    int dim_a() const {
        return dim_a_;
    }
    int dim_b() const {
        return dim_b_;
    }
    const Vector &amps() const {
        return amps_;
    }
    DensityMatrix reduced_a() const;
    DensityMatrix reduced_b() const;
    /// Singular values of the coefficient matrix, descending.
    std::vector<double> schmidt_coefficients() const;

   private:
    int dim_a_;
    int dim_b_;
    Vector amps_;
};

/// X^a Z^b with X|j> = |j+1 mod d>, Z|j> = w^j |j>, w = exp(2 pi i / d).
Unitary weyl_unitary(int dim, WeylIndex idx);

/// Cached matrix of weyl_unitary(dim, idx); the cache is per thread.
const Matrix &weyl_matrix(int dim, WeylIndex idx);

/// (1/d^2) sum_i U_i rho U_i^dagger over all d^2 Weyl operators.
DensityMatrix weyl_twirl(const DensityMatrix &rho);

/// (1/sqrt d) sum_i |i>|i>.
BipartiteState bell_state(int dim);

/// Element of the measurement basis used for teleportation: (I (x) conj(U_(a,b))) |Phi>.
/// With this labelling, outcome (a, b) leaves the receiver holding U_(a,b)|psi>, so the
/// correction is always weyl_unitary(d, idx).adjoint().
BipartiteState bell_basis_state(int dim, WeylIndex idx);

/// <psi|rho|psi>.
double fidelity(const DensityMatrix &rho, const PureState &psi);

/// Two-outcome measurement {|psi><psi|, I - |psi><psi|}; true on the first outcome.
bool projective_test(const DensityMatrix &rho, const PureState &psi, Rng &rng);

/// (1/2) || a - b ||_1.
double trace_distance(const DensityMatrix &a, const DensityMatrix &b);

/// Reduced state of subsystem `keep` (0 or 1) of a two-party density matrix of dims (da, db).
Matrix partial_trace(const Matrix &rho, int dim_a, int dim_b, int keep);

Matrix kron(const Matrix &a, const Matrix &b);

}  // namespace relq

#endif
