// Copyright 2026 The spinrsp Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file collective_spin.hpp
 * @brief Fock-basis description of a single two-component ensemble.
 *
 * An ensemble of N atoms in the symmetric subspace lives in an (N+1)-dim
 * space spanned by |k>, k = 0..N, with k atoms in mode b and N-k in mode a.
 * Spin operators follow the Schwinger-boson convention
 *
 *     Sx = b'a + a'b,  Sy = -i b'a + i a'b,  Sz = b'b - a'a,
 *
 * so Sz|k> = (2k-N)|k> and [Sx, Sy] = 2i Sz. These are twice the usual
 * angular-momentum operators with j = N/2, m = k - N/2.
 */

#pragma once

#include <Eigen/Dense>

#include <complex>

namespace spinrsp {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

/// Triple of spin expectation values (<Sx>, <Sy>, <Sz>).
struct SpinVector {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    [[nodiscard]] double norm() const;
    [[nodiscard]] double distance(const SpinVector& other) const;
    [[nodiscard]] SpinVector scaled(double factor) const { return {x * factor, y * factor, z * factor}; }
};

/// Pure state of one ensemble, amplitudes indexed by Fock label k.
class EnsembleState {
public:
    /// Throws DomainError when the length is not n_atoms + 1, or when
    /// `normalized` is set but the norm deviates from 1 by more than 1e-12.
    EnsembleState(int n_atoms, ComplexVector amplitudes, bool normalized = false);

    static EnsembleState fock(int n_atoms, int k);

    [[nodiscard]] int n_atoms() const { return n_atoms_; }
    [[nodiscard]] const ComplexVector& amplitudes() const { return amplitudes_; }
    [[nodiscard]] bool normalized() const { return normalized_; }
    [[nodiscard]] double norm() const { return amplitudes_.norm(); }

    /// Copy scaled to unit norm; DegenerateStateError on a zero vector.
    [[nodiscard]] EnsembleState normalized_copy() const;

private:
    int n_atoms_;
    ComplexVector amplitudes_;
    bool normalized_;
};

struct SpinOperatorSet {
    int n_atoms = 0;
    ComplexMatrix sx;
    ComplexMatrix sy;
    ComplexMatrix sz;
    ComplexMatrix splus;
    ComplexMatrix sminus;
};

/// Dense Sx, Sy, Sz, S+, S- for N atoms. N = 0 is rejected.
SpinOperatorSet build_spin_operators(int n_atoms);

/// Bloch-sphere angles with theta in [0, pi] and phi in [0, 2pi).
///
/// Inputs are reduced modulo 2pi; a theta that lands in (pi, 2pi) is folded
/// to (2pi - theta, phi + pi), which names the same direction.
class RotationSpec {
public:
    RotationSpec(double theta, double phi);

    [[nodiscard]] double theta() const { return theta_; }
    [[nodiscard]] double phi() const { return phi_; }

private:
    double theta_;
    double phi_;
};

/// Matrix of U = exp(-i Sz phi/2) exp(-i Sy theta/2) in the Fock basis.
/// Column k' holds U|k'>. Unitary to ~1e-13 for N in the hundreds.
ComplexMatrix rotation_matrix(int n_atoms, const RotationSpec& spec);

/// Real matrix d(theta) = exp(-i Sy theta/2); theta is used as given.
///
/// Built from the spectral decomposition of Sy (a phase-conjugated copy of the
/// real tridiagonal Sx) with the exact eigenvalues 2k-N substituted, which is
/// stable for large N.
RealMatrix rotation_d_matrix(int n_atoms, double theta);

/// Same matrix from the explicit binomial expansion of the rotated mode
/// operators,
///
///   d[k'][k] = sqrt(k!(N-k)!k'!(N-k')!) * sum_n (-1)^n cos^(k'-k+N-2n)(theta/2)
///              sin^(2n+k-k')(theta/2) / ((k'-n)! (N-k-n)! n! (k-k'+n)!),
///
/// n from max(0, k'-k) to min(k', N-k). Terms are formed in log space with sign
/// tracking, but the alternating sum still cancels catastrophically once N
/// grows past ~30 (about 1e-8 error at N = 50); kept as an independent check.
RealMatrix rotation_d_matrix_closed_form(int n_atoms, double theta);

/// Diagonal of exp(-i Sz angle/2): entry k is exp(-i (2k-N) angle/2).
ComplexVector z_rotation_phases(int n_atoms, double angle);

/// |k>^(theta,phi) = U|k>.
EnsembleState rotated_fock_state(int n_atoms, int k, const RotationSpec& spec);

/// op * amplitudes. The result carries the normalized flag only when the
/// input is normalized and the caller asserts `op_is_unitary`.
EnsembleState apply_operator(const EnsembleState& state, const ComplexMatrix& op,
                             bool op_is_unitary = false);

/// <psi|S^j|psi>/<psi|psi> for j = x, y, z using the ladder structure
/// directly (no dense operators).
SpinVector spin_expectations(const EnsembleState& state);

}  // namespace spinrsp
