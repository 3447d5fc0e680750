// Copyright 2026 The spinrsp Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file squeezing.hpp
 * @brief Two-axis two-spin (2A2S) squeezing between ensembles A and B.
 *
 * H/J = S+_A S+_B + S-_A S-_B conserves k_A - k_B, so starting from
 * |N>_A|N>_B the evolution never leaves span{|k>_A|k>_B}. On that subspace H
 * is a real symmetric tridiagonal matrix with couplings (N-k)(k+1), which is
 * what everything here works with. Time is the dimensionless tau = Jt/hbar.
 */

#pragma once

#include <utility>
#include <vector>

#include "spinrsp/collective_spin.hpp"

namespace spinrsp {

/// Which phase convention a pair state is expressed in.
enum class PairFrame {
    kLab,      ///< raw 2A2S evolution
    kRotated,  ///< after exp(i Sz_A pi/8) exp(i Sz_B pi/8)
    kEpr,      ///< spin-EPR target, defined without the frame rotation
};

/// sum_k psi_k |k>_A |k>_B, unit norm.
class DiagonalPairState {
public:
    DiagonalPairState(int n_atoms, ComplexVector psi, PairFrame frame);

    [[nodiscard]] int n_atoms() const { return n_atoms_; }
    [[nodiscard]] const ComplexVector& psi() const { return psi_; }
    [[nodiscard]] PairFrame frame() const { return frame_; }

private:
    int n_atoms_;
    ComplexVector psi_;
    PairFrame frame_;
};

struct SqueezingRun {
    int n_atoms;
    double tau;
    DiagonalPairState state;
    bool frame_rotated;
};

/// Evolve to `tau` and, unless told otherwise, apply the pi/8 frame rotation.
SqueezingRun make_squeezing_run(int n_atoms, double tau, bool frame_rotated = true);

struct VarianceTriple {
    double var_xp;  ///< Var(Sx_A + Sx_B)
    double var_ym;  ///< Var(Sy_A - Sy_B)
    double var_zm;  ///< Var(Sz_A - Sz_B)
};

/// H/J restricted to {|k,k>}: zero diagonal, off-diagonal (N-k)(k+1).
RealMatrix build_2a2s_tridiagonal(int n_atoms);

/// Holds the eigendecomposition of the subspace Hamiltonian so repeated
/// evolutions (time scans) cost O(N^2) each. Immutable after construction.
class PairEvolver {
public:
    explicit PairEvolver(int n_atoms);

    [[nodiscard]] int n_atoms() const { return n_atoms_; }
    /// exp(-i H tau)|N,N>, in the lab frame.
    [[nodiscard]] DiagonalPairState evolve(double tau) const;

private:
    int n_atoms_;
    RealVector eigenvalues_;
    RealMatrix eigenvectors_;
};

DiagonalPairState evolve_2a2s(int n_atoms, double tau);

/// psi_k -> psi_k exp(i (2k-N) pi/4).
DiagonalPairState apply_frame_rotation(const DiagonalPairState& state);

/// psi_k = (-1)^k / sqrt(N+1).
DiagonalPairState epr_minus(int n_atoms);

/// |<target|state>|^2.
double fidelity(const DiagonalPairState& state, const DiagonalPairState& target);

struct OptimalTime {
    double tau;
    double fidelity;
};

/// Maximizes fidelity(frame-rotated evolve_2a2s(N, tau), epr_minus(N)) over
/// tau in (0, pi/2]: a 1e-3 scan followed by golden-section refinement.
OptimalTime find_optimal_time(int n_atoms);

/// Sampled fidelity curve used by the optimal-time search.
std::vector<std::pair<double, double>> fidelity_scan(int n_atoms, double tau_max, double step);

/// Closed-form ladder sums; requires a frame-rotated run (ContractError otherwise).
VarianceTriple pair_variances(const SqueezingRun& run);

/// 2A2S state for unequal atom numbers: amplitude j sits on
/// |n_a - j>_A |n_b - j>_B, j = 0..min(n_a, n_b).
struct OffsetPairState {
    int n_a;
    int n_b;
    ComplexVector amplitudes;
};

/// exp(-i H tau)|n_a>_A|n_b>_B, optionally followed by the pi/8 frame rotation
/// of each ensemble. Reduces to evolve_2a2s (index reversed) when n_a == n_b.
OffsetPairState evolve_2a2s_offset(int n_a, int n_b, double tau, bool frame_rotated = true);

}  // namespace spinrsp
