// Copyright 2026 The spinrsp Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file wigner.hpp
 * @brief Spin Wigner function W(theta, phi) = sum_kq rho_kq Y_kq(theta, phi)
 *        of a single ensemble.
 *
 * The Fock state |k> of N atoms is the angular-momentum state |j m> with
 * j = N/2, m = k - j; only this relabeling enters, no operator rescaling.
 * Half-integers are carried as their doubled value.
 */

#pragma once

#include <vector>

#include "spinrsp/collective_spin.hpp"

namespace spinrsp {

/// Integer or half-integer stored as twice its value.
struct HalfInt {
    int twice = 0;

    static constexpr HalfInt whole(int value) { return {2 * value}; }
    static constexpr HalfInt half(int twice_value) { return {twice_value}; }
    [[nodiscard]] constexpr double value() const { return twice / 2.0; }
};

/// Wigner 3j symbol from the Racah single sum with log-factorials and
/// compensated summation. Returns exactly 0 when a selection rule fails
/// (m1 + m2 + m3 != 0, triangle, |m| > j, parity of j + m or of j1 + j2 + j3).
double wigner_3j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt m1, HalfInt m2, HalfInt m3);

/// Y_kq with the Condon-Shortley phase. Requires |q| <= k.
Complex spherical_harmonic(int k, int q, double theta, double phi);

/// Orthonormalized associated Legendre values Pbar_l^m(cos theta) for
/// 0 <= m <= l <= l_max, so that Y_lm = Pbar_l^m e^{i m phi} for m >= 0.
class LegendreTable {
public:
    LegendreTable(int l_max, double theta);

    [[nodiscard]] double operator()(int l, int m) const { return values_[index(l, m)]; }

private:
    [[nodiscard]] static std::size_t index(int l, int m) {
        return static_cast<std::size_t>(l) * (l + 1) / 2 + static_cast<std::size_t>(m);
    }
    std::vector<double> values_;
};

/// Density matrix of one ensemble in the |j m> basis (index k = j + m).
class AngularState {
public:
    /// Validates unit trace, hermiticity (1e-12) and eigenvalues >= -1e-10.
    AngularState(int n_atoms, ComplexMatrix rho);

    static AngularState from_pure(const EnsembleState& state);

    [[nodiscard]] int two_j() const { return two_j_; }
    [[nodiscard]] const ComplexMatrix& rho() const { return rho_; }

private:
    int two_j_;
    ComplexMatrix rho_;
};

/// rho_kq for 0 <= k <= 2j, |q| <= k.
class MultipoleCoefficients {
public:
    explicit MultipoleCoefficients(int k_max)
        : k_max_(k_max), values_(static_cast<std::size_t>(k_max + 1) * (k_max + 1)) {}

    [[nodiscard]] int k_max() const { return k_max_; }
    [[nodiscard]] Complex operator()(int k, int q) const { return values_[index(k, q)]; }
    Complex& operator()(int k, int q) { return values_[index(k, q)]; }

private:
    [[nodiscard]] static std::size_t index(int k, int q) {
        return static_cast<std::size_t>(k * k + k + q);
    }
    int k_max_;
    std::vector<Complex> values_;
};

MultipoleCoefficients multipole_decomposition(const AngularState& state);

/// Sampling nodes with quadrature weights for integrals over the sphere.
struct SphereGrid {
    std::vector<double> theta_nodes;
    std::vector<double> phi_nodes;
    RealMatrix weights;  ///< weights(i, j) for node (theta_i, phi_j); sums to 4 pi

    /// Gauss-Legendre in cos(theta) times the trapezoid rule in phi. Exact for
    /// band-limited functions of degree < min(2 n_theta, n_phi).
    static SphereGrid gauss_legendre(int n_theta, int n_phi);

    /// Evenly spaced theta in [0, pi] (endpoints included) and phi in [0, 2pi),
    /// for plotting. Weights are sin(theta) dtheta dphi rescaled to 4 pi.
    static SphereGrid uniform(int n_theta, int n_phi);
};

struct SphereMap {
    std::vector<double> theta_nodes;
    std::vector<double> phi_nodes;
    RealMatrix weights;
    RealMatrix values;             ///< values(i, j) = W(theta_i, phi_j)
    double max_imaginary = 0.0;    ///< largest |Im W| discarded

    /// sum_ij weights(i, j) * values(i, j)
    [[nodiscard]] double integral() const;
    [[nodiscard]] double min_value() const { return values.minCoeff(); }
};

SphereMap wigner_map(const AngularState& state, const SphereGrid& grid);

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss-Legendre nodes (ascending) and weights on [-1, 1].
QuadratureRule gauss_legendre_rule(int n);

}  // namespace spinrsp
