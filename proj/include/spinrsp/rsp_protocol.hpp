// Copyright 2026 The spinrsp Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file rsp_protocol.hpp
 * @brief Remote state preparation of Bloch angles (theta, phi) from Alice's
 *        ensemble onto Bob's.
 *
 * Given a shared pair state sum_k psi_k |k>_A|k>_B:
 *   1. Alice applies U(theta, pi - phi)^dagger = exp(i Sy theta/2) exp(i Sz (pi - phi)/2),
 *   2. measures her ensemble in the Fock basis with outcome k,
 *   3. sends one bit (k < N/2 or not),
 *   4. Bob applies exp(-i Sz pi/2) when k < N/2.
 *
 * With the spin-EPR resource Bob ends in |k>^(theta, phi) (or phi + pi for
 * k < N/2); the 2A2S resource approximates this.
 */

#pragma once

#include <optional>
#include <vector>

#include "spinrsp/collective_spin.hpp"
#include "spinrsp/squeezing.hpp"

namespace spinrsp {

/// Outcomes below this probability carry no conditional state.
inline constexpr double kZeroProbability = 1e-14;

/// Bob's pi z-rotation is applied strictly for k < N/2.
[[nodiscard]] constexpr bool needs_correction(int n_atoms, int k) { return 2 * k < n_atoms; }

struct ProtocolOutcome {
    int k = 0;
    double probability = 0.0;
    std::optional<EnsembleState> bob_state;  ///< empty for zero-probability outcomes
    SpinVector bob_spins;                    ///< zero when bob_state is empty
    bool correction_applied = false;

    [[nodiscard]] bool defined() const { return bob_state.has_value(); }
};

struct IdealOutcome {
    int k;
    EnsembleState bob_state;
    SpinVector bob_spins;
};

/// Runs the protocol for every outcome k = 0..N by applying the operator
/// sequence to the resource. A lab-frame 2A2S resource is rejected: rotate it
/// with apply_frame_rotation first.
std::vector<ProtocolOutcome> run_protocol(const DiagonalPairState& resource, const RotationSpec& spec);

/// P_k(theta) = sum_k' |psi_k'|^2 |<k| exp(i Sy theta/2) |k'>|^2; phi drops out.
RealVector outcome_probabilities(const DiagonalPairState& resource, double theta);

/// sum_k k P_k; DomainError unless the probabilities sum to 1 within 1e-8.
double mean_outcome(const RealVector& probabilities);

/// Bob's state and spins under the spin-EPR resource.
IdealOutcome ideal_outcome(int n_atoms, int k, const RotationSpec& spec);

/// E_k = |<S>_actual - <S>_ideal| / 2N, or nullopt for an undefined outcome.
std::optional<double> error_k(const ProtocolOutcome& outcome, const IdealOutcome& ideal, int n_atoms);

/// Per-outcome errors (nullopt where undefined), indexed by k.
std::vector<std::optional<double>> outcome_errors(const std::vector<ProtocolOutcome>& outcomes,
                                                  const RotationSpec& spec);

/// E-bar = sum_k P_k E_k over defined outcomes.
double average_error(const DiagonalPairState& resource, const RotationSpec& spec);
double average_error(const std::vector<ProtocolOutcome>& outcomes, const RotationSpec& spec);

struct PostSelectedError {
    double error;
    double keep_probability;
};

/// Keeps outcomes k <= k_cut or k >= N - k_cut and renormalizes. Requires
/// 0 <= k_cut < N/2; throws EmptyPostSelection if nothing survives.
PostSelectedError postselected_error(const DiagonalPairState& resource, const RotationSpec& spec,
                                     int k_cut);
PostSelectedError postselected_error(const std::vector<ProtocolOutcome>& outcomes,
                                     const RotationSpec& spec, int k_cut);

// ---------------------------------------------------------------------------
// Shot-to-shot atom-number fluctuations

enum class OutcomeRule {
    kExtremalHigh,  ///< k = N_A
    kExtremalLow,   ///< k = 0
    kFixed,         ///< k = fixed_k for every shot
};

struct FluctuationSpec {
    double mean_atoms = 0.0;
    double sigma0 = 1.0;
    double truncation = 4.0;  ///< half-width of the support in units of sigma0
    OutcomeRule rule = OutcomeRule::kExtremalHigh;
    int fixed_k = 0;
};

/// Gaussian weights p(N) on the truncated support, N >= 1, summing to 1.
struct AtomNumberWeights {
    std::vector<int> atoms;
    std::vector<double> weights;
};

AtomNumberWeights atom_number_weights(const FluctuationSpec& spec);

struct FluctuationResult {
    SpinVector spins;        ///< sum p(N_A)p(N_B) <S_B>/N_B over included terms
    int skipped_terms = 0;   ///< fixed k > N_A, or zero-probability outcome
    double included_weight = 0.0;
};

/// Precomputes the 2A2S states for every (N_A, N_B) pair in the support at a
/// common squeezing time, then evaluates Bob's normalized spin averages for
/// any rotation. The weighted sum is renormalized by the included weight.
class FluctuationEnsemble {
public:
    FluctuationEnsemble(const FluctuationSpec& spec, double tau);

    [[nodiscard]] const AtomNumberWeights& weights() const { return weights_; }
    [[nodiscard]] FluctuationResult spin_averages(const RotationSpec& spec) const;

private:
    FluctuationSpec spec_;
    AtomNumberWeights weights_;
    std::vector<OffsetPairState> pairs_;  // row-major over (N_A, N_B)
};

FluctuationResult fluctuating_spin_averages(const FluctuationSpec& fspec, const RotationSpec& spec,
                                            double tau);

}  // namespace spinrsp
