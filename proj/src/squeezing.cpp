// Copyright 2026 The spinrsp Authors
// SPDX-License-Identifier: Apache-2.0

#include "spinrsp/squeezing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "spinrsp/errors.hpp"

namespace spinrsp {

namespace {

constexpr double kScanStep = 1e-3;
constexpr double kRefineTolerance = 1e-7;

// Eigen-decomposes a real symmetric tridiagonal matrix with zero diagonal.
struct TridiagonalSpectrum {
    RealVector values;
    RealMatrix vectors;
};

TridiagonalSpectrum diagonalize(const RealVector& off_diagonal) {
    const auto dim = off_diagonal.size() + 1;
    const RealVector diag = RealVector::Zero(dim);
    Eigen::SelfAdjointEigenSolver<RealMatrix> solver;
    solver.computeFromTridiagonal(diag, off_diagonal, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("2A2S eigendecomposition failed for a " + std::to_string(dim) + "x" +
                             std::to_string(dim) + " tridiagonal matrix");
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

// exp(-i T tau) e_start given T = V diag(values) V^T.
ComplexVector propagate(const RealVector& values, const RealMatrix& vectors, Eigen::Index start,
                        double tau) {
    const auto dim = values.size();
    RealVector re(dim);
    RealVector im(dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
        re(j) = vectors(start, j) * std::cos(values(j) * tau);
        im(j) = -vectors(start, j) * std::sin(values(j) * tau);
    }
    ComplexVector out(dim);
    out.real() = vectors * re;
    out.imag() = vectors * im;
    return out;
}

ComplexVector frame_phases(int n_atoms) {
    ComplexVector phases(n_atoms + 1);
    for (int k = 0; k <= n_atoms; ++k) {
        phases(k) = std::polar(1.0, (2.0 * k - n_atoms) * std::numbers::pi / 4.0);
    }
    return phases;
}

void require_atoms(int n_atoms) {
    if (n_atoms < 1) {
        throw DomainError("n_atoms must be >= 1, got " + std::to_string(n_atoms));
    }
}

}  // namespace

DiagonalPairState::DiagonalPairState(int n_atoms, ComplexVector psi, PairFrame frame)
    : n_atoms_(n_atoms), psi_(std::move(psi)), frame_(frame) {
    if (psi_.size() != n_atoms_ + 1) {
        throw DomainError("pair amplitude vector has length " + std::to_string(psi_.size()) +
                          ", expected " + std::to_string(n_atoms_ + 1));
    }
    if (std::abs(psi_.squaredNorm() - 1.0) > 1e-12) {
        throw DomainError("pair state is not normalized (squared norm " +
                          std::to_string(psi_.squaredNorm()) + ")");
    }
}

RealMatrix build_2a2s_tridiagonal(int n_atoms) {
    require_atoms(n_atoms);
    RealMatrix h = RealMatrix::Zero(n_atoms + 1, n_atoms + 1);
    for (int k = 0; k < n_atoms; ++k) {
        const double coupling = static_cast<double>(n_atoms - k) * (k + 1);
        h(k + 1, k) = coupling;
        h(k, k + 1) = coupling;
    }
    return h;
}

PairEvolver::PairEvolver(int n_atoms) : n_atoms_(n_atoms) {
    require_atoms(n_atoms);
    RealVector off(n_atoms);
    for (int k = 0; k < n_atoms; ++k) off(k) = static_cast<double>(n_atoms - k) * (k + 1);
    auto spectrum = diagonalize(off);
    eigenvalues_ = std::move(spectrum.values);
    eigenvectors_ = std::move(spectrum.vectors);
}

DiagonalPairState PairEvolver::evolve(double tau) const {
    if (tau < 0.0) {
        throw DomainError("tau must be non-negative");
    }
    ComplexVector psi = propagate(eigenvalues_, eigenvectors_, n_atoms_, tau);
    psi /= psi.norm();
    return {n_atoms_, std::move(psi), PairFrame::kLab};
}

DiagonalPairState evolve_2a2s(int n_atoms, double tau) { return PairEvolver(n_atoms).evolve(tau); }

DiagonalPairState apply_frame_rotation(const DiagonalPairState& state) {
    ComplexVector psi = state.psi().cwiseProduct(frame_phases(state.n_atoms()));
    return {state.n_atoms(), std::move(psi), PairFrame::kRotated};
}

DiagonalPairState epr_minus(int n_atoms) {
    require_atoms(n_atoms);
    const double amp = 1.0 / std::sqrt(static_cast<double>(n_atoms + 1));
    ComplexVector psi(n_atoms + 1);
    for (int k = 0; k <= n_atoms; ++k) psi(k) = (k % 2 == 0) ? amp : -amp;
    return {n_atoms, std::move(psi), PairFrame::kEpr};
}

double fidelity(const DiagonalPairState& state, const DiagonalPairState& target) {
    if (state.n_atoms() != target.n_atoms()) {
        throw DomainError("fidelity between states with N = " + std::to_string(state.n_atoms()) +
                          " and N = " + std::to_string(target.n_atoms()));
    }
    return std::norm(target.psi().dot(state.psi()));
}

SqueezingRun make_squeezing_run(int n_atoms, double tau, bool frame_rotated) {
    auto state = evolve_2a2s(n_atoms, tau);
    if (frame_rotated) state = apply_frame_rotation(state);
    return {n_atoms, tau, std::move(state), frame_rotated};
}

namespace {

class FidelityCurve {
public:
    explicit FidelityCurve(int n_atoms)
        : evolver_(n_atoms), target_(epr_minus(n_atoms)) {}

    double operator()(double tau) const {
        return fidelity(apply_frame_rotation(evolver_.evolve(tau)), target_);
    }

private:
    PairEvolver evolver_;
    DiagonalPairState target_;
};

}  // namespace

std::vector<std::pair<double, double>> fidelity_scan(int n_atoms, double tau_max, double step) {
    if (!(step > 0.0) || tau_max < 0.0) {
        throw DomainError("fidelity scan needs step > 0 and tau_max >= 0");
    }
    const FidelityCurve curve(n_atoms);
    std::vector<std::pair<double, double>> samples;
    const auto count = static_cast<long>(std::floor(tau_max / step + 1e-9));
    samples.reserve(static_cast<std::size_t>(count) + 1);
    for (long i = 0; i <= count; ++i) {
        const double tau = static_cast<double>(i) * step;
        samples.emplace_back(tau, curve(tau));
    }
    return samples;
}

OptimalTime find_optimal_time(int n_atoms) {
    if (n_atoms < 2) {
        throw DomainError("optimal-time search needs n_atoms >= 2, got " + std::to_string(n_atoms));
    }
    const FidelityCurve curve(n_atoms);
    const double window = std::numbers::pi / 2.0;

    std::vector<double> taus;
    for (double tau = kScanStep; tau < window; tau += kScanStep) taus.push_back(tau);
    taus.push_back(window);

    std::size_t best = 0;
    double best_value = -1.0;
    double worst_value = 2.0;
    for (std::size_t i = 0; i < taus.size(); ++i) {
        const double f = curve(taus[i]);
        worst_value = std::min(worst_value, f);
        if (f > best_value) {
            best_value = f;
            best = i;
        }
    }
    if (best_value - worst_value < 1e-12) {
        throw SearchFailure("fidelity landscape is flat for N = " + std::to_string(n_atoms));
    }

    double lo = best == 0 ? taus.front() / 2.0 : taus[best - 1];
    double hi = best + 1 == taus.size() ? window : taus[best + 1];
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - ratio * (hi - lo);
    double d = lo + ratio * (hi - lo);
    double fc = curve(c);
    double fd = curve(d);
    while (hi - lo > kRefineTolerance) {
        if (fc > fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - ratio * (hi - lo);
            fc = curve(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + ratio * (hi - lo);
            fd = curve(d);
        }
    }
    const double tau = 0.5 * (lo + hi);
    const double f = curve(tau);
    if (f < best_value) return {taus[best], best_value};
    return {tau, f};
}

VarianceTriple pair_variances(const SqueezingRun& run) {
    if (!run.frame_rotated) {
        throw ContractError("pair variances are defined in the rotated frame; run is un-rotated");
    }
    const ComplexVector& psi = run.state.psi();
    const int n = run.n_atoms;
    // <Sx^2> = <Sy^2> = sum |psi_k|^2 [k(N-k+1) + (N-k)(k+1)] for each ensemble.
    double single = 0.0;
    Complex raise_both{0.0, 0.0};  // <S+_A S+_B>
    for (int k = 0; k <= n; ++k) {
        single += std::norm(psi(k)) * (static_cast<double>(k) * (n - k + 1) +
                                       static_cast<double>(n - k) * (k + 1));
        if (k < n) {
            raise_both += std::conj(psi(k + 1)) * psi(k) * (static_cast<double>(n - k) * (k + 1));
        }
    }
    // First moments vanish on the diagonal subspace, and Sz_A - Sz_B is identically zero there.
    // <Sx_A Sx_B> = 2 Re<S+S+>, <Sy_A Sy_B> = -2 Re<S+S+>.
    const double cross = 2.0 * raise_both.real();
    return {2.0 * single + 2.0 * cross, 2.0 * single + 2.0 * cross, 0.0};
}

OffsetPairState evolve_2a2s_offset(int n_a, int n_b, double tau, bool frame_rotated) {
    if (n_a < 0 || n_b < 0) {
        throw DomainError("atom numbers must be non-negative");
    }
    if (tau < 0.0) {
        throw DomainError("tau must be non-negative");
    }
    const int steps = std::min(n_a, n_b);
    ComplexVector amps;
    if (steps == 0) {
        amps = ComplexVector::Ones(1);
    } else {
        RealVector off(steps);
        for (int j = 0; j < steps; ++j) {
            const double ka = n_a - j;
            const double kb = n_b - j;
            off(j) = std::sqrt(ka * (n_a - ka + 1) * kb * (n_b - kb + 1));
        }
        const auto spectrum = diagonalize(off);
        amps = propagate(spectrum.values, spectrum.vectors, 0, tau);
        amps /= amps.norm();
    }
    if (frame_rotated) {
        for (int j = 0; j <= steps; ++j) {
            const int mz = (2 * (n_a - j) - n_a) + (2 * (n_b - j) - n_b);
            amps(j) *= std::polar(1.0, mz * std::numbers::pi / 8.0);
        }
    }
    return {n_a, n_b, std::move(amps)};
}

}  // namespace spinrsp
