// Copyright 2026 The spinrsp Authors
// SPDX-License-Identifier: Apache-2.0

#include "spinrsp/collective_spin.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>

#include "spinrsp/detail/log_factorial.hpp"
#include "spinrsp/errors.hpp"

namespace spinrsp {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_atoms(int n_atoms) {
    if (n_atoms < 1) {
        throw DomainError("n_atoms must be >= 1, got " + std::to_string(n_atoms));
    }
}

double reduce_angle(double angle) {
    double r = std::fmod(angle, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    if (r >= kTwoPi) r = 0.0;
    return r;
}

// cos^e(x) or sin^e(x) as (log|.|, sign); handles a zero base.
struct SignedLog {
    double log_abs;
    int sign;
    bool zero;
};

SignedLog signed_pow(double base, int exponent) {
    if (exponent == 0) return {0.0, 1, false};
    if (base == 0.0) return {0.0, 1, true};
    const int sign = (base < 0.0 && (exponent % 2 != 0)) ? -1 : 1;
    return {exponent * std::log(std::abs(base)), sign, false};
}

}  // namespace

double SpinVector::norm() const { return std::sqrt(x * x + y * y + z * z); }

double SpinVector::distance(const SpinVector& other) const {
    const double dx = x - other.x;
    const double dy = y - other.y;
    const double dz = z - other.z;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

EnsembleState::EnsembleState(int n_atoms, ComplexVector amplitudes, bool normalized)
    : n_atoms_(n_atoms), amplitudes_(std::move(amplitudes)), normalized_(normalized) {
    if (n_atoms_ < 0) {
        throw DomainError("n_atoms must be non-negative");
    }
    if (amplitudes_.size() != n_atoms_ + 1) {
        throw DomainError("amplitude vector has length " + std::to_string(amplitudes_.size()) +
                          ", expected " + std::to_string(n_atoms_ + 1));
    }
    if (normalized_ && std::abs(amplitudes_.squaredNorm() - 1.0) > 1e-12) {
        throw DomainError("state flagged normalized but has squared norm " +
                          std::to_string(amplitudes_.squaredNorm()));
    }
}

EnsembleState EnsembleState::fock(int n_atoms, int k) {
    if (n_atoms < 0 || k < 0 || k > n_atoms) {
        throw DomainError("Fock label " + std::to_string(k) + " outside [0, " +
                          std::to_string(n_atoms) + "]");
    }
    ComplexVector a = ComplexVector::Zero(n_atoms + 1);
    a(k) = 1.0;
    return {n_atoms, std::move(a), true};
}

EnsembleState EnsembleState::normalized_copy() const {
    const double n = norm();
    if (!(n > 0.0)) {
        throw DegenerateStateError("cannot normalize a zero-norm state");
    }
    return {n_atoms_, amplitudes_ / n, true};
}

SpinOperatorSet build_spin_operators(int n_atoms) {
    require_atoms(n_atoms);
    const int dim = n_atoms + 1;
    SpinOperatorSet ops;
    ops.n_atoms = n_atoms;
    ops.splus = ComplexMatrix::Zero(dim, dim);
    ops.sz = ComplexMatrix::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) {
        ops.sz(k, k) = static_cast<double>(2 * k - n_atoms);
        if (k < n_atoms) {
            ops.splus(k + 1, k) = std::sqrt(static_cast<double>(n_atoms - k) * (k + 1));
        }
    }
    ops.sminus = ops.splus.adjoint();
    const Complex i{0.0, 1.0};
    ops.sx = ops.splus + ops.sminus;
    ops.sy = -i * ops.splus + i * ops.sminus;
    return ops;
}

RotationSpec::RotationSpec(double theta, double phi) {
    double t = reduce_angle(theta);
    double p = phi;
    if (t > std::numbers::pi) {
        t = kTwoPi - t;
        p += std::numbers::pi;
    }
    theta_ = t;
    phi_ = reduce_angle(p);
}

RealMatrix rotation_d_matrix_closed_form(int n_atoms, double theta) {
    require_atoms(n_atoms);
    using detail::log_factorial;
    const int n = n_atoms;
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    RealMatrix d(n + 1, n + 1);

    for (int col = 0; col <= n; ++col) {
        const double log_col = log_factorial(col) + log_factorial(n - col);
        for (int row = 0; row <= n; ++row) {
            const double log_pref = 0.5 * (log_col + log_factorial(row) + log_factorial(n - row));
            // n_b counts b-quanta taken from the (cos a' - sin b') factor.
            const int lo = std::max(0, row - col);
            const int hi = std::min(row, n - col);
            detail::CompensatedSum<long double> sum;
            for (int nb = lo; nb <= hi; ++nb) {
                const SignedLog cp = signed_pow(c, row - col + n - 2 * nb);
                const SignedLog sp = signed_pow(s, 2 * nb + col - row);
                if (cp.zero || sp.zero) continue;
                const double log_term = log_pref - log_factorial(row - nb) -
                                        log_factorial(n - col - nb) - log_factorial(nb) -
                                        log_factorial(col - row + nb) + cp.log_abs + sp.log_abs;
                const int sign = ((nb % 2 == 0) ? 1 : -1) * cp.sign * sp.sign;
                sum.add(static_cast<long double>(sign) * std::exp(static_cast<long double>(log_term)));
            }
            d(row, col) = static_cast<double>(sum.value());
        }
    }
    return d;
}

namespace {

// Eigenvectors of the real tridiagonal Sx, cached per N.
std::shared_ptr<const RealMatrix> sx_eigenvectors(int n_atoms) {
    static std::mutex mutex;
    static std::map<int, std::shared_ptr<const RealMatrix>> cache;
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(n_atoms); it != cache.end()) return it->second;
    }
    RealVector diag = RealVector::Zero(n_atoms + 1);
    RealVector sub(n_atoms);
    for (int k = 0; k < n_atoms; ++k) {
        sub(k) = std::sqrt(static_cast<double>(n_atoms - k) * (k + 1));
    }
    Eigen::SelfAdjointEigenSolver<RealMatrix> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("Sx eigendecomposition failed for N = " + std::to_string(n_atoms));
    }
    auto vectors = std::make_shared<const RealMatrix>(solver.eigenvectors());
    std::lock_guard lock(mutex);
    return cache.emplace(n_atoms, std::move(vectors)).first->second;
}

}  // namespace

RealMatrix rotation_d_matrix(int n_atoms, double theta) {
    require_atoms(n_atoms);
    const int dim = n_atoms + 1;
    const auto vectors_ptr = sx_eigenvectors(n_atoms);
    const RealMatrix& v = *vectors_ptr;

    // Sy = P Sx P^dagger with P = diag((-i)^k), so
    // d[r][c] = i^(c-r) sum_j v[r][j] v[c][j] exp(-i lambda_j theta/2),
    // lambda_j = 2j - N (ascending, as returned by the solver).
    RealVector cos_part(dim);
    RealVector sin_part(dim);
    for (int j = 0; j < dim; ++j) {
        const double half_angle = (2.0 * j - n_atoms) * theta / 2.0;
        cos_part(j) = std::cos(half_angle);
        sin_part(j) = std::sin(half_angle);
    }
    const RealMatrix even = v * cos_part.asDiagonal() * v.transpose();
    const RealMatrix odd = v * sin_part.asDiagonal() * v.transpose();

    RealMatrix d(dim, dim);
    for (int c = 0; c < dim; ++c) {
        for (int r = 0; r < dim; ++r) {
            const int shift = c - r;
            if (shift % 2 == 0) {
                // i^shift = (-1)^(shift/2); the sine part is purely imaginary and drops.
                d(r, c) = ((shift / 2) % 2 == 0 ? 1.0 : -1.0) * even(r, c);
            } else {
                // i^shift * (-i) = (-1)^((shift-1)/2)
                const int half = (shift - 1) / 2;
                d(r, c) = ((half % 2 == 0) ? 1.0 : -1.0) * odd(r, c);
            }
        }
    }
    return d;
}

ComplexVector z_rotation_phases(int n_atoms, double angle) {
    ComplexVector phases(n_atoms + 1);
    for (int k = 0; k <= n_atoms; ++k) {
        phases(k) = std::polar(1.0, -(2.0 * k - n_atoms) * angle / 2.0);
    }
    return phases;
}

ComplexMatrix rotation_matrix(int n_atoms, const RotationSpec& spec) {
    const RealMatrix d = rotation_d_matrix(n_atoms, spec.theta());
    return z_rotation_phases(n_atoms, spec.phi()).asDiagonal() * d.cast<Complex>();
}

EnsembleState rotated_fock_state(int n_atoms, int k, const RotationSpec& spec) {
    require_atoms(n_atoms);
    if (k < 0 || k > n_atoms) {
        throw DomainError("Fock label " + std::to_string(k) + " outside [0, " +
                          std::to_string(n_atoms) + "]");
    }
    const RealMatrix d = rotation_d_matrix(n_atoms, spec.theta());
    ComplexVector column = z_rotation_phases(n_atoms, spec.phi()).cwiseProduct(d.col(k).cast<Complex>());
    // Unitarity leaves ~1e-15 drift; renormalize so the flag invariant holds exactly.
    column /= column.norm();
    return {n_atoms, std::move(column), true};
}

EnsembleState apply_operator(const EnsembleState& state, const ComplexMatrix& op, bool op_is_unitary) {
    const auto dim = state.amplitudes().size();
    if (op.rows() != dim || op.cols() != dim) {
        throw DomainError("operator is " + std::to_string(op.rows()) + "x" + std::to_string(op.cols()) +
                          " but state has dimension " + std::to_string(dim));
    }
    ComplexVector out = op * state.amplitudes();
    const bool normalized = op_is_unitary && state.normalized();
    if (normalized) out /= out.norm();
    return {state.n_atoms(), std::move(out), normalized};
}

SpinVector spin_expectations(const EnsembleState& state) {
    const ComplexVector& a = state.amplitudes();
    const double norm2 = a.squaredNorm();
    if (!(norm2 > 0.0)) {
        throw DegenerateStateError("spin expectations of a zero-norm state");
    }
    const int n = state.n_atoms();
    Complex raise{0.0, 0.0};  // <S+>
    double sz = 0.0;
    for (int k = 0; k <= n; ++k) {
        sz += (2.0 * k - n) * std::norm(a(k));
        if (k < n) {
            raise += std::conj(a(k + 1)) * a(k) * std::sqrt(static_cast<double>(n - k) * (k + 1));
        }
    }
    // Sx = S+ + S-, Sy = -i S+ + i S-  =>  <Sx> = 2 Re<S+>, <Sy> = 2 Im<S+>.
    return {2.0 * raise.real() / norm2, 2.0 * raise.imag() / norm2, sz / norm2};
}

}  // namespace spinrsp
