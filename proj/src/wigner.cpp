// Copyright 2026 The spinrsp Authors
// SPDX-License-Identifier: Apache-2.0

#include "spinrsp/wigner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <string>

#include "spinrsp/detail/log_factorial.hpp"
#include "spinrsp/errors.hpp"
#include "spinrsp/parallel.hpp"

namespace spinrsp {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_even(int v) { return v % 2 == 0; }

// Valid (j, m) pair in doubled units.
bool valid_projection(int two_j, int two_m) {
    return two_j >= 0 && std::abs(two_m) <= two_j && is_even(two_j + two_m);
}

}  // namespace

double wigner_3j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt m1, HalfInt m2, HalfInt m3) {
    const int a1 = j1.twice, a2 = j2.twice, a3 = j3.twice;
    const int b1 = m1.twice, b2 = m2.twice, b3 = m3.twice;
    if (b1 + b2 + b3 != 0) return 0.0;
    if (!valid_projection(a1, b1) || !valid_projection(a2, b2) || !valid_projection(a3, b3)) return 0.0;
    if (!is_even(a1 + a2 + a3)) return 0.0;
    if (a3 > a1 + a2 || a3 < std::abs(a1 - a2)) return 0.0;

    const auto log_factorial = [](int n) { return detail::log_factorial_extended(n); };
    // All combinations below are integers once the checks above pass.
    const int j1pj2mj3 = (a1 + a2 - a3) / 2;
    const int j1mj2pj3 = (a1 - a2 + a3) / 2;
    const int mj1pj2pj3 = (-a1 + a2 + a3) / 2;
    const int perimeter = (a1 + a2 + a3) / 2;

    const long double log_triangle = log_factorial(j1pj2mj3) + log_factorial(j1mj2pj3) +
                                log_factorial(mj1pj2pj3) - log_factorial(perimeter + 1);
    const long double log_proj = log_factorial((a1 + b1) / 2) + log_factorial((a1 - b1) / 2) +
                            log_factorial((a2 + b2) / 2) + log_factorial((a2 - b2) / 2) +
                            log_factorial((a3 + b3) / 2) + log_factorial((a3 - b3) / 2);
    const long double log_prefactor = 0.5 * (log_triangle + log_proj);

    const int x1 = (a3 - a2 + b1) / 2;  // j3 - j2 + m1
    const int x2 = (a3 - a1 - b2) / 2;  // j3 - j1 - m2
    const int y1 = j1pj2mj3;
    const int y2 = (a1 - b1) / 2;  // j1 - m1
    const int y3 = (a2 + b2) / 2;  // j2 + m2
    const int t_min = std::max({0, -x1, -x2});
    const int t_max = std::min({y1, y2, y3});

    detail::CompensatedSum<long double> sum;
    for (int t = t_min; t <= t_max; ++t) {
        const long double log_den = log_factorial(t) + log_factorial(x1 + t) + log_factorial(x2 + t) +
                               log_factorial(y1 - t) + log_factorial(y2 - t) + log_factorial(y3 - t);
        const long double term = std::exp(log_prefactor - log_den);
        sum.add(is_even(t) ? term : -term);
    }
    const int phase_exp = (a1 - a2 - b3) / 2;  // j1 - j2 - m3
    const double value = static_cast<double>(sum.value());
    return is_even(phase_exp) ? value : -value;
}

LegendreTable::LegendreTable(int l_max, double theta)
    : values_(static_cast<std::size_t>(l_max + 1) * (l_max + 2) / 2) {
    const double x = std::cos(theta);
    const double s = std::sin(theta);
    double diagonal = std::sqrt(1.0 / (4.0 * kPi));  // Pbar_0^0
    for (int m = 0; m <= l_max; ++m) {
        if (m > 0) {
            // Pbar_m^m = -sqrt((2m+1)/(2m)) sin(theta) Pbar_{m-1}^{m-1}
            diagonal *= -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s;
        }
        values_[index(m, m)] = diagonal;
        if (m + 1 <= l_max) {
            values_[index(m + 1, m)] = x * std::sqrt(2.0 * m + 3.0) * diagonal;
        }
        for (int l = m + 2; l <= l_max; ++l) {
            const double a = std::sqrt((4.0 * l * l - 1.0) / (static_cast<double>(l) * l - static_cast<double>(m) * m));
            const double b = std::sqrt((static_cast<double>(l - 1) * (l - 1) - static_cast<double>(m) * m) /
                                       (4.0 * (l - 1) * (l - 1) - 1.0));
            values_[index(l, m)] = a * (x * values_[index(l - 1, m)] - b * values_[index(l - 2, m)]);
        }
    }
}

Complex spherical_harmonic(int k, int q, double theta, double phi) {
    if (k < 0 || std::abs(q) > k) {
        throw DomainError("spherical harmonic needs |q| <= k (k = " + std::to_string(k) + ", q = " +
                          std::to_string(q) + ")");
    }
    const int m = std::abs(q);
    const Complex positive = LegendreTable(k, theta)(k, m) * std::polar(1.0, m * phi);
    if (q >= 0) return positive;
    return (is_even(m) ? 1.0 : -1.0) * std::conj(positive);
}

AngularState::AngularState(int n_atoms, ComplexMatrix rho) : two_j_(n_atoms), rho_(std::move(rho)) {
    const int dim = n_atoms + 1;
    if (n_atoms < 0 || rho_.rows() != dim || rho_.cols() != dim) {
        throw DomainError("density matrix must be (N+1)x(N+1)");
    }
    if (std::abs(rho_.trace() - Complex{1.0, 0.0}) > 1e-12) {
        throw DomainError("density matrix trace is not 1");
    }
    if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > 1e-12) {
        throw DomainError("density matrix is not Hermitian");
    }
    const Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(rho_, Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -1e-10) {
        throw DomainError("density matrix has a negative eigenvalue");
    }
}

AngularState AngularState::from_pure(const EnsembleState& state) {
    const EnsembleState unit = state.normalized_copy();
    ComplexMatrix rho = unit.amplitudes() * unit.amplitudes().adjoint();
    // Enforce exact hermiticity against rounding in the outer product.
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return {state.n_atoms(), std::move(rho)};
}

MultipoleCoefficients multipole_decomposition(const AngularState& state) {
    const int two_j = state.two_j();
    const int k_max = two_j;
    const ComplexMatrix& rho = state.rho();
    const HalfInt j = HalfInt::half(two_j);
    MultipoleCoefficients coeffs(k_max);

    for (int k = 0; k <= k_max; ++k) {
        const double scale = std::sqrt(2.0 * k + 1.0);
        for (int q = -k; q <= k; ++q) {
            Complex total{0.0, 0.0};
            for (int row = 0; row <= two_j; ++row) {
                // m = row - j, m' = m - q from the 3j selection rule.
                const int col = row - q;
                if (col < 0 || col > two_j) continue;
                const int two_m = 2 * row - two_j;
                const int two_mp = 2 * col - two_j;
                const double sym = wigner_3j(j, HalfInt::whole(k), j, HalfInt::half(-two_m),
                                             HalfInt::whole(q), HalfInt::half(two_mp));
                if (sym == 0.0) continue;
                const double sign = is_even((two_j - two_m) / 2) ? 1.0 : -1.0;  // (-1)^(j-m)
                total += sign * scale * sym * rho(row, col);
            }
            coeffs(k, q) = total;
        }
    }
    return coeffs;
}

QuadratureRule gauss_legendre_rule(int n) {
    if (n < 1) throw DomainError("Gauss-Legendre rule needs at least one node");
    QuadratureRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Newton iteration from the Tricomi initial guess, largest root first.
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double derivative = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int l = 2; l <= n; ++l) {
                const double p2 = ((2.0 * l - 1.0) * x * p1 - (l - 1.0) * p0) / l;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0;
            const double pn = n == 1 ? x : p1;
            derivative = n * (x * pn - p0) / (x * x - 1.0);
            const double dx = pn / derivative;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        if (n == 1) {
            x = 0.0;
            derivative = 1.0;
        }
        const double w = 2.0 / ((1.0 - x * x) * derivative * derivative);
        const auto hi = static_cast<std::size_t>(n - 1 - i);
        const auto lo = static_cast<std::size_t>(i);
        rule.nodes[hi] = x;
        rule.nodes[lo] = -x;
        rule.weights[hi] = w;
        rule.weights[lo] = w;
    }
    return rule;
}

SphereGrid SphereGrid::gauss_legendre(int n_theta, int n_phi) {
    if (n_theta < 1 || n_phi < 1) throw DomainError("sphere grid needs positive resolution");
    const QuadratureRule rule = gauss_legendre_rule(n_theta);
    SphereGrid grid;
    grid.weights.resize(n_theta, n_phi);
    // Nodes ascend in cos(theta); list theta ascending instead.
    for (int i = 0; i < n_theta; ++i) {
        const auto src = static_cast<std::size_t>(n_theta - 1 - i);
        grid.theta_nodes.push_back(std::acos(rule.nodes[src]));
        for (int p = 0; p < n_phi; ++p) grid.weights(i, p) = rule.weights[src] * 2.0 * kPi / n_phi;
    }
    for (int p = 0; p < n_phi; ++p) grid.phi_nodes.push_back(2.0 * kPi * p / n_phi);
    return grid;
}

SphereGrid SphereGrid::uniform(int n_theta, int n_phi) {
    if (n_theta < 3 || n_phi < 1) {
        throw DomainError("uniform sphere grid needs n_theta >= 3 and n_phi >= 1");
    }
    SphereGrid grid;
    const double dtheta = kPi / (n_theta - 1);
    for (int i = 0; i < n_theta; ++i) grid.theta_nodes.push_back(i * dtheta);
    for (int p = 0; p < n_phi; ++p) grid.phi_nodes.push_back(2.0 * kPi * p / n_phi);
    grid.weights.resize(n_theta, n_phi);
    double total = 0.0;
    for (int i = 0; i < n_theta; ++i) {
        const double end_factor = (i == 0 || i == n_theta - 1) ? 0.5 : 1.0;
        for (int p = 0; p < n_phi; ++p) {
            grid.weights(i, p) = end_factor * std::sin(grid.theta_nodes[static_cast<std::size_t>(i)]);
            total += grid.weights(i, p);
        }
    }
    grid.weights *= 4.0 * kPi / total;
    return grid;
}

double SphereMap::integral() const { return weights.cwiseProduct(values).sum(); }

SphereMap wigner_map(const AngularState& state, const SphereGrid& grid) {
    const MultipoleCoefficients rho = multipole_decomposition(state);
    const int k_max = rho.k_max();
    const auto n_theta = grid.theta_nodes.size();
    const auto n_phi = grid.phi_nodes.size();

    SphereMap map;
    map.theta_nodes = grid.theta_nodes;
    map.phi_nodes = grid.phi_nodes;
    map.weights = grid.weights;
    map.values.resize(static_cast<Eigen::Index>(n_theta), static_cast<Eigen::Index>(n_phi));
    std::vector<double> row_imag(n_theta, 0.0);

    parallel_for(n_theta, [&](std::size_t i) {
        const LegendreTable legendre(k_max, grid.theta_nodes[i]);
        // f_q(theta) = sum_k rho_kq Pbar_k^|q|, with the (-1)^q of negative q folded in.
        std::vector<Complex> radial(static_cast<std::size_t>(2 * k_max + 1));
        for (int q = -k_max; q <= k_max; ++q) {
            const int m = std::abs(q);
            const double sign = (q < 0 && !is_even(m)) ? -1.0 : 1.0;
            Complex f{0.0, 0.0};
            for (int k = m; k <= k_max; ++k) f += rho(k, q) * legendre(k, m);
            radial[static_cast<std::size_t>(q + k_max)] = sign * f;
        }
        for (std::size_t p = 0; p < n_phi; ++p) {
            Complex w{0.0, 0.0};
            for (int q = -k_max; q <= k_max; ++q) {
                w += radial[static_cast<std::size_t>(q + k_max)] * std::polar(1.0, q * grid.phi_nodes[p]);
            }
            map.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(p)) = w.real();
            row_imag[i] = std::max(row_imag[i], std::abs(w.imag()));
        }
    });
    map.max_imaginary = *std::max_element(row_imag.begin(), row_imag.end());
    if (map.max_imaginary > 1e-8) {
        throw NumericalError("Wigner map has imaginary residue " + std::to_string(map.max_imaginary));
    }
    return map;
}

}  // namespace spinrsp
