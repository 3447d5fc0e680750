// Copyright 2026 The spinrsp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace spinrsp::detail {

inline constexpr std::size_t kLogFactorialTableSize = 4096;

/// ln(n!) for n >= 0. Tabulated once; values past the table fall back to
/// lgamma, which is fine for single-threaded tooling but not used on hot paths.
inline double log_factorial(int n) {
    static const auto table = [] {
        std::array<double, kLogFactorialTableSize> t{};
        for (std::size_t i = 0; i < t.size(); ++i) {
            t[i] = std::lgamma(static_cast<double>(i) + 1.0);
        }
        return t;
    }();
    if (static_cast<std::size_t>(n) < table.size()) {
        return table[static_cast<std::size_t>(n)];
    }
    return std::lgamma(static_cast<double>(n) + 1.0);
}

/// Extended-precision ln(n!) for alternating sums whose terms cancel deeply.
inline long double log_factorial_extended(int n) {
    static const auto table = [] {
        std::array<long double, kLogFactorialTableSize> t{};
        for (std::size_t i = 0; i < t.size(); ++i) {
            t[i] = std::lgamma(static_cast<long double>(i) + 1.0L);
        }
        return t;
    }();
    if (static_cast<std::size_t>(n) < table.size()) {
        return table[static_cast<std::size_t>(n)];
    }
    return std::lgamma(static_cast<long double>(n) + 1.0L);
}

/// Neumaier-compensated running sum.
template <typename T>
class CompensatedSum {
public:
    void add(T value) {
        const T t = sum_ + value;
        if (std::abs(sum_) >= std::abs(value)) {
            compensation_ += (sum_ - t) + value;
        } else {
            compensation_ += (value - t) + sum_;
        }
        sum_ = t;
    }
    [[nodiscard]] T value() const { return sum_ + compensation_; }

private:
    T sum_{};
    T compensation_{};
};

}  // namespace spinrsp::detail
