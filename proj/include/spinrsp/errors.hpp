// Copyright 2026 The spinrsp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace spinrsp {

/// Argument outside the mathematical domain of an operation (bad N, bad k,
/// mismatched dimensions).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A state with zero norm was used where a normalized state is required.
class DegenerateStateError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Numerical routine failed (eigensolver, search, empty post-selection).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SearchFailure : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class EmptyPostSelection : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Caller violated a documented precondition that is not a plain domain
/// issue, e.g. asking for squeezed variances of an un-rotated run.
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace spinrsp
