// Copyright (c) 2026, the prefkit authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace prefkit {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define PREFKIT_DEFINE_ERROR(Name)                                       \
    class Name : public Error {                                          \
    public:                                                              \
        explicit Name(const std::string& what) : Error(what) {}          \
    }

PREFKIT_DEFINE_ERROR(IoError);
PREFKIT_DEFINE_ERROR(ParseError);
PREFKIT_DEFINE_ERROR(DimensionMismatch);
PREFKIT_DEFINE_ERROR(ModalityMismatch);
PREFKIT_DEFINE_ERROR(ValidationError);
PREFKIT_DEFINE_ERROR(NonFiniteGradient);
PREFKIT_DEFINE_ERROR(NonFiniteLoss);
PREFKIT_DEFINE_ERROR(ListTooShort);
PREFKIT_DEFINE_ERROR(InvalidBlockSize);
PREFKIT_DEFINE_ERROR(SolverFailure);
PREFKIT_DEFINE_ERROR(EmptySubset);
PREFKIT_DEFINE_ERROR(SubsetTooLarge);
PREFKIT_DEFINE_ERROR(BudgetTooLarge);
PREFKIT_DEFINE_ERROR(EmptyCandidates);
PREFKIT_DEFINE_ERROR(AllTies);

#undef PREFKIT_DEFINE_ERROR

}  // namespace prefkit
