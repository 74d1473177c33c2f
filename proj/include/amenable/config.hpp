#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace amenable {

/// Numeric tolerances shared by every module.
struct Tolerances {
    double feasibility = 1e-9;
    double duality = 1e-8;
    double dedup = 1e-9;
    double pivot = 1e-10;
    double condition_limit = 1e12;
};

/// Problem-size caps for the dense solvers and enumerations.
struct Limits {
    std::size_t lp_variables = 2000;
    std::size_t lp_rows = 2000;
    std::size_t vertex_dimension = 12;
    std::size_t permutation_degree = 16;
    std::size_t symmetric_degree = 8;
    std::size_t skew_arguments = 6;
    std::size_t dense_dimension = 512;
};

inline constexpr Tolerances default_tolerances{};
inline constexpr Limits default_limits{};

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input (bad spec, dimension mismatch, non-invariant data).
class InputError : public Error {
public:
    using Error::Error;
};

/// A configured size cap was exceeded.
class LimitError : public Error {
public:
    using Error::Error;
};

/// A numerical routine could not produce a trustworthy answer.
class NumericError : public Error {
public:
    using Error::Error;
};

/// A requested certificate failed (e.g. tolerance not reached).
class VerificationError : public Error {
public:
    using Error::Error;
};

}  // namespace amenable
