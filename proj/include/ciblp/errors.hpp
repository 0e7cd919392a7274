#pragma once

#include <stdexcept>
#include <string>

namespace ciblp {

// Base for everything this library throws on purpose.
struct CiError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Symbol decomposition directions are (numerically) collinear or zero.
struct DegenerateDecomposition : CiError {
    using CiError::CiError;
};

// Unsupported or inconsistent constellation parameters.
struct InvalidModulation : CiError {
    using CiError::CiError;
};

// D has no usable spectrum (zero or non-finite symbol block).
struct SingularD : CiError {
    using CiError::CiError;
};

// The dual vector carries no energy; the precoder scale is undefined.
struct ZeroDual : CiError {
    using CiError::CiError;
};

// Channel Gram matrix too ill-conditioned for a ZF inverse.
struct RankDeficientChannel : CiError {
    using CiError::CiError;
};

// Frank-Wolfe asked to run on a problem that is not a simplex QP.
struct NotSimplex : CiError {
    using CiError::CiError;
};

struct ConfigError : CiError {
    using CiError::CiError;
};

// Raised by the Monte Carlo harness when a scheme fails too often.
struct SolverFailureRate : CiError {
    using CiError::CiError;
};

}  // namespace ciblp
