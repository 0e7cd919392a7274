#pragma once

#include <string>

#include "ciblp/qp.hpp"

namespace ciblp {

enum class PrecoderKind { CiBlp, CiSlp, Zf, Rzf };

std::string precoder_name(PrecoderKind kind);
PrecoderKind parse_precoder(const std::string& name);

// CI block-level precoder: assembles the dual QP, solves it with the
// projected-gradient solver, and recovers W in closed form. PSK uses the
// full simplex; QAM sign-constrains only the CI-eligible multipliers.
PrecodeResult ci_blp(const BlockProblem& block, const SolverConfig& config = {});

// Symbol-level precoding as the single-slot special case (same code path).
PrecodeResult ci_slp(const MatrixXcd& H, const VectorXcd& s, double p0,
                     const Modulation& mod, const SolverConfig& config = {});

// Block-normalized linear baselines. scale is the normalization divisor f,
// so the per-user noiseless gain a QAM receiver needs is 1/scale.
struct LinearPrecoder {
    MatrixXcd W;
    double scale = 1.0;
};

LinearPrecoder zf(const BlockProblem& block);
LinearPrecoder rzf(const BlockProblem& block, double rho);

}  // namespace ciblp
