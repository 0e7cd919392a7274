#include "ciblp/precoders.hpp"

#include <chrono>
#include <cmath>

namespace ciblp {

std::string precoder_name(PrecoderKind kind) {
    switch (kind) {
        case PrecoderKind::CiBlp: return "ci-blp";
        case PrecoderKind::CiSlp: return "ci-slp";
        case PrecoderKind::Zf: return "zf";
        case PrecoderKind::Rzf: return "rzf";
    }
    return "?";
}

PrecoderKind parse_precoder(const std::string& name) {
    if (name == "ci-blp" || name == "ciblp") return PrecoderKind::CiBlp;
    if (name == "ci-slp" || name == "cislp") return PrecoderKind::CiSlp;
    if (name == "zf") return PrecoderKind::Zf;
    if (name == "rzf") return PrecoderKind::Rzf;
    throw ConfigError("unknown precoder scheme '" + name + "'");
}

PrecodeResult ci_blp(const BlockProblem& block, const SolverConfig& config) {
    const BlockGeometry geom = assemble_block(block);
    const DualQp qp = build_U(geom, block);

    const auto t0 = std::chrono::steady_clock::now();
    const QpSolution dual = solve_pg(QpProblem::from_dual(qp), config);
    const auto t1 = std::chrono::steady_clock::now();

    PrecodeResult res = recover_precoder(dual.x, geom, qp, block);
    res.solve_seconds = std::chrono::duration<double>(t1 - t0).count();
    res.iterations = dual.iterations;
    res.pg_residual = dual.pg_residual;
    return res;
}

PrecodeResult ci_slp(const MatrixXcd& H, const VectorXcd& s, double p0,
                     const Modulation& mod, const SolverConfig& config) {
    BlockProblem block;
    block.H = H;
    block.S = s;
    block.p0 = p0;
    block.mod = mod;
    return ci_blp(block, config);
}

namespace {

double block_scale(const MatrixXcd& W, const BlockProblem& block) {
    double power = 0.0;
    for (int n = 0; n < block.num_slots(); ++n)
        power += (W * block.S.col(n)).squaredNorm();
    return std::sqrt(power / (block.num_slots() * block.p0));
}

}  // namespace

LinearPrecoder zf(const BlockProblem& block) {
    block.validate();
    const MatrixXcd gram = block.H * block.H.adjoint();
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(gram);
    const double lmin = es.eigenvalues().minCoeff();
    const double lmax = es.eigenvalues().maxCoeff();
    if (!(lmin > 0.0) || lmax / lmin > 1e12)
        throw RankDeficientChannel("channel Gram condition number exceeds 1e12");

    LinearPrecoder out;
    out.W = block.H.adjoint() * gram.llt().solve(MatrixXcd::Identity(
                                     block.num_users(), block.num_users()));
    out.scale = block_scale(out.W, block);
    out.W /= out.scale;
    return out;
}

LinearPrecoder rzf(const BlockProblem& block, double rho) {
    block.validate();
    if (!(rho > 0.0)) throw CiError("RZF loading parameter rho must be positive");
    const int k = block.num_users();
    const MatrixXcd gram =
        block.H * block.H.adjoint() + (k / rho) * MatrixXcd::Identity(k, k);

    LinearPrecoder out;
    out.W = block.H.adjoint() * gram.llt().solve(MatrixXcd::Identity(k, k));
    out.scale = block_scale(out.W, block);
    out.W /= out.scale;
    return out;
}

}  // namespace ciblp
