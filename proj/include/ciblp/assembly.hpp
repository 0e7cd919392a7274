#pragma once

#include <vector>

#include "ciblp/geometry.hpp"

namespace ciblp {

// One coherence-interval problem instance. Rows of H are channel vectors,
// columns of S are the per-slot symbol vectors, p0 is the per-slot power
// budget (the block budget is N*p0).
struct BlockProblem {
    MatrixXcd H;     // K x NT
    MatrixXcd S;     // K x N
    double p0 = 1.0;
    Modulation mod{ModKind::Psk, 4};

    int num_users() const { return static_cast<int>(H.rows()); }
    int num_antennas() const { return static_cast<int>(H.cols()); }
    int num_slots() const { return static_cast<int>(S.cols()); }

    void validate() const;
};

// Spectral factorization of D = sum_n (s_e s_e^T + c_e c_e^T). When D is
// full rank this is a plain inverse; when 2N < 2K the deficiency is
// structural and the Moore-Penrose pseudo-inverse is used instead (the
// whole dual chain stays exact because the stationarity right-hand side
// always lies in range(D)).
struct DFactor {
    MatrixXd pinv;
    int rank = 0;
    double cond = 0.0;  // lambda_max / lambda_min over the kept spectrum
    bool rank_deficient = false;
};

struct BlockGeometry {
    std::vector<SlotGeometry> slots;
    MatrixXd D;      // 2K x 2K
    DFactor dfac;
    MatrixXd p, f, g, q;  // N x N bilinear coefficient matrices
};

// Dual QP data: min x^T U x over {1^T x = 1, x_m >= 0 for m in sign set}.
struct DualQp {
    MatrixXd U;                    // 2NK x 2NK
    std::vector<char> sign_set;    // size 2NK; nonzero = sign-constrained
    int n_slots = 0;
    double p0 = 1.0;

    int dim() const { return static_cast<int>(U.rows()); }
    bool full_simplex() const;
};

struct PrecodeResult {
    MatrixXcd W;          // NT x K
    MatrixXd W_hat;       // NT x 2K, [Re(W), -Im(W)]
    double t_star = 0.0;  // minimum achieved scaling coefficient (CI-eligible indices)
    double mu = 0.0;
    VectorXd dual;        // the solved multiplier vector (2NK)
    double block_power = 0.0;
    VectorXd slot_min_alpha;  // per-slot minimum over CI-eligible indices

    // solve diagnostics, filled by the precoder front ends
    double solve_seconds = 0.0;
    int iterations = 0;
    double pg_residual = 0.0;
};

SlotGeometry build_slot_geometry(const BlockProblem& block, int n);

MatrixXd build_D(const std::vector<SlotGeometry>& slots);
DFactor factor_D(const MatrixXd& D);

BlockGeometry assemble_block(const BlockProblem& block);

// p_{m,n} = s_e^n' Dinv s_e^m, q analogous with c_e, f_{m,n} = c_e^n' Dinv s_e^m,
// g_{m,n} = s_e^n' Dinv c_e^m.
void build_coeffs(BlockGeometry& geom);

DualQp build_U(const BlockGeometry& geom, const BlockProblem& block);

// Diagnostic power-constraint matrices; F + G must equal U.
struct PowerForms {
    MatrixXd F;
    MatrixXd G;
};
PowerForms build_F_G(const BlockGeometry& geom);

// Flat dual index of component k (0-based, 0..2K-1) in slot n.
inline int dual_index(int n, int k, int num_users) { return 2 * n * num_users + k; }

// Per-slot CI eligibility flags (2K per slot, A-components first).
std::vector<char> eligibility_flags(const BlockProblem& block, int n);

PrecodeResult recover_precoder(const VectorXd& dual, const BlockGeometry& geom,
                               const DualQp& qp, const BlockProblem& block);

}  // namespace ciblp
