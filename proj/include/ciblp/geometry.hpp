#pragma once

#include <Eigen/Dense>

#include "ciblp/modulation.hpp"

namespace ciblp {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

// Fixed real-expansion operators. P stacks identity over zeros
// (2*nt x nt), Q zeros over identity, and T is the 2K x 2K rotation
// [[0, I], [-I, 0]] mapping s_E to c_E.
MatrixXd expand_P(int nt);
MatrixXd expand_Q(int nt);
MatrixXd expand_T(int k);

// s_E = [Re(s); Im(s)], c_E = T * s_E = [Im(s); -Re(s)].
VectorXd expand_symbols(const VectorXcd& s);
VectorXd rotate_expanded(const VectorXd& s_e);

// The two M rows for one user: row_a recovers alpha_a from
// [Re(W s); Im(W s)], row_b recovers alpha_b. Each has 2*nt entries.
struct UserRows {
    VectorXd row_a;
    VectorXd row_b;
};

UserRows build_M_rows(const VectorXcd& h, cplx s, const Modulation& mod);

// Everything the block assembly needs for one symbol slot.
struct SlotGeometry {
    MatrixXd M;    // 2K x 2NT
    MatrixXd A;    // 2K x NT   (= M * P, acts on Re(W s))
    MatrixXd B;    // 2K x NT   (= M * Q, acts on Im(W s))
    VectorXd s_e;  // 2K
    VectorXd c_e;  // 2K
};

// Rows of H are the users' channel vectors (the model is y_k = h_k^T W s).
SlotGeometry make_slot_geometry(const MatrixXcd& H, const VectorXcd& s,
                                const Modulation& mod);

// Scaling coefficients [alpha_a; alpha_b] stacked per user, computed
// through the real expansion (the M-path); equals the per-user 2x2
// solve applied to the complex received signals.
VectorXd scaling_coefficients(const SlotGeometry& slot, const MatrixXd& w_hat);

}  // namespace ciblp
