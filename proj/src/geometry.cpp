#include "ciblp/geometry.hpp"

#include <cmath>

namespace ciblp {

MatrixXd expand_P(int nt) {
    MatrixXd p = MatrixXd::Zero(2 * nt, nt);
    p.topRows(nt).setIdentity();
    return p;
}

MatrixXd expand_Q(int nt) {
    MatrixXd q = MatrixXd::Zero(2 * nt, nt);
    q.bottomRows(nt).setIdentity();
    return q;
}

MatrixXd expand_T(int k) {
    MatrixXd t = MatrixXd::Zero(2 * k, 2 * k);
    t.topRightCorner(k, k).setIdentity();
    t.bottomLeftCorner(k, k) = -MatrixXd::Identity(k, k);
    return t;
}

VectorXd expand_symbols(const VectorXcd& s) {
    VectorXd e(2 * s.size());
    e.head(s.size()) = s.real();
    e.tail(s.size()) = s.imag();
    return e;
}

VectorXd rotate_expanded(const VectorXd& s_e) {
    const Eigen::Index k = s_e.size() / 2;
    VectorXd c(s_e.size());
    c.head(k) = s_e.tail(k);
    c.tail(k) = -s_e.head(k);
    return c;
}

UserRows build_M_rows(const VectorXcd& h, cplx s, const Modulation& mod) {
    const SymbolDecomposition dec = decompose(s, mod);
    const double den = dec.determinant();
    if (std::abs(den) < 1e-12)
        throw DegenerateDecomposition("M construction: decomposition determinant below 1e-12");

    const Eigen::Index nt = h.size();
    const VectorXd hr = h.real();
    const VectorXd hi = h.imag();
    const double ar = dec.s_a.real(), ai = dec.s_a.imag();
    const double br = dec.s_b.real(), bi = dec.s_b.imag();

    UserRows rows;
    rows.row_a.resize(2 * nt);
    rows.row_b.resize(2 * nt);
    rows.row_a.head(nt) = (bi * hr - br * hi) / den;
    rows.row_a.tail(nt) = -(bi * hi + br * hr) / den;
    rows.row_b.head(nt) = (ar * hi - ai * hr) / den;
    rows.row_b.tail(nt) = (ar * hr + ai * hi) / den;
    return rows;
}

SlotGeometry make_slot_geometry(const MatrixXcd& H, const VectorXcd& s,
                                const Modulation& mod) {
    const Eigen::Index k = H.rows();
    const Eigen::Index nt = H.cols();

    SlotGeometry slot;
    slot.M.resize(2 * k, 2 * nt);
    for (Eigen::Index u = 0; u < k; ++u) {
        const UserRows rows = build_M_rows(H.row(u).transpose(), s(u), mod);
        slot.M.row(u) = rows.row_a.transpose();
        slot.M.row(k + u) = rows.row_b.transpose();
    }
    slot.A = slot.M.leftCols(nt);
    slot.B = slot.M.rightCols(nt);
    slot.s_e = expand_symbols(s);
    slot.c_e = rotate_expanded(slot.s_e);
    return slot;
}

VectorXd scaling_coefficients(const SlotGeometry& slot, const MatrixXd& w_hat) {
    return slot.A * (w_hat * slot.s_e) + slot.B * (w_hat * slot.c_e);
}

}  // namespace ciblp
