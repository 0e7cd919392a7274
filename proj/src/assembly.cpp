#include "ciblp/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ciblp {

void BlockProblem::validate() const {
    if (H.rows() == 0 || H.cols() == 0) throw CiError("empty channel matrix");
    if (S.rows() != H.rows()) throw CiError("symbol block row count must equal K");
    if (S.cols() == 0) throw CiError("symbol block has no slots");
    if (H.rows() > H.cols()) throw CiError("model requires K <= N_T");
    if (!(p0 > 0.0)) throw CiError("power budget p0 must be positive");
}

bool DualQp::full_simplex() const {
    return std::all_of(sign_set.begin(), sign_set.end(), [](char c) { return c != 0; });
}

SlotGeometry build_slot_geometry(const BlockProblem& block, int n) {
    if (n < 0 || n >= block.num_slots()) throw CiError("slot index out of range");
    return make_slot_geometry(block.H, block.S.col(n), block.mod);
}

MatrixXd build_D(const std::vector<SlotGeometry>& slots) {
    if (slots.empty()) throw SingularD("no slots; D is empty");
    const Eigen::Index dim = slots.front().s_e.size();
    MatrixXd D = MatrixXd::Zero(dim, dim);
    for (const SlotGeometry& slot : slots) {
        D.noalias() += slot.s_e * slot.s_e.transpose();
        D.noalias() += slot.c_e * slot.c_e.transpose();
    }
    return D;
}

DFactor factor_D(const MatrixXd& D) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(D);
    if (es.info() != Eigen::Success) throw SingularD("eigendecomposition of D failed");
    const VectorXd& lam = es.eigenvalues();
    const double lmax = lam.maxCoeff();
    if (!(lmax > 0.0) || !std::isfinite(lmax))
        throw SingularD("D has no positive spectrum (degenerate symbol block)");

    const double cut = lmax * 1e-12;
    DFactor fac;
    double lmin_kept = lmax;
    VectorXd inv_lam = VectorXd::Zero(lam.size());
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        if (lam(i) > cut) {
            inv_lam(i) = 1.0 / lam(i);
            lmin_kept = std::min(lmin_kept, lam(i));
            ++fac.rank;
        }
    }
    fac.cond = lmax / lmin_kept;
    fac.rank_deficient = fac.rank < lam.size();
    fac.pinv = es.eigenvectors() * inv_lam.asDiagonal() * es.eigenvectors().transpose();
    return fac;
}

void build_coeffs(BlockGeometry& geom) {
    const int n = static_cast<int>(geom.slots.size());
    const Eigen::Index dim = geom.slots.front().s_e.size();
    MatrixXd se(dim, n), ce(dim, n);
    for (int i = 0; i < n; ++i) {
        se.col(i) = geom.slots[i].s_e;
        ce.col(i) = geom.slots[i].c_e;
    }
    const MatrixXd dinv_se = geom.dfac.pinv * se;
    const MatrixXd dinv_ce = geom.dfac.pinv * ce;
    geom.p = se.transpose() * dinv_se;  // p(m,n) = s_e^m' Dinv s_e^n = s_e^n' Dinv s_e^m
    geom.q = ce.transpose() * dinv_ce;
    geom.f = se.transpose() * dinv_ce;  // f(m,n) = s_e^m' Dinv c_e^n = c_e^n' Dinv s_e^m
    geom.g = geom.f.transpose();        // g(m,n) = s_e^n' Dinv c_e^m
}

BlockGeometry assemble_block(const BlockProblem& block) {
    block.validate();
    BlockGeometry geom;
    const int n = block.num_slots();
    geom.slots.reserve(n);
    for (int i = 0; i < n; ++i) geom.slots.push_back(build_slot_geometry(block, i));
    geom.D = build_D(geom.slots);
    geom.dfac = factor_D(geom.D);
    build_coeffs(geom);
    return geom;
}

std::vector<char> eligibility_flags(const BlockProblem& block, int n) {
    const int k = block.num_users();
    std::vector<char> flags(2 * k, 1);
    if (block.mod.kind == ModKind::Qam) {
        for (int u = 0; u < k; ++u) {
            const CiFlags f = classify_qam(block.S(u, n), block.mod.order);
            flags[u] = f.real_eligible ? 1 : 0;
            flags[k + u] = f.imag_eligible ? 1 : 0;
        }
    }
    return flags;
}

DualQp build_U(const BlockGeometry& geom, const BlockProblem& block) {
    const int n = static_cast<int>(geom.slots.size());
    const int two_k = static_cast<int>(geom.slots.front().s_e.size());

    DualQp qp;
    qp.n_slots = n;
    qp.p0 = block.p0;
    qp.U.resize(n * two_k, n * two_k);
    for (int m = 0; m < n; ++m) {
        const SlotGeometry& sm = geom.slots[m];
        for (int j = 0; j < n; ++j) {
            const SlotGeometry& sj = geom.slots[j];
            qp.U.block(m * two_k, j * two_k, two_k, two_k) =
                geom.p(m, j) * (sm.A * sj.A.transpose()) +
                geom.f(m, j) * (sm.A * sj.B.transpose()) +
                geom.g(m, j) * (sm.B * sj.A.transpose()) +
                geom.q(m, j) * (sm.B * sj.B.transpose());
        }
    }

    qp.sign_set.assign(n * two_k, 1);
    if (block.mod.kind == ModKind::Qam) {
        const int k = block.num_users();
        for (int slot = 0; slot < n; ++slot) {
            const std::vector<char> flags = eligibility_flags(block, slot);
            for (int c = 0; c < 2 * k; ++c)
                qp.sign_set[dual_index(slot, c, k)] = flags[c];
        }
    }
    return qp;
}

PowerForms build_F_G(const BlockGeometry& geom) {
    const int n = static_cast<int>(geom.slots.size());
    const int two_k = static_cast<int>(geom.slots.front().s_e.size());
    PowerForms out;
    out.F = MatrixXd::Zero(n * two_k, n * two_k);
    out.G = MatrixXd::Zero(n * two_k, n * two_k);
    const MatrixXd& p = geom.p;
    const MatrixXd& f = geom.f;
    const MatrixXd& g = geom.g;
    const MatrixXd& q = geom.q;
    for (int m = 0; m < n; ++m) {
        const SlotGeometry& sm = geom.slots[m];
        for (int j = 0; j < n; ++j) {
            const SlotGeometry& sj = geom.slots[j];
            const MatrixXd aa = sm.A * sj.A.transpose();
            const MatrixXd ab = sm.A * sj.B.transpose();
            const MatrixXd ba = sm.B * sj.A.transpose();
            const MatrixXd bb = sm.B * sj.B.transpose();
            double caa_f = 0, cab_f = 0, cba_f = 0, cbb_f = 0;
            double caa_g = 0, cab_g = 0, cba_g = 0, cbb_g = 0;
            for (int l = 0; l < n; ++l) {
                caa_f += p(l, j) * p(m, l);
                cab_f += f(l, j) * p(m, l);
                cba_f += p(l, j) * g(m, l);
                cbb_f += f(l, j) * g(m, l);
                caa_g += g(l, j) * f(m, l);
                cab_g += q(l, j) * f(m, l);
                cba_g += g(l, j) * q(m, l);
                cbb_g += q(l, j) * q(m, l);
            }
            out.F.block(m * two_k, j * two_k, two_k, two_k) =
                caa_f * aa + cab_f * ab + cba_f * ba + cbb_f * bb;
            out.G.block(m * two_k, j * two_k, two_k, two_k) =
                caa_g * aa + cab_g * ab + cba_g * ba + cbb_g * bb;
        }
    }
    return out;
}

PrecodeResult recover_precoder(const VectorXd& dual, const BlockGeometry& geom,
                               const DualQp& qp, const BlockProblem& block) {
    const int n = block.num_slots();
    const int k = block.num_users();
    const int nt = block.num_antennas();
    const int two_k = 2 * k;

    const double quad = dual.dot(qp.U * dual);
    if (!(quad > 1e-14))
        throw ZeroDual("dual vector carries no energy (delta' U delta <= 1e-14)");

    PrecodeResult res;
    res.mu = std::sqrt(quad / (4.0 * n * block.p0));
    res.dual = dual;

    MatrixXd rhs = MatrixXd::Zero(nt, two_k);
    for (int m = 0; m < n; ++m) {
        const SlotGeometry& slot = geom.slots[m];
        const VectorXd dm = dual.segment(m * two_k, two_k);
        rhs.noalias() += (slot.A.transpose() * dm) * slot.s_e.transpose();
        rhs.noalias() += (slot.B.transpose() * dm) * slot.c_e.transpose();
    }
    res.W_hat = (rhs * geom.dfac.pinv) / (2.0 * res.mu);
    res.W = res.W_hat.leftCols(k) - cplx(0.0, 1.0) * res.W_hat.rightCols(k);

    res.block_power = 0.0;
    for (int m = 0; m < n; ++m) res.block_power += (res.W * block.S.col(m)).squaredNorm();

    res.slot_min_alpha.resize(n);
    double tmin = std::numeric_limits<double>::infinity();
    bool any_eligible = false;
    for (int m = 0; m < n; ++m) {
        const VectorXd alpha = scaling_coefficients(geom.slots[m], res.W_hat);
        const std::vector<char> flags = eligibility_flags(block, m);
        double slot_min = std::numeric_limits<double>::infinity();
        for (int c = 0; c < two_k; ++c) {
            if (flags[c]) {
                slot_min = std::min(slot_min, alpha(c));
                any_eligible = true;
            }
        }
        if (!std::isfinite(slot_min)) slot_min = alpha.minCoeff();
        res.slot_min_alpha(m) = slot_min;
        tmin = std::min(tmin, slot_min);
    }
    // all-locked QAM blocks have no eligible index; fall back to the global min
    if (!any_eligible) {
        tmin = std::numeric_limits<double>::infinity();
        for (int m = 0; m < n; ++m) tmin = std::min(tmin, res.slot_min_alpha(m));
    }
    res.t_star = tmin;
    return res;
}

}  // namespace ciblp
