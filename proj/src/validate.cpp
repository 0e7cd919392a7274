#include "ciblp/validate.hpp"

#include <algorithm>
#include <cmath>

namespace ciblp {

namespace {

Modulation cycle_mod(int index) {
    switch (index % 3) {
        case 0: return Modulation::psk(4);
        case 1: return Modulation::psk(8);
        default: return Modulation::qam(16);
    }
}

}  // namespace

BlockProblem random_instance(std::uint64_t seed, int index) {
    std::mt19937_64 rng = substream(seed, 0xbeef, static_cast<std::uint64_t>(index));
    const int k = 1 + static_cast<int>(rng() % 4);
    const int nt = k + static_cast<int>(rng() % static_cast<std::uint64_t>(7 - k));
    const int n = k + static_cast<int>(rng() % static_cast<std::uint64_t>(9 - k));

    BlockProblem block;
    block.mod = cycle_mod(index);
    block.H = gen_channel(k, nt, rng);
    block.S = draw_symbols(k, n, block.mod, rng).S;
    block.p0 = 1.0;
    return block;
}

std::vector<CheckResult> run_validation(std::uint64_t seed, int prop1_instances,
                                        int kkt_instances, int projection_cases,
                                        int solver_cases) {
    std::vector<CheckResult> results;

    // Proposition 1: F + G = U
    {
        CheckResult check{"proposition1_f_plus_g_equals_u", true, 0.0, 1e-10, ""};
        for (int i = 0; i < prop1_instances; ++i) {
            const BlockProblem block = random_instance(seed, i);
            const BlockGeometry geom = assemble_block(block);
            const DualQp qp = build_U(geom, block);
            const PowerForms pf = build_F_G(geom);
            const double rel = (pf.F + pf.G - qp.U).norm() / qp.U.norm();
            check.residual = std::max(check.residual, rel);
        }
        check.passed = check.residual <= check.threshold;
        check.detail = std::to_string(prop1_instances) + " random instances";
        results.push_back(check);
    }

    // golden single-user instance, full hand trace
    {
        CheckResult check{"golden_instance_trace", true, 0.0, 1e-8, ""};
        BlockProblem block;
        block.H = MatrixXcd::Ones(1, 1);
        block.S = MatrixXcd::Constant(1, 1, cplx(1.0, 1.0) / std::sqrt(2.0));
        block.p0 = 1.0;
        block.mod = Modulation::psk(4);
        const PrecodeResult res = ci_blp(block);
        double worst = std::abs(res.W(0, 0) - cplx(1.0, 0.0));
        worst = std::max(worst, std::abs(res.t_star - 1.0));
        worst = std::max(worst, std::abs(res.mu - 0.5));
        worst = std::max(worst, std::abs(res.dual(0) - 0.5));
        worst = std::max(worst, std::abs(res.dual(1) - 0.5));
        worst = std::max(worst, std::abs(res.block_power - 1.0));
        check.residual = worst;
        check.passed = worst <= check.threshold;
        results.push_back(check);
    }

    // KKT certification + power activeness over random CI-BLP solves
    {
        CheckResult kkt{"kkt_certificate", true, 0.0, 1e-6, ""};
        CheckResult power{"power_activeness", true, 0.0, 1e-6, ""};
        CheckResult primal{"primal_feasibility", true, 0.0, 1e-8, ""};
        for (int i = 0; i < kkt_instances; ++i) {
            const BlockProblem block = random_instance(seed + 1, i);
            const BlockGeometry geom = assemble_block(block);
            const DualQp qp = build_U(geom, block);
            const QpSolution dual = solve_pg(QpProblem::from_dual(qp));
            const PrecodeResult res = recover_precoder(dual.x, geom, qp, block);
            const KktReport rep = kkt_certificate(block, geom, qp, res);
            kkt.residual = std::max({kkt.residual, rep.stationarity_rel,
                                     rep.comp_slack_max, rep.dual_sign_violation});
            power.residual = std::max(power.residual, rep.power_rel_error);
            primal.residual = std::max({primal.residual, rep.primal_ineq_violation,
                                        rep.primal_eq_residual});
        }
        kkt.passed = kkt.residual <= kkt.threshold;
        power.passed = power.residual <= power.threshold;
        primal.passed = primal.residual <= primal.threshold;
        kkt.detail = power.detail = primal.detail =
            std::to_string(kkt_instances) + " CI-BLP solves";
        results.push_back(kkt);
        results.push_back(power);
        results.push_back(primal);
    }

    // projection correctness against sampled feasible points
    {
        CheckResult check{"projection_oracle", true, 0.0, 1e-9, ""};
        std::mt19937_64 rng = substream(seed, 0x9907, 0);
        for (int case_i = 0; case_i < projection_cases; ++case_i) {
            const int n = 2 + static_cast<int>(rng() % 30);
            VectorXd v(n);
            for (int i = 0; i < n; ++i) v(i) = 3.0 * gauss(rng);
            std::vector<char> sign(static_cast<size_t>(n));
            for (int i = 0; i < n; ++i) sign[static_cast<size_t>(i)] = rng() % 2 ? 1 : 0;
            if (case_i % 3 == 0) std::fill(sign.begin(), sign.end(), 1);

            const VectorXd x = project_partial_simplex(v, sign);
            double viol = std::abs(x.sum() - 1.0);
            for (int i = 0; i < n; ++i)
                if (sign[static_cast<size_t>(i)]) viol = std::max(viol, -x(i));
            check.residual = std::max(check.residual, viol);

            // independent feasible samples must never beat the projection
            const double dist = (x - v).norm();
            const int n_free = n - static_cast<int>(std::count(sign.begin(),
                                                               sign.end(), 1));
            for (int trial = 0; trial < 40; ++trial) {
                VectorXd y(n);
                for (int i = 0; i < n; ++i)
                    y(i) = sign[static_cast<size_t>(i)] ? std::abs(gauss(rng))
                                                        : gauss(rng);
                if (n_free > 0) {
                    const double shift = (1.0 - y.sum()) / n_free;
                    for (int i = 0; i < n; ++i)
                        if (!sign[static_cast<size_t>(i)]) y(i) += shift;
                } else {
                    const double total = y.sum();
                    if (!(total > 1e-9)) continue;
                    y /= total;
                }
                if ((y - v).norm() < dist - 1e-9) {
                    check.residual = std::max(check.residual, dist - (y - v).norm());
                }
            }
        }
        check.passed = check.residual <= check.threshold;
        check.detail = std::to_string(projection_cases) + " random projections";
        results.push_back(check);
    }

    // projected gradient vs Frank-Wolfe on full-simplex QPs
    {
        CheckResult check{"solver_cross_agreement", true, 0.0, 1e-6, ""};
        std::mt19937_64 rng = substream(seed, 0xf3a1, 0);
        for (int case_i = 0; case_i < solver_cases; ++case_i) {
            const int n = 2 + static_cast<int>(rng() % 63);
            MatrixXd r(n, n);
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) r(a, b) = gauss(rng);
            QpProblem prob{r * r.transpose() / n, std::vector<char>(n, 1)};
            const QpSolution pg = solve_pg(prob);
            const QpSolution fw = solve_fw(prob);
            const double rel = std::abs(pg.objective - fw.objective) /
                               std::max({pg.objective, fw.objective, 1e-300});
            check.residual = std::max(check.residual, rel);
        }
        check.passed = check.residual <= check.threshold;
        check.detail = std::to_string(solver_cases) + " full-simplex QPs (n <= 64)";
        results.push_back(check);
    }

    // N=1 reduction: block solve equals the symbol-level solve exactly
    {
        CheckResult check{"n1_reduction", true, 0.0, 1e-8, ""};
        for (int i = 0; i < 12; ++i) {
            BlockProblem block = random_instance(seed + 2, i);
            block.S = block.S.leftCols(1).eval();
            const PrecodeResult blp = ci_blp(block);
            const PrecodeResult slp =
                ci_slp(block.H, block.S.col(0), block.p0, block.mod);
            const double dw = (blp.W - slp.W).cwiseAbs().maxCoeff();
            const double dt = std::abs(blp.t_star - slp.t_star);
            check.residual = std::max({check.residual, dw, dt});
        }
        check.passed = check.residual <= check.threshold;
        check.detail = "12 single-slot instances";
        results.push_back(check);
    }

    return results;
}

}  // namespace ciblp
