#include "ciblp/qp.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace ciblp {

namespace {

double phi_sum(const VectorXd& v, const std::vector<char>& sign_set, double theta) {
    double s = -1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double d = v(i) - theta;
        s += sign_set[static_cast<size_t>(i)] ? std::max(d, 0.0) : d;
    }
    return s;
}

// largest eigenvalue of 2U by power iteration, fixed seed; capped budget
// (the gradient step has a doubling backstop for rare underestimates)
double gradient_lipschitz(const MatrixXd& U, std::uint64_t seed) {
    const Eigen::Index n = U.rows();
    std::mt19937_64 rng(seed);
    VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i)
        v(i) = (static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0)) - 0.5;
    double nv = v.norm();
    if (nv == 0.0) v.setOnes(), nv = v.norm();
    v /= nv;

    double lam = 0.0;
    for (int it = 0; it < 64; ++it) {
        VectorXd w = 2.0 * (U * v);
        const double lam_new = w.norm();
        if (lam_new <= 0.0) return 0.0;
        v = w / lam_new;
        if (std::abs(lam_new - lam) <= 1e-6 * lam_new) return lam_new;
        lam = lam_new;
    }
    return lam;
}

// Exact equality-constrained solve on the free face: min x_F' U_FF x_F
// with 1' x_F = 1, x fixed to zero elsewhere. Returns x and the equality
// multiplier lambda via the KKT system (LU first, rank-revealing QR as
// the fallback for singular faces).
bool face_solve(const MatrixXd& U, const std::vector<int>& free_idx, VectorXd& x_out,
                double& lambda_out) {
    const int nf = static_cast<int>(free_idx.size());
    if (nf == 0) return false;
    MatrixXd kkt = MatrixXd::Zero(nf + 1, nf + 1);
    for (int a = 0; a < nf; ++a)
        for (int b = 0; b < nf; ++b) kkt(a, b) = 2.0 * U(free_idx[a], free_idx[b]);
    kkt.col(nf).head(nf).setOnes();
    kkt.row(nf).head(nf).setOnes();
    VectorXd rhs = VectorXd::Zero(nf + 1);
    rhs(nf) = 1.0;

    const double scale = std::max(1.0, kkt.cwiseAbs().maxCoeff());
    VectorXd sol = kkt.partialPivLu().solve(rhs);
    bool good = sol.allFinite() && (kkt * sol - rhs).norm() <= 1e-9 * scale &&
                sol.head(nf).cwiseAbs().maxCoeff() <= 1e8;
    if (!good) {
        // singular face: a tiny Tikhonov term makes the KKT system regular
        // and keeps the solution on the face with a bounded norm
        for (int a = 0; a < nf; ++a) kkt(a, a) += 1e-10 * scale;
        sol = kkt.partialPivLu().solve(rhs);
        good = sol.allFinite() && sol.head(nf).cwiseAbs().maxCoeff() <= 1e8;
        if (!good) return false;
    }
    x_out.setZero();
    for (int a = 0; a < nf; ++a) x_out(free_idx[a]) = sol(a);
    lambda_out = sol(nf);
    return true;
}

// Active-set refinement seeded by a PG iterate, NNLS-style: the iterate
// stays feasible throughout, each face solution is either accepted or
// approached by a line segment up to the first boundary crossing (so the
// objective never increases), and zero-clamped coordinates with negative
// reduced gradients are released in small batches. act_rel controls how
// much of the seed iterate opens the starting face (tight for early
// snaps, loose for a converged iterate). x_out always carries the best
// feasible point found, so a snap that runs out of rounds still hands
// the gradient loop a strictly better iterate.
struct PolishOutcome {
    bool settled = false;   // reached a KKT-consistent face exactly
    bool improved = false;  // x_out is feasible with a lower objective
};

PolishOutcome polish_solution(const QpProblem& problem, const VectorXd& x_seed,
                              double f_seed, VectorXd& x_out, double act_rel,
                              int max_rounds) {
    PolishOutcome out;
    const int n = problem.dim();
    const double xmax = x_seed.cwiseAbs().maxCoeff();
    const double act_tol = std::max(1e-12, act_rel * xmax);
    const double scale = std::max(1.0, problem.U.cwiseAbs().maxCoeff());

    std::vector<char> at_zero(n, 0);
    VectorXd x = x_seed;
    double free_mass = 0.0;
    for (int i = 0; i < n; ++i) {
        if (problem.sign_set[i] && x(i) <= act_tol) {
            at_zero[i] = 1;
            x(i) = 0.0;
        } else {
            free_mass += x(i);
        }
    }
    if (!(free_mass > 1e-9)) return out;
    for (int i = 0; i < n; ++i)
        if (!at_zero[i]) x(i) /= free_mass;  // restore 1'x = 1 on the open face

    auto finish = [&](bool settled) {
        const double f_cur = x.dot(problem.U * x);
        if (settled || f_cur < f_seed - 1e-14 * std::max(1.0, std::abs(f_seed))) {
            // clean off sub-1e-11 sign slips so the solution contract
            // (sum exactly one, sign set nonnegative) holds exactly
            x_out = project_partial_simplex(x, problem.sign_set);
            out.improved = true;
            out.settled = settled && f_cur <= f_seed + 1e-12 * std::max(1.0, std::abs(f_seed));
        }
        return out;
    };

    VectorXd z(n);
    double f_best = std::numeric_limits<double>::infinity();
    int stalled_releases = 0;
    for (int round = 0; round < max_rounds; ++round) {
        std::vector<int> free_idx;
        for (int i = 0; i < n; ++i)
            if (!at_zero[i]) free_idx.push_back(i);
        double lambda = 0.0;
        if (!face_solve(problem.U, free_idx, z, lambda)) return finish(false);

        // blocked: walk toward the face optimum until a coordinate hits zero
        double alpha = 1.0;
        for (int i : free_idx)
            if (problem.sign_set[i] && z(i) < -1e-13)
                alpha = std::min(alpha, x(i) / (x(i) - z(i)));
        if (alpha < 1.0) {
            const VectorXd x_saved = x;
            const double f_saved = x.dot(problem.U * x);
            if (alpha > 0.0)
                for (int i : free_idx) x(i) += alpha * (z(i) - x(i));
            if (x.dot(problem.U * x) >
                f_saved + 1e-9 * std::max(1.0, std::abs(f_saved))) {
                x = x_saved;  // z was not a face minimizer; keep what we have
                return finish(false);
            }
            bool clamped = false;
            for (int i : free_idx) {
                if (problem.sign_set[i] &&
                    (x(i) <= 1e-14 || (alpha == 0.0 && z(i) < -1e-13))) {
                    x(i) = 0.0;
                    at_zero[i] = 1;
                    clamped = true;
                }
            }
            if (!clamped) return finish(false);
            continue;
        }
        {
            const double f_x = x.dot(problem.U * x);
            const double f_z = z.dot(problem.U * z);
            if (f_z > f_x + 1e-9 * std::max(1.0, std::abs(f_x)))
                return finish(false);
        }
        for (int i : free_idx) x(i) = z(i);

        // release clamped coordinates whose reduced gradient is negative
        const VectorXd grad = 2.0 * (problem.U * x);
        const double release_tol = -1e-9 * scale;
        std::vector<std::pair<double, int>> violators;
        for (int i = 0; i < n; ++i) {
            if (!at_zero[i]) continue;
            const double v = grad(i) + lambda;
            if (v < release_tol) violators.emplace_back(v, i);
        }
        if (violators.empty()) return finish(true);
        std::sort(violators.begin(), violators.end());

        // violations too weak to matter are KKT-satisfied for our purposes;
        // the caller's fixed-point residual gate has the final word
        const double worst_violation = violators.front().first;
        if (worst_violation > -1e-7 * scale &&
            (stalled_releases > 2 || violators.size() < 2))
            return finish(true);

        const double f_cur = x.dot(problem.U * x);
        if (f_cur < f_best - 1e-14 * std::max(1.0, f_best)) {
            f_best = f_cur;
            stalled_releases = 0;
        } else if (++stalled_releases > 24) {
            return finish(worst_violation > -1e-7 * scale);
        }
        const size_t batch =
            stalled_releases > 2 ? 1 : std::min<size_t>(8, violators.size());
        for (size_t b = 0; b < batch; ++b) at_zero[violators[b].second] = 0;
    }
    return finish(false);
}

}  // namespace

VectorXd project_partial_simplex(const VectorXd& v, const std::vector<char>& sign_set) {
    const Eigen::Index n = v.size();
    if (static_cast<Eigen::Index>(sign_set.size()) != n)
        throw CiError("sign set size mismatch in projection");
    if (n == 1) return VectorXd::Ones(1);

    double lo = v.minCoeff() - 1.0;
    double hi = v.maxCoeff();
    // phi(lo) >= n - 1 > 0 and phi(hi) <= -1 < 0, so the root is bracketed
    for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
        const double mid = 0.5 * (lo + hi);
        (phi_sum(v, sign_set, mid) > 0.0 ? lo : hi) = mid;
    }
    const double theta_bisect = 0.5 * (lo + hi);

    // snap: exact root for the active set identified by the bisection
    std::vector<char> active(static_cast<size_t>(n), 0);
    for (int pass = 0; pass < static_cast<int>(n); ++pass) {
        double sum_free = 0.0;
        Eigen::Index n_free = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const bool act = sign_set[static_cast<size_t>(i)] &&
                             (active[static_cast<size_t>(i)] || v(i) - theta_bisect <= 0.0);
            active[static_cast<size_t>(i)] = act ? 1 : 0;
            if (!act) {
                sum_free += v(i);
                ++n_free;
            }
        }
        const double theta = (sum_free - 1.0) / static_cast<double>(n_free);
        bool clean = true;
        VectorXd x(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            if (active[static_cast<size_t>(i)]) {
                x(i) = 0.0;
            } else {
                x(i) = v(i) - theta;
                if (sign_set[static_cast<size_t>(i)] && x(i) < 0.0) {
                    active[static_cast<size_t>(i)] = 1;
                    clean = false;
                }
            }
        }
        if (clean) return x;
    }
    throw CiError("partial simplex projection failed to settle");
}

QpSolution solve_pg(const QpProblem& problem, const SolverConfig& config) {
    const int n = problem.dim();
    if (static_cast<int>(problem.sign_set.size()) != n)
        throw CiError("sign set size mismatch in solve_pg");

    QpSolution sol;
    VectorXd x = config.start ? project_partial_simplex(*config.start, problem.sign_set)
                              : VectorXd::Constant(n, 1.0 / n);

    const double umax = problem.U.cwiseAbs().maxCoeff();
    if (umax == 0.0) {
        sol.x = x;
        return sol;
    }

    double L = gradient_lipschitz(problem.U, config.power_seed) * 1.02;
    if (L <= 0.0) L = 2.0 * umax;
    const int max_iter = config.max_iter > 0 ? config.max_iter : 50 * n + 5000;

    auto objective = [&](const VectorXd& z) { return z.dot(problem.U * z); };

    auto residual_at = [&](const VectorXd& z, const VectorXd& gz) {
        return (z - project_partial_simplex(z - (config.step_scale / L) * gz,
                                            problem.sign_set))
            .norm();
    };

    VectorXd y = x;
    double fx = objective(x);
    double t_mom = 1.0;
    double residual = std::numeric_limits<double>::infinity();
    int it = 0;
    int next_polish = std::max(8, n / 8);
    for (; it < max_iter; ++it) {
        const double step = config.step_scale / L;
        VectorXd z = project_partial_simplex(y - step * 2.0 * (problem.U * y),
                                             problem.sign_set);
        double fz = objective(z);
        if (fz > fx) {
            // momentum overshoot: restart from the plain step at x
            z = project_partial_simplex(x - step * 2.0 * (problem.U * x),
                                        problem.sign_set);
            fz = objective(z);
            t_mom = 1.0;
            if (fz > fx + 1e-12 * std::max(1.0, std::abs(fx))) {
                // step still too long (Lipschitz estimate low); back off
                L *= 2.0;
                y = x;
                continue;
            }
        }
        sol.max_objective_jump = std::max(sol.max_objective_jump, fz - fx);

        const VectorXd gz = 2.0 * (problem.U * z);
        residual = (z - project_partial_simplex(z - step * gz, problem.sign_set)).norm();

        if (config.accelerated) {
            const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_mom * t_mom));
            y = z + ((t_mom - 1.0) / t_next) * (z - x);
            t_mom = t_next;
        } else {
            y = z;
        }
        x = z;
        fx = fz;
        if (residual <= config.tol) {
            ++it;
            break;
        }

        // periodic active-set snap: once the PG iterate has identified the
        // optimal face, the exact face solve finishes the job immediately;
        // an unsettled snap still hands back a strictly better iterate
        if (config.polish && it + 1 >= next_polish) {
            next_polish *= 2;
            VectorXd x_pol(n);
            const PolishOutcome outcome =
                polish_solution(problem, x, fx, x_pol, 1e-3, 150);
            if (outcome.settled) {
                const VectorXd gp = 2.0 * (problem.U * x_pol);
                const double r_pol = residual_at(x_pol, gp);
                if (r_pol <= config.tol) {
                    sol.x = x_pol;
                    sol.objective = x_pol.dot(problem.U * x_pol);
                    sol.iterations = it + 1;
                    sol.pg_residual = r_pol;
                    sol.polished = true;
                    return sol;
                }
            }
        }
    }

    sol.x = x;
    sol.objective = fx;
    sol.iterations = it;
    sol.pg_residual = residual;

    if (config.polish) {
        VectorXd x_pol(n);
        if (polish_solution(problem, sol.x, sol.objective, x_pol, 1e-9, 300).settled) {
            const double f_pol = x_pol.dot(problem.U * x_pol);
            const VectorXd gp = 2.0 * (problem.U * x_pol);
            const double r_pol = residual_at(x_pol, gp);
            if (r_pol <= sol.pg_residual) {
                sol.x = x_pol;
                sol.objective = f_pol;
                sol.pg_residual = r_pol;
                sol.polished = true;
            }
        }
    }

    if (sol.pg_residual > config.tol) throw MaxIterExceeded(sol);
    return sol;
}

QpSolution solve_fw(const QpProblem& problem, const SolverConfig& config) {
    const int n = problem.dim();
    for (char c : problem.sign_set)
        if (!c) throw NotSimplex("Frank-Wolfe needs the full simplex sign set");

    QpSolution sol;
    if (n == 1) {
        sol.x = VectorXd::Ones(1);
        sol.objective = problem.U(0, 0);
        return sol;
    }

    VectorXd x = config.start ? project_partial_simplex(*config.start, problem.sign_set)
                              : VectorXd::Constant(n, 1.0 / n);
    VectorXd g = 2.0 * (problem.U * x);
    double f = 0.5 * g.dot(x);

    const int max_iter = config.max_iter > 0 ? config.max_iter : 200 * n + 20000;
    double rel_gap = 0.0;
    int it = 0;
    for (; it < max_iter; ++it) {
        int s = 0, v = -1;
        for (int i = 1; i < n; ++i)
            if (g(i) < g(s)) s = i;
        for (int i = 0; i < n; ++i)
            if (x(i) > 0.0 && (v < 0 || g(i) > g(v))) v = i;

        const double gap = g.dot(x) - g(s);
        rel_gap = gap / std::max(std::abs(f), 1e-300);
        if (rel_gap <= config.tol || gap <= 0.0) break;

        // pairwise step: move mass from the worst active vertex to the best one
        const double gd = g(s) - g(v);
        const double dud = problem.U(s, s) - 2.0 * problem.U(s, v) + problem.U(v, v);
        double gamma = x(v);
        if (dud > 0.0) gamma = std::min(gamma, -gd / (2.0 * dud));
        if (gamma <= 0.0) break;

        const bool drop = gamma >= x(v);
        x(s) += gamma;
        x(v) -= gamma;
        if (drop) x(v) = 0.0;
        if ((it & 0xff) == 0xff) {
            g = 2.0 * (problem.U * x);  // periodic refresh against drift
        } else {
            g += 2.0 * gamma * (problem.U.col(s) - problem.U.col(v));
        }
        const double f_new = 0.5 * g.dot(x);
        sol.max_objective_jump = std::max(sol.max_objective_jump, f_new - f);
        f = f_new;
    }

    sol.x = x;
    sol.objective = x.dot(problem.U * x);
    sol.iterations = it;
    sol.pg_residual = rel_gap;
    if (it >= max_iter && rel_gap > config.tol) throw MaxIterExceeded(sol);
    return sol;
}

double KktReport::worst() const {
    return std::max({stationarity_rel, dual_sign_violation, dual_sum_error,
                     primal_ineq_violation, primal_eq_residual, power_rel_error,
                     comp_slack_max});
}

KktReport kkt_certificate(const BlockProblem& block, const BlockGeometry& geom,
                          const DualQp& qp, const PrecodeResult& result) {
    const int n = block.num_slots();
    const int two_k = 2 * block.num_users();

    KktReport rep;

    // stationarity of the Lagrangian in W_hat
    MatrixXd rhs = MatrixXd::Zero(block.num_antennas(), two_k);
    for (int m = 0; m < n; ++m) {
        const SlotGeometry& slot = geom.slots[m];
        const VectorXd dm = result.dual.segment(m * two_k, two_k);
        rhs.noalias() += (slot.A.transpose() * dm) * slot.s_e.transpose();
        rhs.noalias() += (slot.B.transpose() * dm) * slot.c_e.transpose();
    }
    const MatrixXd lhs = 2.0 * result.mu * result.W_hat * geom.D;
    const double scale = std::max({lhs.norm(), rhs.norm(), 1e-300});
    rep.stationarity_rel = (lhs - rhs).norm() / scale;

    // dual feasibility
    for (int i = 0; i < qp.dim(); ++i)
        if (qp.sign_set[i])
            rep.dual_sign_violation =
                std::max(rep.dual_sign_violation, -result.dual(i));
    rep.dual_sum_error = std::abs(result.dual.sum() - 1.0);

    // primal feasibility and complementary slackness at t = t_star
    for (int m = 0; m < n; ++m) {
        const VectorXd alpha = scaling_coefficients(geom.slots[m], result.W_hat);
        for (int c = 0; c < two_k; ++c) {
            const double gap = result.t_star - alpha(c);
            const int idx = m * two_k + c;
            if (qp.sign_set[idx]) {
                rep.primal_ineq_violation =
                    std::max(rep.primal_ineq_violation, gap);
                rep.comp_slack_max =
                    std::max(rep.comp_slack_max, std::abs(result.dual(idx) * gap));
            } else {
                rep.primal_eq_residual =
                    std::max(rep.primal_eq_residual, std::abs(gap));
            }
        }
    }
    rep.primal_ineq_violation = std::max(rep.primal_ineq_violation, 0.0);

    const double budget = n * block.p0;
    rep.power_rel_error = std::abs(result.block_power - budget) / budget;
    rep.power_slack = std::abs(result.mu * (result.block_power - budget));
    return rep;
}

}  // namespace ciblp
