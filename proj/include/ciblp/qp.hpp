#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ciblp/assembly.hpp"

namespace ciblp {

// min x' U x  subject to  1' x = 1  and  x_m >= 0 for m in the sign set.
// PSK instances constrain every coordinate (a simplex); QAM leaves the
// equality-constraint multipliers free.
struct QpProblem {
    MatrixXd U;
    std::vector<char> sign_set;  // size n; nonzero = coordinate must be >= 0

    static QpProblem from_dual(const DualQp& qp) { return {qp.U, qp.sign_set}; }
    int dim() const { return static_cast<int>(U.rows()); }
};

struct SolverConfig {
    double tol = 1e-8;          // exit threshold on the fixed-point residual
    int max_iter = 0;           // 0 -> 50*n + 5000
    double step_scale = 1.0;    // multiplier on the 1/L gradient step
    bool accelerated = true;    // Nesterov momentum with monotone restarts
    bool polish = true;         // active-set refinement after PG converges
    std::uint64_t power_seed = 0x5eed5eedULL;  // power-iteration start vector
    std::optional<VectorXd> start;             // defaults to the uniform point
};

struct QpSolution {
    VectorXd x;
    double objective = 0.0;
    int iterations = 0;
    double pg_residual = 0.0;       // PG: fixed-point residual; FW: relative duality gap
    double max_objective_jump = 0.0;  // largest per-iteration objective increase seen
    bool polished = false;
};

// Raised when the iteration budget runs out; carries the best iterate.
struct MaxIterExceeded : CiError {
    QpSolution best;
    explicit MaxIterExceeded(QpSolution b)
        : CiError("QP solver hit the iteration budget (residual " +
                  std::to_string(b.pg_residual) + ")"),
          best(std::move(b)) {}
};

// Euclidean projection onto {x : 1'x = 1, x_m >= 0 for m in the sign set}.
// Theta is located by bisection to 1e-12 and then snapped to the exact
// root for the identified active set, so the returned point satisfies the
// sum constraint to machine precision.
VectorXd project_partial_simplex(const VectorXd& v, const std::vector<char>& sign_set);

QpSolution solve_pg(const QpProblem& problem, const SolverConfig& config = {});

// Pairwise Frank-Wolfe with exact line search; requires the full simplex.
// Stops on the Frank-Wolfe duality gap relative to the objective, which
// certifies the returned objective independently of solve_pg.
QpSolution solve_fw(const QpProblem& problem, const SolverConfig& config = {});

// Residual report for the primal/dual pair recovered from a CI-BLP solve.
// Pure measurement; thresholds are applied by the callers.
struct KktReport {
    double stationarity_rel = 0.0;   // gradient condition, relative Frobenius
    double dual_sign_violation = 0.0;   // most negative sign-set multiplier
    double dual_sum_error = 0.0;        // |1'delta - 1|
    double primal_ineq_violation = 0.0; // max over CI constraints of (t - alpha)+
    double primal_eq_residual = 0.0;    // QAM boundary-locked |t - alpha|, 0 for PSK
    double power_rel_error = 0.0;       // |block_power - N p0| / (N p0)
    double power_slack = 0.0;           // |mu * (block_power - N p0)|
    double comp_slack_max = 0.0;        // max |delta_k (t - alpha_k)| over the sign set

    double worst() const;
};

KktReport kkt_certificate(const BlockProblem& block, const BlockGeometry& geom,
                          const DualQp& qp, const PrecodeResult& result);

}  // namespace ciblp
