#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ciblp/sim.hpp"
#include "ciblp/validate.hpp"

namespace py = pybind11;
using namespace ciblp;

namespace {

BlockProblem make_block(const MatrixXcd& h, const MatrixXcd& s, double p0,
                        const std::string& modulation) {
    BlockProblem block;
    block.H = h;
    block.S = s;
    block.p0 = p0;
    block.mod = Modulation::parse(modulation);
    return block;
}

py::dict result_dict(const PrecodeResult& res) {
    py::dict d;
    d["W"] = res.W;
    d["t_star"] = res.t_star;
    d["mu"] = res.mu;
    d["dual"] = res.dual;
    d["block_power"] = res.block_power;
    d["solve_seconds"] = res.solve_seconds;
    d["iterations"] = res.iterations;
    return d;
}

std::vector<char> to_sign_set(const std::vector<bool>& flags) {
    std::vector<char> out(flags.size());
    for (size_t i = 0; i < flags.size(); ++i) out[i] = flags[i] ? 1 : 0;
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "constructive-interference block-level precoding core";

    py::register_exception<CiError>(m, "CiError");

    m.def(
        "constellation",
        [](const std::string& name) { return Modulation::parse(name).points(); },
        py::arg("modulation"));

    m.def(
        "decompose",
        [](cplx s, const std::string& name) {
            const SymbolDecomposition d = decompose(s, Modulation::parse(name));
            return py::make_tuple(d.s_a, d.s_b);
        },
        py::arg("symbol"), py::arg("modulation"));

    m.def(
        "classify_qam",
        [](cplx s, int order) {
            const CiFlags f = classify_qam(s, order);
            return py::make_tuple(f.real_eligible, f.imag_eligible);
        },
        py::arg("symbol"), py::arg("order"));

    m.def(
        "project_partial_simplex",
        [](const VectorXd& v, const std::vector<bool>& sign_set) {
            return project_partial_simplex(v, to_sign_set(sign_set));
        },
        py::arg("v"), py::arg("sign_set"));

    m.def(
        "solve_simplex_qp",
        [](const MatrixXd& u, const std::vector<bool>& sign_set, double tol,
           int max_iter, const std::string& method) {
            QpProblem prob{u, to_sign_set(sign_set)};
            SolverConfig cfg;
            cfg.tol = tol;
            cfg.max_iter = max_iter;
            const QpSolution sol =
                method == "fw" ? solve_fw(prob, cfg) : solve_pg(prob, cfg);
            py::dict d;
            d["x"] = sol.x;
            d["objective"] = sol.objective;
            d["iterations"] = sol.iterations;
            d["residual"] = sol.pg_residual;
            return d;
        },
        py::arg("u"), py::arg("sign_set"), py::arg("tol") = 1e-8,
        py::arg("max_iter") = 0, py::arg("method") = "pg");

    m.def(
        "ci_blp",
        [](const MatrixXcd& h, const MatrixXcd& s, double p0,
           const std::string& modulation) {
            return result_dict(ci_blp(make_block(h, s, p0, modulation)));
        },
        py::arg("h"), py::arg("s"), py::arg("p0"), py::arg("modulation"));

    m.def(
        "ci_slp",
        [](const MatrixXcd& h, const VectorXcd& s, double p0,
           const std::string& modulation) {
            return result_dict(ci_slp(h, s, p0, Modulation::parse(modulation)));
        },
        py::arg("h"), py::arg("s"), py::arg("p0"), py::arg("modulation"));

    m.def(
        "zf",
        [](const MatrixXcd& h, const MatrixXcd& s, double p0) {
            const LinearPrecoder lp = zf(make_block(h, s, p0, "qpsk"));
            return py::make_tuple(lp.W, lp.scale);
        },
        py::arg("h"), py::arg("s"), py::arg("p0") = 1.0);

    m.def(
        "rzf",
        [](const MatrixXcd& h, const MatrixXcd& s, double rho, double p0) {
            const LinearPrecoder lp = rzf(make_block(h, s, p0, "qpsk"), rho);
            return py::make_tuple(lp.W, lp.scale);
        },
        py::arg("h"), py::arg("s"), py::arg("rho"), py::arg("p0") = 1.0);

    m.def(
        "kkt_residuals",
        [](const MatrixXcd& h, const MatrixXcd& s, double p0,
           const std::string& modulation) {
            const BlockProblem block = make_block(h, s, p0, modulation);
            const BlockGeometry geom = assemble_block(block);
            const DualQp qp = build_U(geom, block);
            const QpSolution dual = solve_pg(QpProblem::from_dual(qp));
            const PrecodeResult res = recover_precoder(dual.x, geom, qp, block);
            const KktReport rep = kkt_certificate(block, geom, qp, res);
            py::dict d;
            d["stationarity_rel"] = rep.stationarity_rel;
            d["primal_ineq_violation"] = rep.primal_ineq_violation;
            d["primal_eq_residual"] = rep.primal_eq_residual;
            d["comp_slack_max"] = rep.comp_slack_max;
            d["power_rel_error"] = rep.power_rel_error;
            return d;
        },
        py::arg("h"), py::arg("s"), py::arg("p0"), py::arg("modulation"));

    m.def(
        "ser_sweep",
        [](int k, int n_t, int n_block, const std::string& modulation,
           const std::vector<double>& snr_db, int n_channels, int n_blocks,
           const std::vector<std::string>& schemes, std::uint64_t seed,
           int threads) {
            SimConfig cfg;
            cfg.k = k;
            cfg.n_t = n_t;
            cfg.n_block = n_block;
            cfg.mod = Modulation::parse(modulation);
            cfg.snr_db = snr_db;
            cfg.n_channels = n_channels;
            cfg.n_blocks_per_channel = n_blocks;
            cfg.schemes.clear();
            for (const std::string& s : schemes)
                cfg.schemes.push_back(parse_precoder(s));
            cfg.seed = seed;
            cfg.threads = threads;
            py::list rows;
            for (const SerCell& c : run_ser_sweep(cfg)) {
                py::dict d;
                d["scheme"] = precoder_name(c.scheme);
                d["snr_db"] = c.snr_db;
                d["symbols"] = c.symbols;
                d["errors"] = c.errors;
                d["ser"] = c.ser;
                d["mean_solve_ms"] = c.mean_solve_ms;
                rows.append(d);
            }
            return rows;
        },
        py::arg("k"), py::arg("n_t"), py::arg("n_block"), py::arg("modulation"),
        py::arg("snr_db"), py::arg("n_channels"), py::arg("n_blocks"),
        py::arg("schemes"), py::arg("seed") = 1, py::arg("threads") = 1);
}
