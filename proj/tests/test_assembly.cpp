#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ciblp/assembly.hpp"
#include "ciblp/qp.hpp"
#include "ciblp/validate.hpp"

using namespace ciblp;

namespace {

BlockProblem golden_block() {
    BlockProblem block;
    block.H = MatrixXcd::Ones(1, 1);
    block.S = MatrixXcd::Constant(1, 1, cplx(1.0, 1.0) / std::sqrt(2.0));
    block.p0 = 1.0;
    block.mod = Modulation::psk(4);
    return block;
}

}  // namespace

TEST_CASE("golden slot geometry: A, B, c_e") {
    const BlockProblem block = golden_block();
    const SlotGeometry slot = build_slot_geometry(block, 0);
    CHECK(slot.A(0, 0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(slot.A(1, 0) == doctest::Approx(0.0));
    CHECK(slot.B(0, 0) == doctest::Approx(0.0));
    CHECK(slot.B(1, 0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(slot.c_e(0) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(slot.c_e(1) == doctest::Approx(-1.0 / std::sqrt(2.0)));

    // alpha for W = 1 through the assembled slot
    MatrixXd w_hat(1, 2);
    w_hat << 1.0, 0.0;
    const VectorXd alpha = scaling_coefficients(slot, w_hat);
    CHECK(alpha(0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(alpha(1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("golden D is the 2x2 identity and U is 2I") {
    const BlockProblem block = golden_block();
    const BlockGeometry geom = assemble_block(block);
    CHECK((geom.D - MatrixXd::Identity(2, 2)).norm() < 1e-14);
    CHECK(geom.dfac.rank == 2);
    CHECK(geom.p(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(geom.q(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(geom.f(0, 0) == doctest::Approx(0.0));
    CHECK(geom.g(0, 0) == doctest::Approx(0.0));

    const DualQp qp = build_U(geom, block);
    CHECK((qp.U - 2.0 * MatrixXd::Identity(2, 2)).norm() < 1e-14);
    CHECK(qp.full_simplex());

    const PowerForms pf = build_F_G(geom);
    CHECK((pf.F + pf.G - 2.0 * MatrixXd::Identity(2, 2)).norm() < 1e-14);
}

TEST_CASE("D symmetry and quadratic scaling in the symbols") {
    const BlockProblem block = random_instance(5, 1);
    const BlockGeometry geom = assemble_block(block);
    CHECK((geom.D - geom.D.transpose()).norm() == 0.0);

    BlockProblem scaled = block;
    scaled.S *= 3.0;
    const MatrixXd d2 = build_D(assemble_block(scaled).slots);
    CHECK((d2 - 9.0 * geom.D).norm() < 1e-12 * geom.D.norm() * 9.0);
}

TEST_CASE("coefficient matrices satisfy f = g^T and positive diagonals") {
    for (int i = 0; i < 8; ++i) {
        const BlockProblem block = random_instance(17, i);
        const BlockGeometry geom = assemble_block(block);
        CHECK((geom.f - geom.g.transpose()).norm() < 1e-12);
        for (int n = 0; n < block.num_slots(); ++n) {
            CHECK(geom.p(n, n) > 0.0);
            CHECK(geom.q(n, n) > 0.0);
        }
    }
}

TEST_CASE("U is symmetric PSD on random instances") {
    for (int i = 0; i < 12; ++i) {
        const BlockProblem block = random_instance(23, i);
        const BlockGeometry geom = assemble_block(block);
        const DualQp qp = build_U(geom, block);
        const double rel_asym =
            (qp.U - qp.U.transpose()).norm() / std::max(qp.U.norm(), 1e-300);
        CHECK(rel_asym < 1e-10);
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(qp.U);
        CHECK(es.eigenvalues().minCoeff() >= -1e-8 * es.eigenvalues().maxCoeff());
    }
}

TEST_CASE("proposition 1 on random instances at 1e-10") {
    double worst = 0.0;
    for (int i = 0; i < 40; ++i) {
        const BlockProblem block = random_instance(29, i);
        const BlockGeometry geom = assemble_block(block);
        const DualQp qp = build_U(geom, block);
        const PowerForms pf = build_F_G(geom);
        worst = std::max(worst, (pf.F + pf.G - qp.U).norm() / qp.U.norm());
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("proposition 1 still holds when D needs the pseudo-inverse") {
    // single-slot multi-user blocks make D structurally rank deficient
    for (int i = 0; i < 10; ++i) {
        BlockProblem block = random_instance(31, i);
        if (block.num_users() < 2) continue;
        block.S = block.S.leftCols(1).eval();
        const BlockGeometry geom = assemble_block(block);
        CHECK(geom.dfac.rank_deficient);
        CHECK(geom.dfac.rank == 2);
        const DualQp qp = build_U(geom, block);
        const PowerForms pf = build_F_G(geom);
        CHECK((pf.F + pf.G - qp.U).norm() / qp.U.norm() <= 1e-10);
    }
}

TEST_CASE("golden recovery: mu, W, t_star, block power") {
    const BlockProblem block = golden_block();
    const BlockGeometry geom = assemble_block(block);
    const DualQp qp = build_U(geom, block);
    VectorXd dual(2);
    dual << 0.5, 0.5;
    const PrecodeResult res = recover_precoder(dual, geom, qp, block);
    CHECK(res.mu == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(res.W_hat(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(res.W_hat(0, 1) == doctest::Approx(0.0));
    CHECK(std::abs(res.W(0, 0) - cplx(1.0, 0.0)) < 1e-12);
    CHECK(res.t_star == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(res.block_power == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("power budget scaling: p0 -> 4 p0 doubles W and t_star") {
    const BlockProblem block = random_instance(37, 2);
    const BlockGeometry geom = assemble_block(block);
    const DualQp qp = build_U(geom, block);
    const QpSolution dual = solve_pg(QpProblem::from_dual(qp));

    const PrecodeResult base = recover_precoder(dual.x, geom, qp, block);

    BlockProblem scaled = block;
    scaled.p0 = 4.0;
    DualQp qp4 = qp;
    qp4.p0 = 4.0;
    const PrecodeResult big = recover_precoder(dual.x, geom, qp4, scaled);
    CHECK((big.W - 2.0 * base.W).norm() < 1e-9 * base.W.norm());
    CHECK(big.t_star == doctest::Approx(2.0 * base.t_star).epsilon(1e-9));
    CHECK(big.block_power ==
          doctest::Approx(4.0 * base.block_power).epsilon(1e-9));
    CHECK((big.dual - base.dual).norm() == 0.0);
}

TEST_CASE("recover_precoder rejects a zero dual and never mutates its input") {
    const BlockProblem block = golden_block();
    const BlockGeometry geom = assemble_block(block);
    const DualQp qp = build_U(geom, block);
    const VectorXd zero = VectorXd::Zero(2);
    CHECK_THROWS_AS(recover_precoder(zero, geom, qp, block), ZeroDual);

    VectorXd dual(2);
    dual << 0.25, 0.75;
    const VectorXd copy = dual;
    (void)recover_precoder(dual, geom, qp, block);
    CHECK((dual - copy).norm() == 0.0);
}

TEST_CASE("block power equals N p0 for recovered precoders") {
    for (int i = 0; i < 10; ++i) {
        const BlockProblem block = random_instance(41, i);
        const BlockGeometry geom = assemble_block(block);
        const DualQp qp = build_U(geom, block);
        const QpSolution dual = solve_pg(QpProblem::from_dual(qp));
        const PrecodeResult res = recover_precoder(dual.x, geom, qp, block);
        const double budget = block.num_slots() * block.p0;
        CHECK(std::abs(res.block_power - budget) / budget < 1e-6);
    }
}

TEST_CASE("qam sign set marks exactly the CI-eligible components") {
    BlockProblem block;
    block.mod = Modulation::qam(16);
    block.H = MatrixXcd::Identity(2, 2);
    const double g = 1.0 / std::sqrt(10.0);
    block.S.resize(2, 1);
    block.S << cplx(3 * g, 3 * g), cplx(g, -3 * g);
    const BlockGeometry geom = assemble_block(block);
    const DualQp qp = build_U(geom, block);
    // user 0: type D (both), user 1: type C (imaginary only)
    CHECK(qp.sign_set[0] == 1);
    CHECK(qp.sign_set[1] == 0);
    CHECK(qp.sign_set[2] == 1);
    CHECK(qp.sign_set[3] == 1);
    CHECK_FALSE(qp.full_simplex());
}

TEST_CASE("zero-spectrum D raises SingularD") {
    std::vector<SlotGeometry> empty;
    CHECK_THROWS_AS(build_D(empty), SingularD);
    CHECK_THROWS_AS(factor_D(MatrixXd::Zero(2, 2)), SingularD);
}
