#include "lowregret/evolution.hpp"

#include "doctest.h"

#include <memory>
#include <numbers>
#include <random>

using namespace lowregret;

namespace {

struct Setup {
    SpatialGrid grid;
    TimeGrid tgrid;
    std::shared_ptr<const FracOperator> op;
    EvolutionSolver solver;

    Setup(int n, int M, double s = 0.5, double T = 1.0)
        : grid(build_grid(-1.0, 1.0, n)),
          tgrid(build_time_grid(T, M)),
          op(std::make_shared<const FracOperator>(grid, s)),
          solver(op, tgrid) {}
};

class Draws {
public:
    explicit Draws(unsigned seed) : engine_(seed) {}
    double next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53 * 2.0 - 1.0; }
    SpatialField spatial(int n) {
        SpatialField out(n);
        for (int i = 0; i < n; ++i) out(i) = next();
        return out;
    }
    SpaceTimeField field(int M, int n) {
        SpaceTimeField out = SpaceTimeField::Zero(M + 1, n);
        for (int m = 1; m <= M; ++m) {
            for (int i = 0; i < n; ++i) out(m, i) = next();
        }
        return out;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace

TEST_CASE("zero data gives a zero trajectory") {
    Setup s(20, 10);
    const SpaceTimeField zero = zero_spacetime(s.grid, s.tgrid);
    CHECK(s.solver.forward(zero, zero_spatial(s.grid)).norm() == 0.0);
    CHECK(s.solver.backward(zero, zero_spatial(s.grid)).norm() == 0.0);
}

TEST_CASE("stationary solution is reproduced") {
    Setup s(30, 15);
    SpatialField pbar(s.grid.n);
    for (int i = 0; i < s.grid.n; ++i) pbar(i) = std::cos(0.5 * std::numbers::pi * s.grid.nodes[i]);
    const SpatialField f = s.op->apply(pbar);
    SpaceTimeField source(s.tgrid.M + 1, s.grid.n);
    for (int m = 0; m <= s.tgrid.M; ++m) source.row(m) = f.transpose();
    const SpaceTimeField q = s.solver.forward(source, pbar);
    for (int m = 0; m <= s.tgrid.M; ++m) {
        CHECK((q.row(m).transpose() - pbar).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("homogeneous forward solve is contractive") {
    for (const double T : {0.03, 1.0, 10.0}) {
        Setup s(25, 30, 0.4, T);
        Draws d(7);
        const SpaceTimeField q = s.solver.forward_free(d.spatial(s.grid.n));
        for (int m = 0; m < s.tgrid.M; ++m) {
            CHECK(norm_omega(q.row(m + 1).transpose(), s.grid) <=
                  norm_omega(q.row(m).transpose(), s.grid));
        }
        CHECK(q.allFinite());
    }
}

TEST_CASE("backward solve is the time reversal of the forward solve") {
    Setup s(20, 12);
    Draws d(3);
    const SpatialField g = d.spatial(s.grid.n);
    // Backward with terminal g and no source equals forward from g read backwards.
    const SpaceTimeField zero = zero_spacetime(s.grid, s.tgrid);
    const SpaceTimeField fwd = s.solver.forward_free(g);
    const SpaceTimeField bwd = s.solver.backward(zero, g);
    for (int m = 0; m <= s.tgrid.M; ++m) {
        CHECK((bwd.row(s.tgrid.M - m) - fwd.row(m)).cwiseAbs().maxCoeff() == 0.0);
    }

    // Source in the last slice only: decays backward from slice M-1.
    SpaceTimeField src = zero;
    src.row(s.tgrid.M) = g.transpose();
    const SpaceTimeField xi = s.solver.backward(src, zero_spatial(s.grid));
    CHECK(xi.row(s.tgrid.M).norm() == 0.0);
    for (int m = s.tgrid.M - 1; m > 0; --m) {
        CHECK(xi.row(m - 1).norm() < xi.row(m).norm());
    }
}

TEST_CASE("forward and backward maps are exact transposes") {
    Setup s(50, 40);
    Draws d(11);
    const SpatialField zero = zero_spatial(s.grid);
    for (int trial = 0; trial < 20; ++trial) {
        const SpaceTimeField w = d.field(s.tgrid.M, s.grid.n);
        const SpaceTimeField r = d.field(s.tgrid.M, s.grid.n);
        const SpaceTimeField sw = s.solver.forward(w, zero);
        const SpaceTimeField str = to_control_slots(s.solver.backward(r, zero));
        const double lhs = inner_product_Q(sw, r, s.grid, s.tgrid);
        const double rhs = inner_product_Q(w, str, s.grid, s.tgrid);
        const double scale = norm_Q(sw, s.grid, s.tgrid) * norm_Q(r, s.grid, s.tgrid);
        CHECK(std::abs(lhs - rhs) <= 1e-12 * scale);
    }
}

TEST_CASE("initial data map and its adjoint") {
    Setup s(40, 30);
    Draws d(5);
    for (int trial = 0; trial < 10; ++trial) {
        const SpatialField g = d.spatial(s.grid.n);
        const SpaceTimeField r = d.field(s.tgrid.M, s.grid.n);
        const SpaceTimeField z = s.solver.forward_free(g);
        const SpatialField xi0 = s.solver.backward(r, zero_spatial(s.grid)).row(0).transpose();
        const double lhs = inner_product_Q(z, r, s.grid, s.tgrid);
        const double rhs = inner_product_omega(g, xi0, s.grid);
        const double scale = norm_Q(z, s.grid, s.tgrid) * norm_Q(r, s.grid, s.tgrid);
        CHECK(std::abs(lhs - rhs) <= 1e-12 * scale);
    }
}

TEST_CASE("equation residuals vanish on solver output") {
    Setup s(30, 20, 0.7);
    Draws d(9);
    const SpaceTimeField src = d.field(s.tgrid.M, s.grid.n);
    const SpatialField g = d.spatial(s.grid.n);
    const SpaceTimeField q = s.solver.forward(src, g);
    const SpaceTimeField p = s.solver.backward(src, g);
    const double scale = norm_Q(src, s.grid, s.tgrid);
    CHECK(forward_equation_residual(*s.op, s.tgrid, q, src) <= 1e-12 * scale);
    CHECK(backward_equation_residual(*s.op, s.tgrid, p, src) <= 1e-12 * scale);
    // A wrong source is detected.
    CHECK(forward_equation_residual(*s.op, s.tgrid, q, 2.0 * src) > 1e-3 * scale);
}

TEST_CASE("problem structs and dimension checks") {
    Setup s(10, 5);
    ForwardProblem fp{s.op, s.tgrid, zero_spacetime(s.grid, s.tgrid), SpatialField::Ones(10)};
    CHECK(solve_forward(fp).row(0).sum() == doctest::Approx(10.0));
    BackwardProblem bp{s.op, s.tgrid, zero_spacetime(s.grid, s.tgrid), SpatialField::Ones(10)};
    CHECK(solve_backward(bp).row(s.tgrid.M).sum() == doctest::Approx(10.0));
    fp.initial = SpatialField::Ones(9);
    CHECK_THROWS_AS(solve_forward(fp), DomainError);
}

TEST_CASE("unconditional stability over a range of steps") {
    for (const int M : {10, 100, 1000}) {
        Setup s(30, M, 0.6, 1.0);
        Draws d(1);
        const SpaceTimeField q = s.solver.forward(d.field(M, 30), d.spatial(30));
        CHECK(q.allFinite());
        CHECK(q.cwiseAbs().maxCoeff() < 10.0);
    }
}
