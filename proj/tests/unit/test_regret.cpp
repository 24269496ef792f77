#include "lowregret/oracle.hpp"
#include "lowregret/regret.hpp"
#include "support/problems.hpp"

#include "doctest.h"

#include <string>

using namespace lowregret;
using lowregret::testing::make_config;
using lowregret::testing::perfect_tracking_config;

TEST_CASE("config validation names the offending field") {
    RegretConfig c = make_config(10, 5, 1.0, 1.0);
    const auto message = [](RegretConfig cfg) -> std::string {
        try {
            cfg.validate();
        } catch (const DomainError& e) {
            return e.what();
        }
        return "";
    };
    RegretConfig bad = c;
    bad.gamma = 0.0;
    CHECK(message(bad).find("'gamma'") != std::string::npos);
    bad = c;
    bad.aleph = -1.0;
    CHECK(message(bad).find("'aleph'") != std::string::npos);
    bad = c;
    bad.s = 1.0;
    CHECK(message(bad).find("'s'") != std::string::npos);
    bad = c;
    bad.z_d = SpaceTimeField::Zero(3, 10);
    CHECK(message(bad).find("z_d") != std::string::npos);
    CHECK(message(c).empty());
    CHECK_THROWS_AS(RegretProblem{bad}, DomainError);
}

TEST_CASE("cost functional basics") {
    const RegretProblem tracked(perfect_tracking_config(20, 10, 1.0, 1.0));
    const SpaceTimeField v0 = zero_spacetime(tracked.grid(), tracked.tgrid());
    const SpatialField g0 = zero_spatial(tracked.grid());
    CHECK(eval_J(tracked, v0, g0) == 0.0);

    const RegretProblem p(make_config(20, 10, 1.0, 1.0, "gauss(0,0.3,1)", "zero"));
    CHECK(eval_J(p, v0, g0) > 0.0);
    CHECK(eval_J(p, v0, g0) == doctest::Approx(p.norm_Q(p.q00()) * p.norm_Q(p.q00())));

    // f = 0 and z_d = q(0,0) = 0: J is a pure quadratic in v.
    const RegretProblem quad(make_config(20, 10, 0.3, 1.0, "zero", "zero"));
    UniformSource rng(1);
    const SpaceTimeField v = rng.controls(quad.grid(), quad.tgrid());
    CHECK(eval_J(quad, 2.0 * v, g0) == doctest::Approx(4.0 * eval_J(quad, v, g0)).epsilon(1e-13));
}

TEST_CASE("relaxed cost") {
    const RegretProblem p(make_config(20, 10, 1.0, 10.0));
    UniformSource rng(2);
    const SpaceTimeField v = rng.controls(p.grid(), p.tgrid());
    const SpatialField g0 = zero_spatial(p.grid());
    CHECK(eval_J_gamma(p, v, g0) == eval_J(p, v, g0));
    const SpaceTimeField v0 = zero_spacetime(p.grid(), p.tgrid());
    CHECK(eval_J_gamma(p, v0, g0) == doctest::Approx(p.j_gamma_00()).epsilon(1e-15));

    // gamma ||g||^2 dominates the state contribution of g along a ray.
    const SpatialField g = rng.spatial(p.grid());
    const double j1 = eval_J_gamma(p, v0, g);
    const double j2 = eval_J_gamma(p, v0, 2.0 * g);
    const double j4 = eval_J_gamma(p, v0, 4.0 * g);
    CHECK(j2 < j1);
    CHECK(j4 < j2);
}

TEST_CASE("xi solution") {
    const RegretProblem p(make_config(12, 8, 1.0, 0.5));
    const SpaceTimeField v0 = zero_spacetime(p.grid(), p.tgrid());
    const XiSolution z = solve_xi(p, v0);
    CHECK(z.trajectory.norm() == 0.0);
    CHECK(z.initial_value.norm() == 0.0);

    UniformSource rng(3);
    const SpaceTimeField v = rng.controls(p.grid(), p.tgrid());
    const XiSolution xi = solve_xi(p, v);
    CHECK(xi.initial_value == SpatialField(xi.trajectory.row(0).transpose()));
    const XiSolution xi3 = solve_xi(p, -3.0 * v);
    CHECK((xi3.trajectory + 3.0 * xi.trajectory).cwiseAbs().maxCoeff() <=
          1e-14 * xi.trajectory.cwiseAbs().maxCoeff());

    // Dense composition of the explicit solver maps.
    const auto sys = oracle::dense_reduced_hessian(p);
    const Eigen::VectorXd dense = sys.R * (sys.S * oracle::flatten_controls(v));
    CHECK((dense - xi.initial_value).norm() <= 1e-12 * xi.initial_value.norm());
}

TEST_CASE("reduced functional") {
    const RegretProblem p(make_config(20, 12, 0.5, 0.1));
    const SpaceTimeField v0 = zero_spacetime(p.grid(), p.tgrid());
    CHECK(std::abs(eval_J_reduced(p, v0)) <= 1e-15 * p.j_gamma_00());

    UniformSource rng(4);
    for (int k = 0; k < 10; ++k) {
        const SpaceTimeField v = rng.controls(p.grid(), p.tgrid());
        CHECK(eval_J_reduced(p, v) >= -p.j_gamma_00());
        CHECK(eval_J_reduced(p, 0.01 * v) >= -p.j_gamma_00());
    }

    const RegretProblem big = p.with_gamma(1e6);
    const SpaceTimeField v = rng.controls(p.grid(), p.tgrid());
    const double limit = eval_J_gamma(big, v, zero_spatial(p.grid())) - big.j_gamma_00();
    CHECK(std::abs(eval_J_reduced(big, v) - limit) <= 1e-6 * std::abs(limit));
}

TEST_CASE("reduced functional is strongly convex with modulus aleph") {
    const RegretProblem p(make_config(16, 10, 0.7, 0.05));
    UniformSource rng(5);
    for (int k = 0; k < 10; ++k) {
        const SpaceTimeField v1 = rng.controls(p.grid(), p.tgrid());
        const SpaceTimeField v2 = rng.controls(p.grid(), p.tgrid());
        const double lambda = 0.5 * (rng.next() + 1.0);
        const double mixed = eval_J_reduced(p, lambda * v1 + (1.0 - lambda) * v2);
        const double j1 = eval_J_reduced(p, v1);
        const double j2 = eval_J_reduced(p, v2);
        const double d = p.norm_Q(v1 - v2);
        const double bound = lambda * j1 + (1.0 - lambda) * j2 -
                             p.aleph() * lambda * (1.0 - lambda) * d * d;
        CHECK(mixed <= bound + 1e-10 * (std::abs(j1) + std::abs(j2)));
    }
}

TEST_CASE("superposition of control and initial data") {
    const RegretProblem p(make_config(50, 40, 1.0, 1.0));
    UniformSource rng(6);
    for (int k = 0; k < 20; ++k) {
        const SpaceTimeField v = rng.controls(p.grid(), p.tgrid());
        const SpatialField g = rng.spatial(p.grid());
        CHECK(superposition_residual(p, v, g).relative() <= 1e-12);
    }
    const auto r0 = superposition_residual(p, zero_spacetime(p.grid(), p.tgrid()),
                                           rng.spatial(p.grid()));
    CHECK(r0.relative() <= 1e-15);
}

TEST_CASE("regret decomposition identity") {
    const RegretProblem p(make_config(40, 30, 1.0, 0.1));
    UniformSource rng(7);
    const SpaceTimeField v0 = zero_spacetime(p.grid(), p.tgrid());
    const SpatialField g0 = zero_spatial(p.grid());
    CHECK(decomposition_residual(p, v0, rng.spatial(p.grid())).relative() <= 1e-14);
    CHECK(decomposition_residual(p, rng.controls(p.grid(), p.tgrid()), g0).relative() <= 1e-14);
    for (int k = 0; k < 20; ++k) {
        const SpaceTimeField v = rng.controls(p.grid(), p.tgrid());
        const SpatialField g = rng.spatial(p.grid());
        CHECK(decomposition_residual(p, v, g).relative() <= 1e-11);
        CHECK(decomposition_residual(p, 2.0 * v, 3.0 * g).relative() <= 1e-11);
    }
}

TEST_CASE("initial data duality") {
    const RegretProblem p(make_config(40, 30, 1.0, 0.1));
    UniformSource rng(8);
    const SpaceTimeField v0 = zero_spacetime(p.grid(), p.tgrid());
    CHECK(duality_residual(p, v0, rng.spatial(p.grid())).value == 0.0);
    CHECK(duality_residual(p, rng.controls(p.grid(), p.tgrid()), zero_spatial(p.grid())).value ==
          0.0);
    for (int k = 0; k < 20; ++k) {
        const auto r = duality_residual(p, rng.controls(p.grid(), p.tgrid()), rng.spatial(p.grid()));
        CHECK(r.relative() <= 1e-11);
    }
}

TEST_CASE("Legendre-Fenchel reduction") {
    const RegretProblem p(make_config(30, 20, 1.0, 0.05));
    UniformSource rng(9);

    const SpaceTimeField v0 = zero_spacetime(p.grid(), p.tgrid());
    const auto trivial = fenchel_gap(p, v0, {zero_spatial(p.grid()), rng.spatial(p.grid())});
    CHECK(trivial.gap == 0.0);

    const SpaceTimeField v = rng.controls(p.grid(), p.tgrid());
    const SpatialField xi0 = solve_xi(p, v).initial_value;
    const auto at_max = fenchel_gap(p, v, {xi0 / p.gamma()});
    CHECK(std::abs(at_max.gap) <= 1e-12 * at_max.conjugate_value);
    CHECK(std::abs(at_max.maximizer_residual) <= 1e-12 * at_max.conjugate_value);

    std::vector<SpatialField> probes;
    for (int k = 0; k < 100; ++k) probes.push_back(rng.spatial(p.grid()));
    const auto random = fenchel_gap(p, v, probes);
    CHECK(random.gap >= -1e-12 * random.conjugate_value);
    CHECK(random.gap > 0.0);
    CHECK(random.best_probe < probes.size());

    CHECK_THROWS_AS(fenchel_gap(p, v, {}), DomainError);
}

TEST_CASE("with_gamma keeps cached data") {
    const RegretProblem p(make_config(10, 6, 1.0, 1.0));
    const RegretProblem q = p.with_gamma(1e-3);
    CHECK(q.gamma() == 1e-3);
    CHECK(&q.op() == &p.op());
    CHECK(q.q00() == p.q00());
    CHECK_THROWS_AS(p.with_gamma(0.0), DomainError);
}
