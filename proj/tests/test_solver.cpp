#include "orbita/solver.hpp"

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "orbita/error.hpp"

namespace orbita::solver {
namespace {

using dynamics::make_field;
using dynamics::State2D;
using geometry::ConicKind;
using std::numbers::pi;
using testing::rel_err;
using testing::Rng;

const State2D kEllipseStart{{1, 0}, {0, 1.2}, 0};

TEST(SolveKepler, Circle) {
    const KeplerSolution sol = solve_kepler(make_field(1), {{1, 0}, {0, 1}, 0});
    EXPECT_NEAR(sol.orbit.e, 0.0, 1e-15);
    EXPECT_DOUBLE_EQ(sol.orbit.p, 1.0);
    EXPECT_EQ(sol.orbit.omega, 0.0);
    EXPECT_EQ(geometry::conic_classify(sol.orbit), ConicKind::circle);
}

TEST(SolveKepler, EccentricEllipse) {
    const KeplerSolution sol = solve_kepler(make_field(1), kEllipseStart);
    EXPECT_DOUBLE_EQ(sol.k, 1.2);
    EXPECT_NEAR(sol.offset.x, 0.0, 1e-15);
    EXPECT_NEAR(sol.offset.y, 1.2 - 1 / 1.2, 1e-15);
    EXPECT_NEAR(sol.orbit.e, 0.44, 1e-15);
    EXPECT_NEAR(sol.orbit.p, 1.44, 1e-15);
    EXPECT_EQ(sol.orbit.omega, 0.0);
    EXPECT_NEAR(sol.semi_major_axis(), 1.7857142857142858, 1e-14);
    EXPECT_LT(sol.energy, 0.0);

    // Perpendicular start: e = |r v^2 / C - 1|, a = 1 / (2/r - v^2/C).
    EXPECT_NEAR(sol.orbit.e, std::abs(1.44 - 1), 1e-15);
    const testing::VisViva vv = testing::vis_viva(1, kEllipseStart.pos, kEllipseStart.vel);
    EXPECT_NEAR(sol.orbit.e, vv.e, 1e-15);
    EXPECT_NEAR(sol.semi_major_axis(), vv.a, 1e-14);
}

TEST(SolveKepler, EscapeSpeedIsParabolic) {
    const KeplerSolution sol = solve_kepler(make_field(1), {{1, 0}, {0, std::sqrt(2.0)}, 0});
    EXPECT_EQ(geometry::conic_classify(sol.orbit), ConicKind::parabola);
    EXPECT_NEAR(sol.energy, 0.0, 1e-15);
}

TEST(SolveKepler, StartAtApoapsis) {
    const KeplerSolution sol = solve_kepler(make_field(1), {{0, 2}, {-0.5, 0}, 0});
    EXPECT_NEAR(sol.orbit.omega, -pi / 2, 1e-15);
    EXPECT_NEAR(sol.orbit.radius(pi / 2), 2.0, 1e-14);
}

TEST(SolveKepler, Rejects) {
    EXPECT_THROW(solve_kepler(make_field(1), {{1, 0}, {0.5, 0}, 0}), DomainError);
    EXPECT_THROW(solve_kepler(make_field(1), {{1, 0}, {0, 0}, 0}), DomainError);
    EXPECT_THROW(solve_kepler(make_field(1, -3), kEllipseStart), DomainError);
    EXPECT_THROW(solve_kepler(make_field(1), {{0, 0}, {0, 1}, 0}), DomainError);
}

TEST(SolveKepler, AgreesWithVisVivaOnRandomStates) {
    Rng rng(2026);
    for (int i = 0; i < 500; ++i) {
        const double C = rng.uniform(0.1, 10);
        const Vec2 pos{rng.uniform(-3, 3), rng.uniform(-3, 3)};
        const Vec2 vel{rng.uniform(-2, 2), rng.uniform(-2, 2)};
        if (norm(pos) < 0.1 || std::abs(cross(pos, vel)) < 1e-2) {
            continue;
        }
        const KeplerSolution sol = solve_kepler(make_field(C), {pos, vel, 0});
        const testing::VisViva vv = testing::vis_viva(C, pos, vel);
        EXPECT_NEAR(sol.orbit.e, vv.e, 1e-10 * (1 + vv.e));
        if (sol.orbit.e < 0.99) {
            EXPECT_LE(rel_err(sol.semi_major_axis(), vv.a), 1e-10);
        }
        if (sol.orbit.e > 1e-6) {
            EXPECT_NEAR(std::remainder(sol.orbit.omega - vv.periapsis_angle, 2 * pi), 0.0, 1e-8);
        }
        // The conic passes through the initial point, up to the conditioning
        // of 1 + e cos near an asymptote.
        const double theta0 = polar_angle(pos);
        const double cond = (1 + sol.orbit.e) / sol.orbit.denominator(theta0);
        EXPECT_LE(rel_err(sol.orbit.radius(theta0), norm(pos)), 1e-13 * cond);
        EXPECT_EQ(sol.orbit.sense == geometry::Sense::counterclockwise, cross(pos, vel) > 0);
    }
}

TEST(SolveKepler, RepulsiveFieldGivesFarHyperbolaBranch) {
    const dynamics::CentralField field = make_field(-1);
    const State2D s0{{2, -3}, {0, 1}, 0};
    const KeplerSolution sol = solve_kepler(field, s0);
    EXPECT_TRUE(sol.orbit.repulsive);
    EXPECT_GT(sol.orbit.e, 1.0);
    EXPECT_EQ(geometry::conic_classify(sol.orbit), ConicKind::hyperbola);
    EXPECT_LE(rel_err(sol.orbit.radius(polar_angle(s0.pos)), norm(s0.pos)), 1e-12);
    const dynamics::Trajectory traj = dynamics::integrate(field, s0, 10);
    const double r_min = sol.orbit.p / (sol.orbit.e - 1);
    const ClosureCheck check = compare_with_trajectory(sol, traj);
    EXPECT_GE(check.min_radius, r_min * (1 - 1e-12));
    EXPECT_LE(check.max_radial_deviation, 1e-8 * check.min_radius * 10);
    EXPECT_THROW(orbit_period(sol.orbit, 1.0), DomainError);
}

TEST(BinetSolve, Examples) {
    const geometry::ConicOrbit circle = binet_solve(1, 0, 0);
    EXPECT_EQ(circle.p, 1.0);
    EXPECT_EQ(circle.e, 0.0);
    const geometry::ConicOrbit ell = binet_solve(1, 0.5, 0);
    EXPECT_EQ(ell.e, 0.5);
    EXPECT_EQ(ell.p, 1.0);
    EXPECT_EQ(geometry::conic_classify(binet_solve(1, 1.5, 0)), ConicKind::hyperbola);
    EXPECT_EQ(binet_solve(1, 1.5, 0).e, 1.5);
}

TEST(BinetSolve, SolutionSatisfiesTheOde) {
    // q = A cos(theta + phase) + h solves q'' + q = h.
    const geometry::ConicOrbit orbit = binet_solve(0.8, -0.3, 0.4);
    const double step = 1e-3;
    for (double th = 0.1; th < 6; th += 0.7) {
        auto q = [&](double x) { return 1.0 / orbit.radius(x); };
        const double qdd = (q(th + step) - 2 * q(th) + q(th - step)) / (step * step);
        EXPECT_NEAR(qdd + q(th), 0.8, 1e-6);
        EXPECT_NEAR(q(th), -0.3 * std::cos(th + 0.4) + 0.8, 1e-14);
    }
}

TEST(BinetSolve, Rejects) {
    EXPECT_THROW(binet_solve(0, 1, 0), DomainError);
    EXPECT_THROW(binet_solve(-1, 1, 0), DomainError);
}

TEST(BinetSolve, AgreesWithSolveKepler) {
    Rng rng(5);
    for (int i = 0; i < 200; ++i) {
        const double C = rng.uniform(0.5, 5);
        const State2D s0{{rng.uniform(0.5, 2), rng.uniform(-1, 1)}, {rng.uniform(-0.5, 0.5), rng.uniform(0.5, 2)}, 0};
        const KeplerSolution sol = solve_kepler(make_field(C), s0);
        const double h = C / (sol.k * sol.k);
        const geometry::ConicOrbit b = binet_solve(h, sol.orbit.e * h, -sol.orbit.omega, sol.orbit.sense);
        EXPECT_LE(rel_err(b.p, sol.orbit.p), 1e-12);
        EXPECT_LE(std::abs(b.e - sol.orbit.e), 1e-12 * std::max(1.0, sol.orbit.e));
    }
}

TEST(OrbitPeriod, ThirdLawNormalisation) {
    const double C = 4 * pi * pi;
    EXPECT_NEAR(orbit_period(geometry::make_conic(1, 0, 0), C), 1.0, 1e-15);
    EXPECT_NEAR(orbit_period(geometry::make_conic(4 * (1 - 0.25), 0.5, 0), C), 8.0, 1e-14);
}

TEST(OrbitPeriod, MatchesNumericalReturn) {
    const KeplerSolution sol = solve_kepler(make_field(1), kEllipseStart);
    const double T = orbit_period(sol.orbit, 1);
    EXPECT_LE(rel_err(T, 14.993320610381375), 1e-14);
    const dynamics::PeriodEstimate est = dynamics::find_period(make_field(1), kEllipseStart, 30);
    EXPECT_TRUE(est.closed);
    EXPECT_LE(rel_err(est.period, T), 1e-10);
}

TEST(OrbitPeriod, Rejects) {
    EXPECT_THROW(orbit_period(geometry::make_conic(1, 1, 0), 1), DomainError);
    EXPECT_THROW(orbit_period(geometry::make_conic(1, 2, 0), 1), DomainError);
    EXPECT_THROW(orbit_period(geometry::make_conic(1, 0.5, 0), 0), DomainError);
}

TEST(PredictPosition, Examples) {
    const KeplerSolution circle = solve_kepler(make_field(1), {{1, 0}, {0, 1}, 0});
    for (double th : {0.0, 1.0, 3.0}) {
        EXPECT_NEAR(norm(predict_position(circle, th)), 1.0, 1e-14);
    }
    const KeplerSolution sol = solve_kepler(make_field(1), kEllipseStart);
    EXPECT_NEAR(norm(predict_position(sol, sol.orbit.omega)), 1.0, 1e-15);
    EXPECT_NEAR(norm(predict_position(sol, sol.orbit.omega + pi)), 2.5714285714285716, 1e-14);
    const Vec2 p = predict_position(sol, pi / 2);
    EXPECT_NEAR(p.x, 0.0, 1e-15);
    EXPECT_NEAR(p.y, 1.44, 1e-14);
}

TEST(PredictPosition, HyperbolaOutsideRangeThrows) {
    const KeplerSolution sol = solve_kepler(make_field(1), {{1, 0}, {0, 2}, 0});
    EXPECT_GT(sol.orbit.e, 1.0);
    EXPECT_NO_THROW(predict_position(sol, 0.5));
    EXPECT_THROW(predict_position(sol, pi), DomainError);
}

TEST(Closure, ReferenceOrbitOverOnePeriod) {
    const KeplerSolution sol = solve_kepler(make_field(1), kEllipseStart);
    const double T = orbit_period(sol.orbit, 1);
    dynamics::SimConfig cfg;
    cfg.output_interval = T / 2000;
    const dynamics::Trajectory traj = dynamics::integrate(make_field(1), kEllipseStart, T, cfg);
    const ClosureCheck check = compare_with_trajectory(sol, traj);
    EXPECT_EQ(check.samples, 2001u);
    EXPECT_LE(check.max_radial_deviation, 1e-6 * sol.semi_major_axis());
    EXPECT_NEAR(check.min_radius, 1.0, 1e-12);
}

TEST(Closure, RandomBoundOrbits) {
    Rng rng(77);
    int tested = 0;
    while (tested < 10) {
        const double C = rng.uniform(0.5, 5);
        const State2D s0{{rng.uniform(-2, 2), rng.uniform(-2, 2)}, {rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)}, 0};
        if (norm(s0.pos) < 0.3 || std::abs(cross(s0.pos, s0.vel)) < 0.2) {
            continue;
        }
        const KeplerSolution sol = solve_kepler(make_field(C), s0);
        if (sol.orbit.e > 0.9) {
            continue;
        }
        ++tested;
        const double T = orbit_period(sol.orbit, C);
        const dynamics::Trajectory traj = dynamics::integrate(make_field(C), s0, T);
        EXPECT_LE(compare_with_trajectory(sol, traj).max_radial_deviation, 1e-6 * sol.semi_major_axis());
        EXPECT_LE(norm(traj.samples.back().pos - s0.pos), 1e-7 * sol.semi_major_axis());
    }
}

}  // namespace
}  // namespace orbita::solver
