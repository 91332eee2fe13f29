#include "orbita/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "orbita/error.hpp"

namespace orbita::solver {

using std::numbers::pi;

double KeplerSolution::semi_major_axis() const {
    return orbit.p / ((1.0 - orbit.e) * (1.0 + orbit.e));
}

KeplerSolution solve_kepler(const dynamics::CentralField& field, const dynamics::State2D& s0) {
    if (field.exponent != -2.0) {
        throw DomainError("kepler: the closed form needs an inverse-square field");
    }
    const double C = field.strength;
    const double r0 = norm(s0.pos);
    if (!(r0 > 0.0)) {
        throw DomainError("kepler: initial position at the centre of force");
    }
    const double speed = norm(s0.vel);
    const double k = cross(s0.pos, s0.vel);
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (!(std::abs(k) > 4.0 * eps * r0 * speed)) {
        throw DomainError("kepler: zero angular momentum, the motion is radial");
    }

    const double theta0 = polar_angle(s0.pos);
    const Vec2 offset = s0.vel - (C / k) * Vec2{-std::sin(theta0), std::cos(theta0)};
    const double offset_len = norm(offset);
    // 1/r = (C/k^2) (1 + (k |delta| / C) cos(theta - omega)),
    // with (|delta| cos omega, |delta| sin omega) = (delta_y, -delta_x).
    double omega = std::atan2(-offset.x, offset.y);
    double e_signed = k * offset_len / C;

    // An initial state at an apsis pins the axis exactly to theta0 or its opposite.
    if (std::abs(dot(s0.pos, s0.vel)) <= 4.0 * eps * r0 * speed && e_signed != 0.0) {
        const double d = geometry::wrap_angle(omega - theta0);
        omega = std::abs(d) < 0.5 * pi ? theta0 : theta0 + pi;
    }

    const geometry::Sense sense = k > 0.0 ? geometry::Sense::counterclockwise : geometry::Sense::clockwise;
    KeplerSolution sol;
    sol.strength = C;
    sol.k = k;
    sol.offset = offset;
    sol.energy = 0.5 * speed * speed - C / r0;
    if (C > 0.0) {
        sol.orbit = geometry::make_conic(k * k / C, e_signed, omega, sense);
    } else {
        // 1/r = (1/|p|) (-e_signed cos(theta - omega) - 1)
        sol.orbit = geometry::make_conic(k * k / -C, -e_signed, omega, sense, true);
    }
    if (sol.orbit.e == 0.0) {
        sol.orbit.omega = 0.0;
    }
    return sol;
}

geometry::ConicOrbit binet_solve(double h, double amplitude, double phase, geometry::Sense sense) {
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw DomainError("binet: the constant term h must be positive");
    }
    // A cos(theta + phase) + h = h (1 + (A/h) cos(theta - (-phase)))
    geometry::ConicOrbit orbit = geometry::make_conic(1.0 / h, amplitude / h, -phase, sense);
    if (orbit.e == 0.0) {
        orbit.omega = 0.0;
    }
    return orbit;
}

double orbit_period(const geometry::ConicOrbit& orbit, double strength) {
    if (orbit.repulsive || !(orbit.e < 1.0)) {
        throw DomainError("period: the orbit is not bound");
    }
    if (!(strength > 0.0)) {
        throw DomainError("period: field strength must be positive");
    }
    const double a = orbit.p / ((1.0 - orbit.e) * (1.0 + orbit.e));
    return 2.0 * pi * std::sqrt(a * a * a / strength);
}

Vec2 predict_position(const KeplerSolution& sol, double theta) {
    return sol.orbit.radius(theta) * unit_at(theta);
}

ClosureCheck compare_with_trajectory(const KeplerSolution& sol, const dynamics::Trajectory& traj) {
    ClosureCheck out;
    out.min_radius = std::numeric_limits<double>::infinity();
    for (const auto& s : traj.samples) {
        const double r = norm(s.pos);
        const double predicted = sol.orbit.radius(polar_angle(s.pos));
        out.max_radial_deviation = std::max(out.max_radial_deviation, std::abs(r - predicted));
        out.min_radius = std::min(out.min_radius, r);
        ++out.samples;
    }
    return out;
}

}  // namespace orbita::solver
