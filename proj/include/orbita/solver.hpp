#ifndef ORBITA_SOLVER_HPP
#define ORBITA_SOLVER_HPP

#include <cstddef>

#include "orbita/dynamics.hpp"
#include "orbita/geometry.hpp"
#include "orbita/vec.hpp"

namespace orbita::solver {

/// Closed-form solution of motion under an inverse-square central field.
struct KeplerSolution {
    geometry::ConicOrbit orbit;
    double strength = 1.0;  ///< C of the field
    double k = 0.0;         ///< r^2 dtheta/dt
    Vec2 offset;            ///< constant part of the hodograph, v - (C/k)(-sin, cos)
    double energy = 0.0;    ///< v^2/2 - C/r

    /// Semi-major axis p / (1 - e^2); negative for hyperbolic orbits.
    double semi_major_axis() const;
};

/// Solves the Kepler problem for an arbitrary initial state.
///
/// The velocity is written as (C/k)(-sin theta, cos theta) + delta with a
/// constant delta, fixed by the initial state; the area law then gives the
/// conic with p = k^2/C, e = k |delta| / C. Repulsive fields (C < 0) give
/// the far branch of a hyperbola. Throws DomainError if k = 0 (radial
/// motion), the field is not inverse-square, or the position is the origin.
KeplerSolution solve_kepler(const dynamics::CentralField& field, const dynamics::State2D& s0);

/// Orbit from the general solution q = A cos(theta + phase) + h of
/// q'' + q = h. Throws DomainError if h <= 0.
geometry::ConicOrbit binet_solve(double h, double amplitude, double phase,
                                 geometry::Sense sense = geometry::Sense::counterclockwise);

/// Period 2 pi sqrt(a^3 / C) of a bound orbit. Throws DomainError for
/// unbound or repulsive orbits and for C <= 0.
double orbit_period(const geometry::ConicOrbit& orbit, double strength);

/// Position on the conic at polar angle theta. Throws DomainError outside
/// the admissible range of an open orbit.
Vec2 predict_position(const KeplerSolution& sol, double theta);

struct ClosureCheck {
    double max_radial_deviation = 0.0;  ///< max |r_sample - r_conic(theta_sample)|
    double min_radius = 0.0;            ///< smallest sampled radius
    std::size_t samples = 0;
};

/// Compares every trajectory sample with the conic at the sample's angle.
ClosureCheck compare_with_trajectory(const KeplerSolution& sol, const dynamics::Trajectory& traj);

}  // namespace orbita::solver

#endif  // ORBITA_SOLVER_HPP
