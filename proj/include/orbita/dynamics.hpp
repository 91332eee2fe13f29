#ifndef ORBITA_DYNAMICS_HPP
#define ORBITA_DYNAMICS_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "orbita/ode.hpp"
#include "orbita/vec.hpp"

namespace orbita::dynamics {

/// Power-law central acceleration of magnitude |C| r^n, pointing to the
/// origin when C > 0 and away from it when C < 0.
struct CentralField {
    double strength = 1.0;   ///< C
    double exponent = -2.0;  ///< n

    bool attractive() const { return strength > 0.0; }
};

/// Throws DomainError if C is zero or either parameter is not finite.
CentralField make_field(double strength, double exponent = -2.0);

/// Acceleration at `pos`. Throws DomainError at the origin.
Vec2 accelerate(const CentralField& field, const Vec2& pos);

/// Potential per unit mass whose negative gradient is accelerate().
double potential(const CentralField& field, double r);

struct State2D {
    Vec2 pos;
    Vec2 vel;
    double t = 0.0;
};

/// Twice the areal velocity: pos x vel = r^2 dtheta/dt.
inline double angular_momentum(const State2D& s) { return cross(s.pos, s.vel); }

/// Rate at which the radius vector sweeps area, (pos x vel) / 2.
inline double areal_velocity(const State2D& s) { return 0.5 * cross(s.pos, s.vel); }

double specific_energy(const CentralField& field, const State2D& s);

/// Integration settings shared by every simulation entry point.
struct SimConfig {
    ode::Method integrator = ode::Method::adaptive;
    double rel_tol = 1e-12;
    double abs_tol = 1e-14;
    double fixed_step = 1e-3;
    double output_interval = 0.0;  ///< 0 records every accepted step
    double r_min = 0.0;            ///< collision radius; 0 means 1e-8 x initial radius
    std::size_t max_steps = 10'000'000;
    std::uint64_t seed = 0;        ///< for randomised sweeps

    ode::Options ode_options() const;
    void validate() const;
};

inline constexpr double kDefaultCollisionFactor = 1e-8;

struct Trajectory {
    std::vector<State2D> samples;
    std::optional<CentralField> field;  ///< empty for non-central test fields
    SimConfig config;
    ode::Stats stats;

    std::size_t size() const { return samples.size(); }
    const State2D& operator[](std::size_t i) const { return samples[i]; }
};

using AccelerationField = std::function<Vec2(const Vec2&)>;

/// Central field plus a constant force; the sum is not central, which is
/// how the area law is shown to fail for non-central forces.
AccelerationField with_constant_force(const CentralField& field, const Vec2& force);

/// Integrates the motion in a central field for `duration`.
/// Throws IntegrationError on collision (|pos| < r_min) or step limit.
Trajectory integrate(const CentralField& field, const State2D& s0, double duration,
                     const SimConfig& cfg = {});

/// Same for an arbitrary position-dependent acceleration.
Trajectory integrate(const AccelerationField& accel, const State2D& s0, double duration,
                     const SimConfig& cfg = {});

/// Acceleration at `s` by a central difference of velocity over +-h, where
/// the neighbouring velocities come from integrating forward and
/// time-reversed from `s`. Used as an oracle independent of closed forms.
Vec2 finite_difference_acceleration(const AccelerationField& accel, const State2D& s, double h,
                                    const SimConfig& cfg = {});

struct PolarAcceleration {
    double radial = 0.0;      ///< r'' - r theta'^2
    double transverse = 0.0;  ///< 2 r' theta' + r theta''
};

/// Radial and transverse acceleration at an interior sample of a uniformly
/// sampled trajectory. r' and theta' come from each sample's state; their
/// time derivatives use the 5-point central stencil on the sample grid.
/// Throws DomainError if the index lacks a full stencil or the grid around
/// it is not uniform.
PolarAcceleration polar_decompose_accel(const Trajectory& traj, std::size_t index);

/// Samples of q = 1/r on the uniform grid theta_i = theta0 + i * step.
struct AngularSamples {
    double theta0 = 0.0;
    double step = 0.0;
    std::vector<double> q;
};

struct BinetResidual {
    std::vector<double> theta;
    std::vector<double> residual;
    double max_abs = 0.0;
};

/// Residual F(1/q) + m k^2 q^2 (q'' + q) of the Binet equation, where F is
/// the signed radial force m * (-C r^n) and q'' uses the 5-point stencil.
/// Evaluated at every sample with a full stencil. Throws DomainError if
/// fewer than 5 samples are given or the step is not positive.
BinetResidual binet_residual(const AngularSamples& samples, double k, const CentralField& field,
                             double mass = 1.0);

struct TwoBodyState {
    double mass1 = 1.0;
    double mass2 = 1.0;
    State2D body1;
    State2D body2;
    double gravity = 1.0;  ///< G
};

struct TwoBodyTrajectory {
    Trajectory body1;
    Trajectory body2;
    double mass1 = 1.0;
    double mass2 = 1.0;
    double gravity = 1.0;

    Vec2 barycenter(std::size_t i) const;
    Vec2 momentum(std::size_t i) const;
    double total_angular_momentum(std::size_t i) const;
    /// Motion of body 2 relative to body 1, tagged with the equivalent
    /// one-body field C = G (m1 + m2).
    Trajectory relative() const;
};

/// Integrates both bodies under their mutual inverse-square attraction.
/// Throws DomainError for non-positive masses or coincident positions and
/// IntegrationError on collision or step limit.
TwoBodyTrajectory two_body_integrate(const TwoBodyState& tb, double duration, const SimConfig& cfg = {});

struct PeriodEstimate {
    double period = 0.0;
    double pos_mismatch = 0.0;  ///< |pos(T) - pos(0)|
    double vel_mismatch = 0.0;  ///< |vel(T) - vel(0)|
    double length_scale = 0.0;  ///< (r_min + r_max) / 2 over the revolution
    bool closed = false;        ///< both mismatches under kReturnTolerance of their scales
};

inline constexpr double kReturnTolerance = 1e-8;

/// Time to the first full revolution, found as the upward zero crossing of
/// sense * (pos0 x pos(t)) and refined by bisection on the step length.
/// Throws DomainError if no revolution completes within max_duration.
PeriodEstimate find_period(const CentralField& field, const State2D& s0, double max_duration,
                           const SimConfig& cfg = {});

/// Same for the relative coordinate of a two-body system.
PeriodEstimate find_relative_period(const TwoBodyState& tb, double max_duration, const SimConfig& cfg = {});

}  // namespace orbita::dynamics

#endif  // ORBITA_DYNAMICS_HPP
