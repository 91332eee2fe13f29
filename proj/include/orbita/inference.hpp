#ifndef ORBITA_INFERENCE_HPP
#define ORBITA_INFERENCE_HPP

// Recovering the force law from a Keplerian motion: an ellipse traversed
// under the area law, with the attracting body at F1. Three independent
// routes give |a|; a log-log fit then reads off the power law.
//
// Frame: origin at F1, theta measured from the ray F1 -> F2, so theta = 0 is
// the far vertex where the velocity is vertical.

#include <cstddef>
#include <span>
#include <vector>

#include "orbita/geometry.hpp"
#include "orbita/vec.hpp"

namespace orbita::inference {

struct KeplerMotionSpec {
    geometry::EllipseGeom ell;
    double period = 1.0;
    geometry::Sense sense = geometry::Sense::counterclockwise;

    /// k = r^2 dtheta/dt = 2 pi a b / T.
    double areal_constant() const;
};

/// Throws DomainError unless period > 0.
KeplerMotionSpec make_motion_spec(const geometry::EllipseGeom& ell, double period,
                                  geometry::Sense sense = geometry::Sense::counterclockwise);

/// Velocity on the orbit at focal angle theta, as a fixed vector plus a
/// vector of constant length turning with theta:
///   v = (pi a / (b T)) (0, -2c) + (2 pi a^2 / (b T)) (-sin theta, cos theta).
Vec2 velocity_hodograph(const KeplerMotionSpec& spec, double theta);

/// Acceleration from differentiating the hodograph along the motion,
/// dv/dt = dv/dtheta * k / r^2.
Vec2 accel_via_hodograph(const KeplerMotionSpec& spec, double theta);

/// |a| from the curvature route: |v| from r |v| sin(eps) = k, curvature from
/// the focal-angle formula, |a| = |v|^2 kappa / sin(eps).
double accel_via_curvature(const KeplerMotionSpec& spec, double theta);

/// q'' + q for q = 1/r = (a - c cos theta) / b^2, differentiated term by term.
double binet_shape_term(const geometry::EllipseGeom& ell, double theta);

/// |a| from the Binet route: k^2 q^2 (q'' + q).
double accel_via_binet(const KeplerMotionSpec& spec, double theta);

/// The reference magnitude 4 pi^2 a^3 / (T^2 r^2).
double inverse_square_reference(const KeplerMotionSpec& spec, double r);

enum class Method { hodograph, curvature, binet };

const char* to_string(Method m);

struct ForceSample {
    double r = 0.0;
    double accel = 0.0;
};

struct PowerLawFit {
    double exponent = 0.0;
    double coefficient = 0.0;
    double residual_norm = 0.0;  ///< l2 norm of log|a| residuals
};

/// Least-squares fit of log|a| = log(coefficient) + exponent * log(r).
/// Throws DomainError for fewer than 3 samples, non-positive values, or a
/// degenerate fit (all radii equal).
PowerLawFit fit_force_law(std::span<const ForceSample> samples);

struct ForceEstimate {
    std::vector<ForceSample> samples;
    PowerLawFit fit;
    Method method = Method::hodograph;
};

inline constexpr std::size_t kDefaultFitSamples = 64;

/// Samples |a| at `count` focal angles uniform on [0, 2 pi) with the chosen
/// route and fits the power law. Circles are rejected: one radius cannot
/// determine an exponent.
ForceEstimate estimate_force(const KeplerMotionSpec& spec, Method method,
                             std::size_t count = kDefaultFitSamples);

}  // namespace orbita::inference

#endif  // ORBITA_INFERENCE_HPP
