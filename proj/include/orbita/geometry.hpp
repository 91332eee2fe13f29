#ifndef ORBITA_GEOMETRY_HPP
#define ORBITA_GEOMETRY_HPP

#include "orbita/vec.hpp"

namespace orbita::geometry {

/// Ellipse in its canonical centred frame: major axis along x, foci at
/// (-c, 0) and (+c, 0). F1 = (-c, 0) is the attracting focus.
struct EllipseGeom {
    double a = 1.0;  ///< semi-major axis
    double b = 1.0;  ///< semi-minor axis
    double c = 0.0;  ///< centre-to-focus distance
    double e = 0.0;  ///< eccentricity c/a

    Vec2 focus1() const { return {-c, 0.0}; }
    Vec2 focus2() const { return {c, 0.0}; }
};

/// Builds an ellipse from its semi-major axis and focal half-distance.
/// Throws DomainError unless a > 0 and 0 <= c < a.
EllipseGeom make_ellipse(double a, double c);

/// Focal radius |F1 P| of the point whose direction from F1 makes angle
/// `theta` with the ray F1 -> F2, i.e. b^2 / (a - c cos theta).
double radius_at(const EllipseGeom& ell, double theta);

struct FocalPoint {
    Vec2 point;
    double r1 = 0.0;  ///< |P - F1|
    double r2 = 0.0;  ///< |P - F2|
};

/// Point (a cos t, b sin t) and its two focal distances.
FocalPoint point_and_focal_distances(const EllipseGeom& ell, double t);

struct TangentData {
    double epsilon = 0.0;  ///< acute angle between chord P F1 and the tangent, in (0, pi/2]
    double d1 = 0.0;       ///< distance from F1 to the tangent line
    double d2 = 0.0;       ///< distance from F2 to the tangent line
    double kappa = 0.0;    ///< curvature (a / b^2) sin^3(epsilon)
};

/// Tangent-line data at parameter t. The curvature is evaluated through the
/// focal-angle formula; curvature_parametric() is the independent route.
TangentData tangent_data(const EllipseGeom& ell, double t);

/// Curvature from the parametric kinematic formula
/// (x'y'' - y'x'') / (x'^2 + y'^2)^(3/2).
double curvature_parametric(const EllipseGeom& ell, double t);

/// Angle of P(t) seen from F1, measured from the ray F1 -> F2.
double param_to_focal_angle(const EllipseGeom& ell, double t);

/// Inverse of param_to_focal_angle.
double focal_to_param_angle(const EllipseGeom& ell, double theta);

/// Acute angles the tangent line at P(t) makes with PF1 and PF2.
/// The optical property says these are equal.
struct TangentFocalAngles {
    double to_f1 = 0.0;
    double to_f2 = 0.0;
};
TangentFocalAngles tangent_focal_angles(const EllipseGeom& ell, double t);

/// Point K on the ray from P through F1 such that OK is parallel to the
/// tangent at P(t). |PK| equals the semi-major axis, so K lies past F1
/// whenever |PF1| < a.
Vec2 parallel_chord_point(const EllipseGeom& ell, double t);

enum class Sense : int { counterclockwise = 1, clockwise = -1 };

inline double sign_of(Sense s) { return static_cast<double>(static_cast<int>(s)); }

/// Conic with a focus at the origin.
///
/// Attractive branch: r(theta) = p / (1 + e cos(theta - omega)).
/// Repulsive branch:  r(theta) = p / (e cos(theta - omega) - 1), the far
/// branch of a hyperbola (focus on the convex side), which is what an
/// inverse-square repulsion produces.
///
/// Always normalised so that e >= 0 and omega in (-pi, pi]; omega is the
/// direction of the point nearest the focus.
struct ConicOrbit {
    double p = 1.0;
    double e = 0.0;
    double omega = 0.0;
    Sense sense = Sense::counterclockwise;
    bool repulsive = false;

    /// Denominator of the polar equation at theta; positive on the orbit.
    double denominator(double theta) const;

    bool admissible(double theta) const { return denominator(theta) > 0.0; }

    /// Focal radius at theta. Throws DomainError outside the admissible range.
    double radius(double theta) const;

    /// Smallest focal distance over the orbit.
    double periapsis() const;
};

/// Builds a normalised conic. A negative eccentricity is absorbed into the
/// axis angle by a half-turn. Throws DomainError if p <= 0, or if a
/// repulsive conic is requested with e <= 1.
ConicOrbit make_conic(double p, double e, double omega,
                      Sense sense = Sense::counterclockwise, bool repulsive = false);

enum class ConicKind { circle, ellipse, parabola, hyperbola };

inline constexpr double kDefaultEccentricityTol = 1e-9;

ConicKind conic_classify(const ConicOrbit& orbit, double tol_e = kDefaultEccentricityTol);

const char* to_string(ConicKind kind);

/// Bound conic to its canonical ellipse. Throws DomainError if e >= 1.
EllipseGeom to_ellipse(const ConicOrbit& orbit);

/// Ellipse to a conic with the attracting focus at the origin and the
/// periapsis direction omega.
ConicOrbit from_ellipse(const EllipseGeom& ell, double omega = 0.0,
                        Sense sense = Sense::counterclockwise);

/// Converts a polar angle of a bound ConicOrbit to the angle used by
/// radius_at() on the matching EllipseGeom. The two frames differ by a
/// reflection: the conic measures from periapsis, the ellipse from the far
/// vertex direction F1 -> F2.
double conic_to_geometric_angle(const ConicOrbit& orbit, double theta);

/// Wraps an angle into (-pi, pi].
double wrap_angle(double angle);

}  // namespace orbita::geometry

#endif  // ORBITA_GEOMETRY_HPP
