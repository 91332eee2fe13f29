#include "orbita/geometry.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "orbita/error.hpp"

namespace orbita::geometry {

using std::numbers::pi;

EllipseGeom make_ellipse(double a, double c) {
    if (!(a > 0.0) || !std::isfinite(a)) {
        throw DomainError("ellipse: semi-major axis must be positive, got " + std::to_string(a));
    }
    if (!(c >= 0.0) || !(c < a)) {
        throw DomainError("ellipse: focal half-distance must satisfy 0 <= c < a");
    }
    EllipseGeom ell;
    ell.a = a;
    ell.c = c;
    ell.b = std::sqrt((a - c) * (a + c));
    ell.e = c / a;
    return ell;
}

double radius_at(const EllipseGeom& ell, double theta) {
    return ell.b * ell.b / (ell.a - ell.c * std::cos(theta));
}

FocalPoint point_and_focal_distances(const EllipseGeom& ell, double t) {
    FocalPoint fp;
    fp.point = {ell.a * std::cos(t), ell.b * std::sin(t)};
    fp.r1 = norm(fp.point - ell.focus1());
    fp.r2 = norm(fp.point - ell.focus2());
    return fp;
}

namespace {

Vec2 tangent_direction(const EllipseGeom& ell, double t) {
    return {-ell.a * std::sin(t), ell.b * std::cos(t)};
}

// Acute angle between a line with direction `line` and the vector `v`.
double acute_angle(const Vec2& line, const Vec2& v) {
    return std::atan2(std::abs(cross(line, v)), std::abs(dot(line, v)));
}

}  // namespace

TangentData tangent_data(const EllipseGeom& ell, double t) {
    const Vec2 p{ell.a * std::cos(t), ell.b * std::sin(t)};
    const Vec2 tangent = tangent_direction(ell, t);
    const double speed = norm(tangent);
    const Vec2 to_f1 = ell.focus1() - p;
    const Vec2 to_f2 = ell.focus2() - p;

    TangentData td;
    td.d1 = std::abs(cross(tangent, to_f1)) / speed;
    td.d2 = std::abs(cross(tangent, to_f2)) / speed;
    td.epsilon = acute_angle(tangent, to_f1);
    const double s = std::sin(td.epsilon);
    td.kappa = ell.a / (ell.b * ell.b) * s * s * s;
    return td;
}

double curvature_parametric(const EllipseGeom& ell, double t) {
    const double st = std::sin(t);
    const double ct = std::cos(t);
    const Vec2 vel{-ell.a * st, ell.b * ct};
    const Vec2 acc{-ell.a * ct, -ell.b * st};
    const double speed2 = dot(vel, vel);
    return cross(vel, acc) / (speed2 * std::sqrt(speed2));
}

double param_to_focal_angle(const EllipseGeom& ell, double t) {
    return std::atan2(ell.b * std::sin(t), ell.a * std::cos(t) + ell.c);
}

double focal_to_param_angle(const EllipseGeom& ell, double theta) {
    const double r = radius_at(ell, theta);
    const Vec2 p = ell.focus1() + r * unit_at(theta);
    return std::atan2(p.y / ell.b, p.x / ell.a);
}

TangentFocalAngles tangent_focal_angles(const EllipseGeom& ell, double t) {
    const Vec2 p{ell.a * std::cos(t), ell.b * std::sin(t)};
    const Vec2 tangent = tangent_direction(ell, t);
    return {acute_angle(tangent, ell.focus1() - p), acute_angle(tangent, ell.focus2() - p)};
}

Vec2 parallel_chord_point(const EllipseGeom& ell, double t) {
    const Vec2 p{ell.a * std::cos(t), ell.b * std::sin(t)};
    const Vec2 tangent = tangent_direction(ell, t);
    const Vec2 chord = ell.focus1() - p;
    // cross(p + s * chord, tangent) = 0
    const double s = -cross(p, tangent) / cross(chord, tangent);
    return p + s * chord;
}

double wrap_angle(double angle) {
    double w = std::remainder(angle, 2.0 * pi);
    if (w <= -pi) {
        w += 2.0 * pi;
    }
    return w;
}

double ConicOrbit::denominator(double theta) const {
    const double ec = e * std::cos(theta - omega);
    return repulsive ? ec - 1.0 : 1.0 + ec;
}

double ConicOrbit::radius(double theta) const {
    const double den = denominator(theta);
    if (!(den > 0.0)) {
        throw DomainError("conic: angle outside the admissible range of the orbit");
    }
    return p / den;
}

double ConicOrbit::periapsis() const {
    return repulsive ? p / (e - 1.0) : p / (1.0 + e);
}

ConicOrbit make_conic(double p, double e, double omega, Sense sense, bool repulsive) {
    if (!(p > 0.0) || !std::isfinite(p)) {
        throw DomainError("conic: semi-latus rectum must be positive");
    }
    if (!std::isfinite(e) || !std::isfinite(omega)) {
        throw DomainError("conic: non-finite eccentricity or axis angle");
    }
    if (e < 0.0) {
        e = -e;
        omega += pi;
    }
    if (repulsive && !(e > 1.0)) {
        throw DomainError("conic: a repulsive orbit must be hyperbolic (e > 1)");
    }
    ConicOrbit orbit;
    orbit.p = p;
    orbit.e = e;
    orbit.omega = wrap_angle(omega);
    orbit.sense = sense;
    orbit.repulsive = repulsive;
    return orbit;
}

ConicKind conic_classify(const ConicOrbit& orbit, double tol_e) {
    const double e = orbit.e;
    if (orbit.repulsive) {
        return ConicKind::hyperbola;
    }
    if (e < tol_e) {
        return ConicKind::circle;
    }
    if (std::abs(e - 1.0) <= tol_e) {
        return ConicKind::parabola;
    }
    return e < 1.0 ? ConicKind::ellipse : ConicKind::hyperbola;
}

const char* to_string(ConicKind kind) {
    switch (kind) {
        case ConicKind::circle: return "circle";
        case ConicKind::ellipse: return "ellipse";
        case ConicKind::parabola: return "parabola";
        case ConicKind::hyperbola: return "hyperbola";
    }
    return "unknown";
}

EllipseGeom to_ellipse(const ConicOrbit& orbit) {
    if (orbit.repulsive || !(orbit.e < 1.0)) {
        throw DomainError("conic: only bound orbits (e < 1) convert to an ellipse");
    }
    const double one_minus_e2 = (1.0 - orbit.e) * (1.0 + orbit.e);
    const double a = orbit.p / one_minus_e2;
    EllipseGeom ell;
    ell.a = a;
    ell.e = orbit.e;
    ell.c = a * orbit.e;
    ell.b = orbit.p / std::sqrt(one_minus_e2);
    return ell;
}

ConicOrbit from_ellipse(const EllipseGeom& ell, double omega, Sense sense) {
    return make_conic(ell.b * ell.b / ell.a, ell.e, omega, sense);
}

double conic_to_geometric_angle(const ConicOrbit& orbit, double theta) {
    return wrap_angle(pi - (theta - orbit.omega));
}

}  // namespace orbita::geometry
