#include "orbita/inference.hpp"

#include <cmath>
#include <numbers>

#include "orbita/error.hpp"

namespace orbita::inference {

using std::numbers::pi;

double KeplerMotionSpec::areal_constant() const {
    return 2.0 * pi * ell.a * ell.b / period;
}

KeplerMotionSpec make_motion_spec(const geometry::EllipseGeom& ell, double period, geometry::Sense sense) {
    if (!(period > 0.0) || !std::isfinite(period)) {
        throw DomainError("motion spec: period must be positive");
    }
    return {ell, period, sense};
}

Vec2 velocity_hodograph(const KeplerMotionSpec& spec, double theta) {
    const auto& e = spec.ell;
    const double scale = pi * e.a / (e.b * spec.period);
    const Vec2 offset{0.0, -2.0 * e.c * scale};
    const Vec2 rotating = (2.0 * e.a * scale) * Vec2{-std::sin(theta), std::cos(theta)};
    return geometry::sign_of(spec.sense) * (offset + rotating);
}

Vec2 accel_via_hodograph(const KeplerMotionSpec& spec, double theta) {
    const auto& e = spec.ell;
    const double r = geometry::radius_at(e, theta);
    const double theta_dot = geometry::sign_of(spec.sense) * spec.areal_constant() / (r * r);
    // d/dtheta of the rotating part, times dtheta/dt; the sense enters twice.
    const double dv_dtheta = geometry::sign_of(spec.sense) * 2.0 * pi * e.a * e.a / (e.b * spec.period);
    return (dv_dtheta * theta_dot) * Vec2{-std::cos(theta), -std::sin(theta)};
}

double accel_via_curvature(const KeplerMotionSpec& spec, double theta) {
    const auto& e = spec.ell;
    const double r = geometry::radius_at(e, theta);
    const geometry::TangentData td = geometry::tangent_data(e, geometry::focal_to_param_angle(e, theta));
    const double sin_eps = std::sin(td.epsilon);
    const double speed = spec.areal_constant() / (r * sin_eps);
    return speed * speed * td.kappa / sin_eps;
}

double binet_shape_term(const geometry::EllipseGeom& ell, double theta) {
    const double b2 = ell.b * ell.b;
    const double q = (ell.a - ell.c * std::cos(theta)) / b2;
    const double q_dd = ell.c * std::cos(theta) / b2;
    return q_dd + q;
}

double accel_via_binet(const KeplerMotionSpec& spec, double theta) {
    const double q = 1.0 / geometry::radius_at(spec.ell, theta);
    const double k = spec.areal_constant();
    return k * k * q * q * binet_shape_term(spec.ell, theta);
}

double inverse_square_reference(const KeplerMotionSpec& spec, double r) {
    const double a = spec.ell.a;
    return 4.0 * pi * pi * a * a * a / (spec.period * spec.period * r * r);
}

const char* to_string(Method m) {
    switch (m) {
        case Method::hodograph: return "hodograph";
        case Method::curvature: return "curvature";
        case Method::binet: return "binet";
    }
    return "unknown";
}

PowerLawFit fit_force_law(std::span<const ForceSample> samples) {
    const std::size_t n = samples.size();
    if (n < 3) {
        throw DomainError("force fit: need at least 3 samples");
    }
    double mean_x = 0.0;
    double mean_y = 0.0;
    for (const auto& s : samples) {
        if (!(s.r > 0.0) || !(s.accel > 0.0)) {
            throw DomainError("force fit: radii and accelerations must be positive");
        }
        mean_x += std::log(s.r);
        mean_y += std::log(s.accel);
    }
    mean_x /= static_cast<double>(n);
    mean_y /= static_cast<double>(n);

    double sxx = 0.0;
    double sxy = 0.0;
    for (const auto& s : samples) {
        const double dx = std::log(s.r) - mean_x;
        sxx += dx * dx;
        sxy += dx * (std::log(s.accel) - mean_y);
    }
    if (sxx <= static_cast<double>(n) * 1e-24) {
        throw DomainError("force fit: degenerate, all samples share one radius");
    }

    PowerLawFit fit;
    fit.exponent = sxy / sxx;
    const double intercept = mean_y - fit.exponent * mean_x;
    fit.coefficient = std::exp(intercept);
    double ss = 0.0;
    for (const auto& s : samples) {
        const double res = std::log(s.accel) - (intercept + fit.exponent * std::log(s.r));
        ss += res * res;
    }
    fit.residual_norm = std::sqrt(ss);
    return fit;
}

ForceEstimate estimate_force(const KeplerMotionSpec& spec, Method method, std::size_t count) {
    if (spec.ell.c == 0.0) {
        throw DomainError("force fit: a circular orbit has a single radius");
    }
    ForceEstimate est;
    est.method = method;
    est.samples.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double theta = 2.0 * pi * static_cast<double>(i) / static_cast<double>(count);
        double accel = 0.0;
        switch (method) {
            case Method::hodograph: accel = norm(accel_via_hodograph(spec, theta)); break;
            case Method::curvature: accel = accel_via_curvature(spec, theta); break;
            case Method::binet: accel = accel_via_binet(spec, theta); break;
        }
        est.samples.push_back({geometry::radius_at(spec.ell, theta), accel});
    }
    est.fit = fit_force_law(est.samples);
    return est;
}

}  // namespace orbita::inference
