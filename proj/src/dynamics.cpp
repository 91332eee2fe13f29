#include "orbita/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "orbita/error.hpp"

namespace orbita::dynamics {

namespace {

using Body = ode::State<4>;
using Pair = ode::State<8>;

Body pack(const State2D& s) { return {s.pos.x, s.pos.y, s.vel.x, s.vel.y}; }

State2D unpack(const Body& y, double t) { return {{y[0], y[1]}, {y[2], y[3]}, t}; }

double collision_radius(const SimConfig& cfg, double initial_r) {
    return cfg.r_min > 0.0 ? cfg.r_min : kDefaultCollisionFactor * initial_r;
}

// Reports a collapsed step size as a collision with the centre.
template <class Solve>
auto as_collision(Solve&& solve) {
    try {
        return solve();
    } catch (const IntegrationError& e) {
        if (e.kind() != IntegrationError::Kind::step_underflow) {
            throw;
        }
        throw IntegrationError(IntegrationError::Kind::collision, std::string(e.what()) + " (approaching the centre)");
    }
}

std::vector<State2D> to_states(const ode::Solution<4>& sol) {
    std::vector<State2D> out;
    out.reserve(sol.samples.size());
    for (const auto& s : sol.samples) {
        out.push_back(unpack(s.y, s.t));
    }
    return out;
}

ode::Solution<4> solve_one_body(const AccelerationField& accel, const State2D& s0, double duration,
                                const SimConfig& cfg, const ode::EventFn<4>& event = {}) {
    cfg.validate();
    const double r0 = norm(s0.pos);
    if (!(r0 > 0.0)) {
        throw DomainError("integrate: initial position must not be the origin");
    }
    const double r_min = collision_radius(cfg, r0);
    auto rhs = [&accel](double, const Body& y) -> Body {
        const Vec2 a = accel({y[0], y[1]});
        return {y[2], y[3], a.x, a.y};
    };
    ode::Guard<4> guard = [r_min](const Body& y) {
        const double r = std::hypot(y[0], y[1]);
        return std::isfinite(r) && r >= r_min;
    };
    return as_collision([&] { return ode::integrate<4>(rhs, pack(s0), s0.t, duration, cfg.ode_options(), guard, event); });
}

// 5-point central first derivative at the middle of f[0..4].
double stencil_d1(const std::array<double, 5>& f, double h) {
    return (f[0] - 8.0 * f[1] + 8.0 * f[3] - f[4]) / (12.0 * h);
}

}  // namespace

CentralField make_field(double strength, double exponent) {
    if (!std::isfinite(strength) || strength == 0.0) {
        throw DomainError("field: strength must be finite and non-zero");
    }
    if (!std::isfinite(exponent)) {
        throw DomainError("field: exponent must be finite");
    }
    return {strength, exponent};
}

Vec2 accelerate(const CentralField& field, const Vec2& pos) {
    const double r = norm(pos);
    if (!(r > 0.0)) {
        throw DomainError("accelerate: position at the centre of force");
    }
    const double magnitude = field.exponent == -2.0 ? field.strength / (r * r)
                                                    : field.strength * std::pow(r, field.exponent);
    return (-magnitude / r) * pos;
}

double potential(const CentralField& field, double r) {
    if (field.exponent == -1.0) {
        return field.strength * std::log(r);
    }
    return field.strength * std::pow(r, field.exponent + 1.0) / (field.exponent + 1.0);
}

double specific_energy(const CentralField& field, const State2D& s) {
    return 0.5 * dot(s.vel, s.vel) + potential(field, norm(s.pos));
}

ode::Options SimConfig::ode_options() const {
    ode::Options o;
    o.method = integrator;
    o.rel_tol = rel_tol;
    o.abs_tol = abs_tol;
    o.fixed_step = fixed_step;
    o.output_interval = output_interval;
    o.max_steps = max_steps;
    return o;
}

void SimConfig::validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
        throw DomainError("config: tolerances must be positive");
    }
    if (max_steps == 0) {
        throw DomainError("config: max_steps must be positive");
    }
    if (integrator == ode::Method::fixed && !(fixed_step > 0.0)) {
        throw DomainError("config: fixed step must be positive");
    }
    if (output_interval < 0.0 || r_min < 0.0) {
        throw DomainError("config: output interval and r_min must be non-negative");
    }
}

AccelerationField with_constant_force(const CentralField& field, const Vec2& force) {
    return [field, force](const Vec2& pos) { return accelerate(field, pos) + force; };
}

Trajectory integrate(const CentralField& field, const State2D& s0, double duration, const SimConfig& cfg) {
    Trajectory traj = integrate(AccelerationField{[field](const Vec2& p) { return accelerate(field, p); }},
                                s0, duration, cfg);
    traj.field = field;
    return traj;
}

Trajectory integrate(const AccelerationField& accel, const State2D& s0, double duration, const SimConfig& cfg) {
    const ode::Solution<4> sol = solve_one_body(accel, s0, duration, cfg);
    Trajectory traj;
    traj.samples = to_states(sol);
    traj.config = cfg;
    traj.stats = sol.stats;
    return traj;
}

Vec2 finite_difference_acceleration(const AccelerationField& accel, const State2D& s, double h,
                                    const SimConfig& cfg) {
    if (!(h > 0.0)) {
        throw DomainError("finite difference: step must be positive");
    }
    SimConfig local = cfg;
    local.output_interval = 0.0;
    const State2D fwd = integrate(accel, s, h, local).samples.back();
    // Velocity-independent forces are time-reversible: flip the velocity,
    // run forward, flip back.
    const State2D rev = integrate(accel, State2D{s.pos, -s.vel, s.t}, h, local).samples.back();
    const Vec2 v_before = -rev.vel;
    return (fwd.vel - v_before) / (2.0 * h);
}

PolarAcceleration polar_decompose_accel(const Trajectory& traj, std::size_t index) {
    if (index < 2 || index + 2 >= traj.size()) {
        throw DomainError("polar decomposition: sample " + std::to_string(index) +
                          " has no full 5-point stencil");
    }
    const double h = traj[index + 1].t - traj[index].t;
    for (std::size_t j = index - 2; j < index + 2; ++j) {
        const double dt = traj[j + 1].t - traj[j].t;
        if (!(std::abs(dt - h) <= 1e-9 * std::abs(h))) {
            throw DomainError("polar decomposition: samples around the index are not uniformly spaced");
        }
    }
    std::array<double, 5> r_dot{};
    std::array<double, 5> theta_dot{};
    for (std::size_t j = 0; j < 5; ++j) {
        const State2D& s = traj[index - 2 + j];
        const double r = norm(s.pos);
        r_dot[j] = dot(s.pos, s.vel) / r;
        theta_dot[j] = cross(s.pos, s.vel) / (r * r);
    }
    const double r = norm(traj[index].pos);
    const double r_ddot = stencil_d1(r_dot, h);
    const double theta_ddot = stencil_d1(theta_dot, h);
    PolarAcceleration out;
    out.radial = r_ddot - r * theta_dot[2] * theta_dot[2];
    out.transverse = 2.0 * r_dot[2] * theta_dot[2] + r * theta_ddot;
    return out;
}

BinetResidual binet_residual(const AngularSamples& samples, double k, const CentralField& field, double mass) {
    const auto& q = samples.q;
    if (q.size() < 5) {
        throw DomainError("binet residual: need at least 5 samples for the stencil");
    }
    if (!(samples.step > 0.0)) {
        throw DomainError("binet residual: grid step must be positive");
    }
    const double h2 = samples.step * samples.step;
    BinetResidual out;
    for (std::size_t i = 2; i + 2 < q.size(); ++i) {
        if (!(q[i] > 0.0)) {
            throw DomainError("binet residual: q = 1/r must be positive");
        }
        const double q_dd = (-q[i - 2] + 16.0 * q[i - 1] - 30.0 * q[i] + 16.0 * q[i + 1] - q[i + 2]) / (12.0 * h2);
        const double r = 1.0 / q[i];
        const double force = -mass * field.strength * std::pow(r, field.exponent);
        const double res = force + mass * k * k * q[i] * q[i] * (q_dd + q[i]);
        out.theta.push_back(samples.theta0 + static_cast<double>(i) * samples.step);
        out.residual.push_back(res);
        out.max_abs = std::max(out.max_abs, std::abs(res));
    }
    return out;
}

Vec2 TwoBodyTrajectory::barycenter(std::size_t i) const {
    return (mass1 * body1[i].pos + mass2 * body2[i].pos) / (mass1 + mass2);
}

Vec2 TwoBodyTrajectory::momentum(std::size_t i) const {
    return mass1 * body1[i].vel + mass2 * body2[i].vel;
}

double TwoBodyTrajectory::total_angular_momentum(std::size_t i) const {
    return mass1 * cross(body1[i].pos, body1[i].vel) + mass2 * cross(body2[i].pos, body2[i].vel);
}

Trajectory TwoBodyTrajectory::relative() const {
    Trajectory rel;
    rel.field = CentralField{gravity * (mass1 + mass2), -2.0};
    rel.config = body1.config;
    rel.stats = body1.stats;
    rel.samples.reserve(body1.size());
    for (std::size_t i = 0; i < body1.size(); ++i) {
        rel.samples.push_back({body2[i].pos - body1[i].pos, body2[i].vel - body1[i].vel, body1[i].t});
    }
    return rel;
}

namespace {

void validate_two_body(const TwoBodyState& tb) {
    if (!(tb.mass1 > 0.0) || !(tb.mass2 > 0.0)) {
        throw DomainError("two-body: masses must be positive");
    }
    if (!(tb.gravity > 0.0)) {
        throw DomainError("two-body: gravitational constant must be positive");
    }
    if (!(norm(tb.body2.pos - tb.body1.pos) > 0.0)) {
        throw DomainError("two-body: bodies must not coincide");
    }
}

ode::Solution<8> solve_two_body(const TwoBodyState& tb, double duration, const SimConfig& cfg,
                                const ode::EventFn<8>& event = {}) {
    validate_two_body(tb);
    cfg.validate();
    const double sep0 = norm(tb.body2.pos - tb.body1.pos);
    const double r_min = collision_radius(cfg, sep0);
    const double gm1 = tb.gravity * tb.mass1;
    const double gm2 = tb.gravity * tb.mass2;
    auto rhs = [gm1, gm2](double, const Pair& y) -> Pair {
        const double dx = y[4] - y[0];
        const double dy = y[5] - y[1];
        const double d = std::hypot(dx, dy);
        const double inv_d3 = 1.0 / (d * d * d);
        return {y[2], y[3], gm2 * dx * inv_d3, gm2 * dy * inv_d3,
                y[6], y[7], -gm1 * dx * inv_d3, -gm1 * dy * inv_d3};
    };
    ode::Guard<8> guard = [r_min](const Pair& y) {
        const double d = std::hypot(y[4] - y[0], y[5] - y[1]);
        return std::isfinite(d) && d >= r_min;
    };
    const Pair y0{tb.body1.pos.x, tb.body1.pos.y, tb.body1.vel.x, tb.body1.vel.y,
                  tb.body2.pos.x, tb.body2.pos.y, tb.body2.vel.x, tb.body2.vel.y};
    return as_collision([&] { return ode::integrate<8>(rhs, y0, tb.body1.t, duration, cfg.ode_options(), guard, event); });
}

TwoBodyTrajectory to_two_body(const ode::Solution<8>& sol, const TwoBodyState& tb, const SimConfig& cfg) {
    TwoBodyTrajectory out;
    out.mass1 = tb.mass1;
    out.mass2 = tb.mass2;
    out.gravity = tb.gravity;
    out.body1.config = cfg;
    out.body2.config = cfg;
    out.body1.stats = sol.stats;
    out.body2.stats = sol.stats;
    for (const auto& s : sol.samples) {
        out.body1.samples.push_back({{s.y[0], s.y[1]}, {s.y[2], s.y[3]}, s.t});
        out.body2.samples.push_back({{s.y[4], s.y[5]}, {s.y[6], s.y[7]}, s.t});
    }
    return out;
}

PeriodEstimate summarize_revolution(const std::vector<State2D>& revolution, const State2D& s0,
                                    const std::optional<State2D>& end) {
    if (!end) {
        throw DomainError("period: no full revolution within the allowed duration");
    }
    double r_lo = std::numeric_limits<double>::infinity();
    double r_hi = 0.0;
    for (const auto& s : revolution) {
        const double r = norm(s.pos);
        r_lo = std::min(r_lo, r);
        r_hi = std::max(r_hi, r);
    }
    PeriodEstimate est;
    est.period = end->t - s0.t;
    est.pos_mismatch = norm(end->pos - s0.pos);
    est.vel_mismatch = norm(end->vel - s0.vel);
    est.length_scale = 0.5 * (r_lo + r_hi);
    est.closed = est.pos_mismatch < kReturnTolerance * est.length_scale &&
                 est.vel_mismatch < kReturnTolerance * norm(s0.vel);
    return est;
}

}  // namespace

TwoBodyTrajectory two_body_integrate(const TwoBodyState& tb, double duration, const SimConfig& cfg) {
    return to_two_body(solve_two_body(tb, duration, cfg), tb, cfg);
}

PeriodEstimate find_period(const CentralField& field, const State2D& s0, double max_duration, const SimConfig& cfg) {
    const double k0 = angular_momentum(s0);
    if (k0 == 0.0) {
        throw DomainError("period: radial motion never completes a revolution");
    }
    const double sense = k0 > 0.0 ? 1.0 : -1.0;
    const Vec2 p0 = s0.pos;
    ode::EventFn<4> event = [p0, sense](double, const Body& y) { return sense * cross(p0, Vec2{y[0], y[1]}); };
    SimConfig local = cfg;
    local.output_interval = 0.0;
    const ode::Solution<4> sol = solve_one_body(
        [field](const Vec2& p) { return accelerate(field, p); }, s0, max_duration, local, event);
    std::optional<State2D> end;
    if (sol.event) {
        end = unpack(sol.event->y, sol.event->t);
    }
    return summarize_revolution(to_states(sol), s0, end);
}

PeriodEstimate find_relative_period(const TwoBodyState& tb, double max_duration, const SimConfig& cfg) {
    const State2D rel0{tb.body2.pos - tb.body1.pos, tb.body2.vel - tb.body1.vel, tb.body1.t};
    const double k0 = angular_momentum(rel0);
    if (k0 == 0.0) {
        throw DomainError("period: radial motion never completes a revolution");
    }
    const double sense = k0 > 0.0 ? 1.0 : -1.0;
    const Vec2 p0 = rel0.pos;
    ode::EventFn<8> event = [p0, sense](double, const Pair& y) {
        return sense * cross(p0, Vec2{y[4] - y[0], y[5] - y[1]});
    };
    SimConfig local = cfg;
    local.output_interval = 0.0;
    const ode::Solution<8> sol = solve_two_body(tb, max_duration, local, event);
    const Trajectory rel = to_two_body(sol, tb, local).relative();
    std::optional<State2D> end;
    if (sol.event) {
        end = rel.samples.back();
    }
    return summarize_revolution(rel.samples, rel0, end);
}

}  // namespace orbita::dynamics
