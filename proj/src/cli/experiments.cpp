#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <random>

#include "orbita/cli.hpp"
#include "orbita/error.hpp"
#include "orbita/geometry.hpp"
#include "orbita/inference.hpp"
#include "orbita/parallel.hpp"
#include "orbita/shell.hpp"
#include "orbita/solver.hpp"

namespace orbita::cli {

namespace {

using report::Report;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double rel_diff(double x, double ref) { return std::abs(x - ref) / std::abs(ref); }

nlohmann::json vec(const Vec2& v) { return nlohmann::json::array({v.x, v.y}); }

// Uniform on [0, 1) from the top 53 bits, identical on every platform.
double unit_draw(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

dynamics::State2D state(const Vec2& pos, const Vec2& vel) { return {pos, vel, 0.0}; }

}  // namespace

Report run_ellipse(const EllipseArgs& args, const Context& ctx) {
    const geometry::EllipseGeom ell = geometry::make_ellipse(args.a, args.c);
    if (args.samples == 0) {
        throw DomainError("ellipse: samples must be positive");
    }
    Report rep;
    rep.experiment = "ellipse";
    rep.input("a", args.a);
    rep.input("c", args.c);
    rep.input("samples", args.samples);
    rep.input("sampling", args.random ? "random" : "uniform");
    if (args.random) {
        rep.input("seed", ctx.sim.seed);
    }
    rep.input("tol_scale", ctx.tol_scale);
    rep.columns = {"t", "theta", "r", "r2", "d1", "d2", "kappa_focal", "kappa_param", "angle_f1", "angle_f2", "pk"};

    std::mt19937_64 gen(ctx.sim.seed);
    const double b2 = ell.b * ell.b;
    double focal_sum = 0, d1d2 = 0, optical = 0, pk = 0, polar = 0, curvature = 0;
    for (std::size_t i = 0; i < args.samples; ++i) {
        const double t = args.random ? kTwoPi * unit_draw(gen) : kTwoPi * static_cast<double>(i) / args.samples;
        const geometry::FocalPoint fp = geometry::point_and_focal_distances(ell, t);
        const geometry::TangentData td = geometry::tangent_data(ell, t);
        const double kp = geometry::curvature_parametric(ell, t);
        const geometry::TangentFocalAngles ang = geometry::tangent_focal_angles(ell, t);
        const double theta = geometry::param_to_focal_angle(ell, t);
        const double pk_len = norm(geometry::parallel_chord_point(ell, t) - fp.point);
        rep.rows.push_back({t, theta, fp.r1, fp.r2, td.d1, td.d2, td.kappa, kp, ang.to_f1, ang.to_f2, pk_len});

        focal_sum = std::max(focal_sum, rel_diff(fp.r1 + fp.r2, 2 * ell.a));
        d1d2 = std::max(d1d2, rel_diff(td.d1 * td.d2, b2));
        optical = std::max(optical, std::abs(ang.to_f1 - ang.to_f2));
        pk = std::max(pk, rel_diff(pk_len, ell.a));
        polar = std::max(polar, rel_diff(fp.r1, geometry::radius_at(ell, theta)));
        curvature = std::max(curvature, rel_diff(td.kappa, kp));
    }
    rep.note("b", ell.b);
    rep.note("e", ell.e);
    rep.note("kappa_major_vertex", ell.a / b2);
    rep.note("kappa_minor_vertex", ell.b / (ell.a * ell.a));

    const double s = ctx.tol_scale;
    rep.check_at_most("focal_sum_rel", focal_sum, 1e-12 * s);
    rep.check_at_most("d1d2_rel", d1d2, 1e-12 * s);
    rep.check_at_most("optical_angle_abs", optical, 1e-12 * s);
    rep.check_at_most("pk_rel", pk, 1e-12 * s);
    rep.check_at_most("polar_radius_rel", polar, 1e-12 * s);
    rep.check_at_most("curvature_rel", curvature, 1e-10 * s);
    return rep;
}

Report run_infer(const InferArgs& args, const Context& ctx) {
    const inference::KeplerMotionSpec spec =
        inference::make_motion_spec(geometry::make_ellipse(args.a, args.c), args.period);
    if (args.samples < 3) {
        throw DomainError("infer: at least 3 samples are needed");
    }
    Report rep;
    rep.experiment = "infer";
    rep.input("a", args.a);
    rep.input("c", args.c);
    rep.input("T", args.period);
    rep.input("samples", args.samples);
    rep.input("tol_scale", ctx.tol_scale);
    rep.columns = {"theta", "r", "accel_hodograph", "accel_curvature", "accel_binet", "accel_reference"};

    std::vector<inference::ForceSample> fit_samples;
    double pairwise = 0;
    for (std::size_t i = 0; i < args.samples; ++i) {
        const double theta = kTwoPi * static_cast<double>(i) / args.samples;
        const double r = geometry::radius_at(spec.ell, theta);
        const double hod = norm(inference::accel_via_hodograph(spec, theta));
        const double curv = inference::accel_via_curvature(spec, theta);
        const double bin = inference::accel_via_binet(spec, theta);
        rep.rows.push_back({theta, r, hod, curv, bin, inference::inverse_square_reference(spec, r)});
        fit_samples.push_back({r, hod});
        pairwise = std::max({pairwise, rel_diff(hod, curv), rel_diff(hod, bin), rel_diff(curv, bin)});
    }
    const double a = spec.ell.a;
    const double reference = 4 * std::numbers::pi * std::numbers::pi * a * a * a / (args.period * args.period);
    rep.note("reference_coefficient", reference);
    rep.note("areal_constant", spec.areal_constant());

    const double s = ctx.tol_scale;
    if (spec.ell.c == 0.0) {
        rep.note("fit", "skipped: a circle has a single radius, so the exponent is undetermined");
        rep.not_applicable("exponent_abs", "circular orbit");
        rep.not_applicable("coefficient_rel", "circular orbit");
    } else {
        const inference::PowerLawFit fit = inference::fit_force_law(fit_samples);
        rep.note("exponent", fit.exponent);
        rep.note("coefficient", fit.coefficient);
        rep.note("fit_residual_norm", fit.residual_norm);
        rep.check_at_most("exponent_abs", std::abs(fit.exponent + 2.0), 1e-9 * s);
        rep.check_at_most("coefficient_rel", rel_diff(fit.coefficient, reference), 1e-9 * s);
    }
    rep.check_at_most("pairwise_rel", pairwise, 1e-11 * s);
    return rep;
}

Report run_solve(const SolveArgs& args, const Context& ctx) {
    const dynamics::CentralField field = dynamics::make_field(args.strength, -2.0);
    const dynamics::State2D s0 = state(args.pos, args.vel);
    const solver::KeplerSolution sol = solver::solve_kepler(field, s0);
    if (args.samples == 0 || args.duration < 0.0) {
        throw DomainError("solve: samples must be positive and duration non-negative");
    }
    const geometry::ConicOrbit& orbit = sol.orbit;
    const geometry::ConicKind kind = geometry::conic_classify(orbit);
    const bool bound = !orbit.repulsive && orbit.e < 1.0;

    Report rep;
    rep.experiment = "solve";
    rep.input("C", args.strength);
    rep.input("pos", vec(args.pos));
    rep.input("vel", vec(args.vel));
    rep.input("samples", args.samples);
    rep.input("tol_scale", ctx.tol_scale);

    std::optional<double> period;
    if (bound) {
        period = solver::orbit_period(orbit, args.strength);
    }
    double duration = args.duration;
    if (duration == 0.0) {
        duration = period ? *period : 10.0 * norm(args.pos) / norm(args.vel);
    }
    rep.input("duration", duration);

    rep.note("kind", geometry::to_string(kind));
    rep.note("p", orbit.p);
    rep.note("e", orbit.e);
    rep.note("omega", orbit.omega);
    rep.note("repulsive", orbit.repulsive);
    rep.note("k", sol.k);
    rep.note("energy", sol.energy);
    rep.note("semi_major_axis", sol.semi_major_axis());

    dynamics::SimConfig cfg = ctx.sim;
    cfg.output_interval = duration / static_cast<double>(args.samples);
    const dynamics::Trajectory traj = dynamics::integrate(field, s0, duration, cfg);
    rep.columns = {"t", "x", "y", "vx", "vy", "r", "theta", "r_conic"};
    double deviation = 0;
    for (const dynamics::State2D& st : traj.samples) {
        const double r = norm(st.pos);
        const double theta = polar_angle(st.pos);
        const double rc = orbit.radius(theta);
        rep.rows.push_back({st.t, st.pos.x, st.pos.y, st.vel.x, st.vel.y, r, theta, rc});
        deviation = std::max(deviation, std::abs(r - rc));
    }
    // Open orbits have no semi-major axis worth scaling by; use p.
    const double scale = bound ? sol.semi_major_axis() : orbit.p;
    rep.note("length_scale", scale);
    rep.note("max_radial_deviation", deviation);

    const double s = ctx.tol_scale;
    rep.check_at_most("radial_deviation_rel", deviation / scale, 1e-6 * s);

    const double h = args.strength / (sol.k * sol.k);
    if (!orbit.repulsive) {
        const geometry::ConicOrbit b = solver::binet_solve(h, orbit.e * h, -orbit.omega, orbit.sense);
        rep.check_at_most("binet_vs_solve_rel", std::max(rel_diff(b.p, orbit.p), std::abs(b.e - orbit.e)), 1e-12 * s);
    } else {
        rep.not_applicable("binet_vs_solve_rel", "repulsive field");
    }

    if (period) {
        const dynamics::PeriodEstimate est = dynamics::find_period(field, s0, 2.0 * *period, ctx.sim);
        rep.note("period", *period);
        rep.note("period_numeric", est.period);
        rep.note("return_position_mismatch", est.pos_mismatch);
        rep.check_at_most("period_rel", rel_diff(est.period, *period), 1e-9 * s);
    } else {
        rep.note("period", "none (unbound)");
        rep.not_applicable("period_rel", "unbound orbit");
    }
    return rep;
}

Report run_shell(const ShellArgs& args, const Context& ctx) {
    if (args.mesh < shell::kMinMeshLevel || args.mesh > shell::kMaxMeshLevel) {
        throw DomainError("shell: mesh level out of range");
    }
    Report rep;
    rep.experiment = "shell";
    rep.input("R", args.radius);
    rep.input("d", args.distance);
    rep.input("mesh", args.mesh);
    rep.input("m1", args.m1);
    rep.input("G", args.gravity);

    const Vec3 p{0.0, 0.0, args.distance};
    std::function<shell::QuadratureResult(int)> compute;
    double mass = 0;
    std::optional<shell::DensityProfile> profile;
    if (!args.profile_path.empty()) {
        std::ifstream in(args.profile_path);
        if (!in) {
            throw DomainError("shell: cannot open profile " + args.profile_path);
        }
        profile = shell::read_profile_csv(in, args.linear ? shell::DensityProfile::Interpolation::linear
                                                           : shell::DensityProfile::Interpolation::step);
        rep.input("profile", args.profile_path);
        rep.input("layers", args.layers);
        rep.input("interpolation", args.linear ? "linear" : "step");
        mass = shell::ball_mass(*profile, args.radius, args.layers);
        compute = [&](int level) {
            return shell::solid_ball_force(*profile, args.radius, p, args.m1, args.gravity, level, args.layers);
        };
    } else {
        if (!args.density) {
            throw DomainError("shell: --rho is required without --profile");
        }
        const shell::ShellSpec spec = shell::make_shell(args.radius, *args.density);
        rep.input("rho", *args.density);
        mass = spec.mass();
        compute = [spec, p, &args](int level) {
            return shell::shell_force_quadrature(spec, p, args.m1, args.gravity, level);
        };
    }
    rep.input("tol_scale", ctx.tol_scale);

    const double reference = shell::point_mass_force(args.gravity, args.m1, mass, args.distance);
    // Requested level first, so invalid or under-resolved input fails before any output.
    const shell::QuadratureResult final = compute(args.mesh);
    const bool near = args.distance < args.radius * (1.0 + shell::kNearSurfaceGap);
    const int first = near ? std::min(args.mesh, shell::kNearSurfaceLevel) : shell::kMinMeshLevel;

    rep.columns = {"level", "nodes", "axial", "transverse", "reference", "rel_error"};
    for (int level = first; level <= args.mesh; ++level) {
        const shell::QuadratureResult q = level == args.mesh ? final : compute(level);
        rep.rows.push_back({static_cast<double>(level), static_cast<double>(q.nodes), q.axial, q.transverse,
                            reference, rel_diff(q.axial, reference)});
    }
    rep.note("mass", mass);
    rep.note("force", final.axial);
    rep.note("reference_force", reference);
    rep.note("est_error", final.est_error);

    const double s = ctx.tol_scale;
    rep.check_at_most("force_rel", rel_diff(final.axial, reference), 1e-6 * s);
    rep.check_at_most("transverse_rel", final.transverse / std::abs(final.axial), 1e-12 * s);
    return rep;
}

Report run_kepler3(const Kepler3Args& args, const Context& ctx) {
    const dynamics::CentralField field = dynamics::make_field(args.strength, -2.0);
    if (!(args.strength > 0.0)) {
        throw DomainError("kepler3: the field must be attractive");
    }
    if (args.semi_major.empty()) {
        throw DomainError("kepler3: no semi-major axes given");
    }
    if (!(args.eccentricity >= 0.0 && args.eccentricity < 1.0)) {
        throw DomainError("kepler3: eccentricity must lie in [0, 1)");
    }
    for (double a : args.semi_major) {
        if (!(a > 0.0) || !std::isfinite(a)) {
            throw DomainError("kepler3: semi-major axes must be positive");
        }
    }
    Report rep;
    rep.experiment = "kepler3";
    rep.input("C", args.strength);
    rep.input("a", args.semi_major);
    rep.input("e", args.eccentricity);
    rep.input("tol_scale", ctx.tol_scale);

    const double e = args.eccentricity;
    const std::size_t n = args.semi_major.size();
    std::vector<double> periods(n);
    parallel_for(n, [&](std::size_t i) {
        const double a = args.semi_major[i];
        const double rp = a * (1.0 - e);
        const double vp = std::sqrt(args.strength * (1.0 + e) / rp);
        const double expected = kTwoPi * std::sqrt(a * a * a / args.strength);
        periods[i] = dynamics::find_period(field, state({rp, 0.0}, {0.0, vp}), 2.0 * expected, ctx.sim).period;
    });

    rep.columns = {"a", "T", "T_closed_form", "ratio"};
    double lo = INFINITY, hi = -INFINITY, mean = 0, closed = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = args.semi_major[i];
        const double T = periods[i];
        const double expected = kTwoPi * std::sqrt(a * a * a / args.strength);
        const double ratio = 8.0 * a * a * a / (T * T);
        rep.rows.push_back({a, T, expected, ratio});
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
        mean += ratio / static_cast<double>(n);
        closed = std::max(closed, rel_diff(T, expected));
    }
    rep.note("ratio_mean", mean);
    rep.note("ratio_expected", 2.0 * args.strength / (std::numbers::pi * std::numbers::pi));

    const double s = ctx.tol_scale;
    rep.check_at_most("ratio_spread_rel", (hi - lo) / mean, 1e-10 * s);
    rep.check_at_most("period_vs_closed_form_rel", closed, 1e-9 * s);
    return rep;
}

Report run_twobody(const TwoBodyArgs& args, const Context& ctx) {
    if (args.samples == 0 || !(args.duration > 0.0)) {
        throw DomainError("twobody: samples and duration must be positive");
    }
    dynamics::TwoBodyState tb;
    tb.mass1 = args.m1;
    tb.mass2 = args.m2;
    tb.gravity = args.gravity;
    tb.body1 = state(args.pos1, args.vel1);
    tb.body2 = state(args.pos2, args.vel2);

    Report rep;
    rep.experiment = "twobody";
    rep.input("G", args.gravity);
    rep.input("m1", args.m1);
    rep.input("m2", args.m2);
    rep.input("pos1", vec(args.pos1));
    rep.input("vel1", vec(args.vel1));
    rep.input("pos2", vec(args.pos2));
    rep.input("vel2", vec(args.vel2));
    rep.input("duration", args.duration);
    rep.input("samples", args.samples);
    rep.input("tol_scale", ctx.tol_scale);

    dynamics::SimConfig cfg = ctx.sim;
    cfg.output_interval = args.duration / static_cast<double>(args.samples);
    const dynamics::TwoBodyTrajectory run = dynamics::two_body_integrate(tb, args.duration, cfg);
    const dynamics::Trajectory rel = run.relative();
    const solver::KeplerSolution sol = solver::solve_kepler(*rel.field, rel[0]);

    const double m = args.m1 + args.m2;
    const Vec2 b0 = (args.m1 * args.pos1 + args.m2 * args.pos2) / m;
    const Vec2 vb = (args.m1 * args.vel1 + args.m2 * args.vel2) / m;
    const double length = norm(args.pos2 - args.pos1);
    const double p_scale = args.m1 * norm(args.vel1) + args.m2 * norm(args.vel2);
    const double l_scale = args.m1 * norm(args.pos1) * norm(args.vel1) + args.m2 * norm(args.pos2) * norm(args.vel2);
    const Vec2 p0 = args.m1 * args.vel1 + args.m2 * args.vel2;
    const double l0 = args.m1 * cross(args.pos1, args.vel1) + args.m2 * cross(args.pos2, args.vel2);

    rep.columns = {"t", "x1", "y1", "vx1", "vy1", "x2", "y2", "vx2", "vy2", "r_rel", "r_conic"};
    double drift = 0, momentum = 0, angular = 0, conic = 0;
    for (std::size_t i = 0; i < run.body1.size(); ++i) {
        const dynamics::State2D& s1 = run.body1[i];
        const dynamics::State2D& s2 = run.body2[i];
        const Vec2 d = s2.pos - s1.pos;
        const double r = norm(d);
        const double rc = sol.orbit.radius(polar_angle(d));
        rep.rows.push_back({s1.t, s1.pos.x, s1.pos.y, s1.vel.x, s1.vel.y, s2.pos.x, s2.pos.y, s2.vel.x, s2.vel.y, r, rc});

        const Vec2 bary = (args.m1 * s1.pos + args.m2 * s2.pos) / m;
        drift = std::max(drift, norm(bary - (b0 + s1.t * vb)) / length);
        const Vec2 p = args.m1 * s1.vel + args.m2 * s2.vel;
        momentum = std::max(momentum, norm(p - p0) / p_scale);
        const double l = args.m1 * cross(s1.pos, s1.vel) + args.m2 * cross(s2.pos, s2.vel);
        angular = std::max(angular, std::abs(l - l0) / l_scale);
        conic = std::max(conic, std::abs(r - rc) / sol.orbit.p);
    }
    rep.note("relative_kind", geometry::to_string(geometry::conic_classify(sol.orbit)));
    rep.note("relative_p", sol.orbit.p);
    rep.note("relative_e", sol.orbit.e);
    rep.note("reduced_strength", rel.field->strength);

    const double s = ctx.tol_scale;
    rep.check_at_most("barycenter_drift_rel", drift, 1e-10 * s);
    rep.check_at_most("momentum_drift_rel", momentum, 1e-10 * s);
    rep.check_at_most("angular_momentum_drift_rel", angular, 1e-10 * s);
    rep.check_at_most("relative_conic_residual_rel", conic, 1e-8 * s);
    return rep;
}

}  // namespace orbita::cli
