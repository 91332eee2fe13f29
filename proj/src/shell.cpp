#include "orbita/shell.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "orbita/error.hpp"
#include "orbita/parallel.hpp"

namespace orbita::shell {

using std::numbers::pi;

double ShellSpec::mass() const { return 4.0 * pi * radius * radius * density; }

ShellSpec make_shell(double radius, double density, const Vec3& center) {
    if (!(radius > 0.0) || !std::isfinite(radius)) {
        throw DomainError("shell: radius must be positive");
    }
    if (!(density > 0.0) || !std::isfinite(density)) {
        throw DomainError("shell: surface density must be positive");
    }
    return {radius, density, center};
}

double point_mass_force(double gravity, double m1, double m2, double d) {
    if (!(d > 0.0)) {
        throw DomainError("point mass force: separation must be positive");
    }
    return gravity * m1 * m2 / (d * d);
}

namespace {

void require_exterior(const ShellSpec& shell, const Vec3& p) {
    const double d = norm(p - shell.center);
    if (!(d > shell.radius)) {
        throw DomainError("shell: the attracted point must lie strictly outside the shell");
    }
}

struct Frame {
    Vec3 e1;
    Vec3 e2;
    Vec3 e3;
};

// Orthonormal frame whose third axis points from the centre to `p`.
Frame axis_frame(const Vec3& center, const Vec3& p) {
    Frame f;
    const Vec3 d = p - center;
    const double len = norm(d);
    f.e3 = len > 0.0 ? d / len : Vec3{0.0, 0.0, 1.0};
    const Vec3 helper = std::abs(f.e3.x) < 0.9 ? Vec3{1.0, 0.0, 0.0} : Vec3{0.0, 1.0, 0.0};
    f.e1 = cross(helper, f.e3);
    f.e1 = f.e1 / norm(f.e1);
    f.e2 = cross(f.e3, f.e1);
    return f;
}

void check_level(int level) {
    if (level < kMinMeshLevel || level > kMaxMeshLevel) {
        throw DomainError("shell: mesh level must be in [" + std::to_string(kMinMeshLevel) + ", " +
                          std::to_string(kMaxMeshLevel) + "]");
    }
}

std::size_t polar_count(int level) { return std::size_t{1} << level; }
std::size_t azimuth_count(int level) { return std::size_t{2} << level; }

// Evaluates `term(q, area)` at every node and returns the pairwise sum.
// Rows of constant polar cosine are summed independently (in parallel),
// then combined in row order.
template <class T, class Term>
T sum_over_nodes(const ShellSpec& shell, const Vec3& axis_point, int level, const Term& term) {
    const GaussLegendre gl = gauss_legendre(polar_count(level));
    const std::size_t n_phi = azimuth_count(level);
    const Frame f = axis_frame(shell.center, axis_point);
    const double r2 = shell.radius * shell.radius;
    const double dphi = 2.0 * pi / static_cast<double>(n_phi);

    std::vector<T> rows(gl.nodes.size());
    parallel_for(gl.nodes.size(), [&](std::size_t i) {
        const double mu = gl.nodes[i];
        const double sin_beta = std::sqrt((1.0 - mu) * (1.0 + mu));
        const double area = r2 * gl.weights[i] * dphi;
        std::vector<T> row(n_phi);
        for (std::size_t j = 0; j < n_phi; ++j) {
            const double phi = dphi * static_cast<double>(j);
            const Vec3 dir = (sin_beta * std::cos(phi)) * f.e1 + (sin_beta * std::sin(phi)) * f.e2 + mu * f.e3;
            row[j] = term(shell.center + shell.radius * dir, area);
        }
        rows[i] = pairwise_sum<T>(row);
    });
    return pairwise_sum<T>(rows);
}

Vec3 raw_force(const ShellSpec& shell, const Vec3& p, double m1, double gravity, int level) {
    const double scale = gravity * m1 * shell.density;
    return sum_over_nodes<Vec3>(shell, p, level, [&](const Vec3& q, double area) {
        const Vec3 d = q - p;
        const double dist = norm(d);
        return (scale * area / (dist * dist * dist)) * d;
    });
}

QuadratureResult finish(const Vec3& force, const Vec3& coarse, const ShellSpec& shell, const Vec3& p, int level,
                        std::size_t nodes) {
    QuadratureResult res;
    res.force = force;
    res.mesh_level = level;
    res.nodes = nodes;
    const Frame f = axis_frame(shell.center, p);
    res.axial = -dot(force, f.e3);
    res.transverse = norm(force + res.axial * f.e3);
    const double mag = norm(force);
    res.est_error = mag > 0.0 ? norm(force - coarse) / mag : norm(force - coarse);
    return res;
}

void check_near_surface(double d, double outer_radius, int level) {
    if (d < outer_radius * (1.0 + kNearSurfaceGap) && level < kNearSurfaceLevel) {
        throw QuadratureError("shell: point within " + std::to_string(kNearSurfaceGap) +
                              " R of the surface needs mesh level >= " + std::to_string(kNearSurfaceLevel));
    }
}

}  // namespace

Vec3 inversion_point(const ShellSpec& shell, const Vec3& p) {
    require_exterior(shell, p);
    const Vec3 d = p - shell.center;
    return shell.center + (shell.radius * shell.radius / dot(d, d)) * d;
}

InversionTriangle inversion_triangle(const ShellSpec& shell, const Vec3& p, const Vec3& q) {
    const Vec3 pp = inversion_point(shell, p);
    const Vec3& o = shell.center;
    auto angle = [](const Vec3& u, const Vec3& v) { return std::atan2(norm(cross(u, v)), dot(u, v)); };
    InversionTriangle t;
    t.distance_ratio = norm(q - pp) / norm(q - p);
    t.angle_oqp = angle(o - q, pp - q);
    t.angle_opq = angle(o - p, q - p);
    return t;
}

GaussLegendre gauss_legendre(std::size_t n) {
    if (n == 0) {
        throw DomainError("gauss-legendre: need at least one node");
    }
    GaussLegendre gl;
    gl.nodes.assign(n, 0.0);
    gl.weights.assign(n, 0.0);
    const std::size_t m = (n + 1) / 2;
    const double nd = static_cast<double>(n);
    for (std::size_t i = 0; i < m; ++i) {
        double z = std::cos(pi * (static_cast<double>(i) + 0.75) / (nd + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = 0.0;
            for (std::size_t j = 1; j <= n; ++j) {
                const double p2 = p1;
                p1 = p0;
                const double jd = static_cast<double>(j);
                p0 = ((2.0 * jd - 1.0) * z * p1 - (jd - 1.0) * p2) / jd;
            }
            dp = nd * (z * p0 - p1) / (z * z - 1.0);
            const double step = p0 / dp;
            z -= step;
            if (std::abs(step) <= 1e-16) {
                break;
            }
        }
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        gl.nodes[i] = -z;
        gl.nodes[n - 1 - i] = z;
        gl.weights[i] = w;
        gl.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) {
        gl.nodes[n / 2] = 0.0;
    }
    return gl;
}

std::vector<SurfaceNode> surface_nodes(const ShellSpec& shell, const Vec3& axis_point, int mesh_level) {
    check_level(mesh_level);
    const GaussLegendre gl = gauss_legendre(polar_count(mesh_level));
    const std::size_t n_phi = azimuth_count(mesh_level);
    const Frame f = axis_frame(shell.center, axis_point);
    const double dphi = 2.0 * pi / static_cast<double>(n_phi);
    std::vector<SurfaceNode> out;
    out.reserve(gl.nodes.size() * n_phi);
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
        const double mu = gl.nodes[i];
        const double sin_beta = std::sqrt((1.0 - mu) * (1.0 + mu));
        for (std::size_t j = 0; j < n_phi; ++j) {
            const double phi = dphi * static_cast<double>(j);
            const Vec3 dir = (sin_beta * std::cos(phi)) * f.e1 + (sin_beta * std::sin(phi)) * f.e2 + mu * f.e3;
            out.push_back({shell.center + shell.radius * dir, shell.radius * shell.radius * gl.weights[i] * dphi});
        }
    }
    return out;
}

namespace detail {

QuadratureResult integrate_shell(const ShellSpec& shell, const Vec3& p, double m1, double gravity, int mesh_level) {
    check_level(mesh_level);
    const Vec3 fine = raw_force(shell, p, m1, gravity, mesh_level);
    const Vec3 coarse = raw_force(shell, p, m1, gravity, mesh_level - 1);
    return finish(fine, coarse, shell, p, mesh_level, polar_count(mesh_level) * azimuth_count(mesh_level));
}

}  // namespace detail

QuadratureResult shell_force_quadrature(const ShellSpec& shell, const Vec3& p, double m1, double gravity,
                                        int mesh_level) {
    require_exterior(shell, p);
    check_level(mesh_level);
    check_near_surface(norm(p - shell.center), shell.radius, mesh_level);
    return detail::integrate_shell(shell, p, m1, gravity, mesh_level);
}

QuadratureResult shell_force_converged(const ShellSpec& shell, const Vec3& p, double m1, double gravity,
                                       double target, int max_level) {
    if (!(target > 0.0)) {
        throw DomainError("shell: target error must be positive");
    }
    require_exterior(shell, p);
    max_level = std::min(max_level, kMaxMeshLevel);
    int level = kMinMeshLevel;
    if (norm(p - shell.center) < shell.radius * (1.0 + kNearSurfaceGap)) {
        level = kNearSurfaceLevel;
    }
    for (; level <= max_level; ++level) {
        QuadratureResult res = detail::integrate_shell(shell, p, m1, gravity, level);
        if (res.est_error <= target) {
            return res;
        }
    }
    throw QuadratureError("shell: mesh level " + std::to_string(max_level) +
                          " is too coarse for the requested error");
}

double inversion_solid_angle(const ShellSpec& shell, const Vec3& p, int mesh_level) {
    check_level(mesh_level);
    const Vec3 pp = inversion_point(shell, p);
    const Vec3 to_center = shell.center - p;
    const double d = norm(to_center);
    return sum_over_nodes<double>(shell, p, mesh_level, [&](const Vec3& q, double area) {
        const Vec3 pq = q - p;
        const double cos_theta = dot(pq, to_center) / (norm(pq) * d);
        const Vec3 ppq = q - pp;
        return area * cos_theta / dot(ppq, ppq);
    });
}

double DensityProfile::at(double r) const {
    if (r > radius.back()) {
        throw DomainError("density profile: radius " + std::to_string(r) + " beyond the last sample");
    }
    const auto it = std::lower_bound(radius.begin(), radius.end(), r);
    const std::size_t i = static_cast<std::size_t>(it - radius.begin());
    if (mode == Interpolation::step || i == 0) {
        return density[i];
    }
    const double w = (r - radius[i - 1]) / (radius[i] - radius[i - 1]);
    return (1.0 - w) * density[i - 1] + w * density[i];
}

DensityProfile make_profile(std::vector<double> radius, std::vector<double> density,
                            DensityProfile::Interpolation mode) {
    if (radius.empty() || radius.size() != density.size()) {
        throw DomainError("density profile: need matching, non-empty radius and density columns");
    }
    for (std::size_t i = 0; i < radius.size(); ++i) {
        if (!(radius[i] > 0.0) || !std::isfinite(radius[i])) {
            throw DomainError("density profile: radii must be positive");
        }
        if (i > 0 && !(radius[i] > radius[i - 1])) {
            throw DomainError("density profile: radii must be strictly increasing");
        }
        if (!(density[i] >= 0.0) || !std::isfinite(density[i])) {
            throw DomainError("density profile: negative density");
        }
    }
    return {std::move(radius), std::move(density), mode};
}

DensityProfile read_profile_csv(std::istream& in, DensityProfile::Interpolation mode) {
    std::vector<double> radius;
    std::vector<double> density;
    std::string line;
    std::size_t line_no = 0;
    bool seen_data = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.find_first_not_of(" \t") == std::string::npos || line[line.find_first_not_of(" \t")] == '#') {
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw DomainError("density profile: line " + std::to_string(line_no) + " is not two columns");
        }
        try {
            std::size_t used = 0;
            const std::string a = line.substr(0, comma);
            const std::string b = line.substr(comma + 1);
            const double r = std::stod(a, &used);
            if (a.find_first_not_of(" \t", used) != std::string::npos) {
                throw std::invalid_argument("trailing characters");
            }
            const double rho = std::stod(b, &used);
            if (b.find_first_not_of(" \t", used) != std::string::npos) {
                throw std::invalid_argument("trailing characters");
            }
            radius.push_back(r);
            density.push_back(rho);
            seen_data = true;
        } catch (const std::exception&) {
            if (!seen_data && radius.empty() && line_no == 1) {
                continue;  // header row
            }
            throw DomainError("density profile: cannot parse line " + std::to_string(line_no));
        }
    }
    return make_profile(std::move(radius), std::move(density), mode);
}

namespace {

struct Layer {
    double radius = 0.0;
    double mass = 0.0;
};

std::vector<Layer> make_layers(const DensityProfile& profile, double outer_radius, std::size_t layers) {
    if (!(outer_radius > 0.0)) {
        throw DomainError("ball: outer radius must be positive");
    }
    if (layers == 0) {
        throw DomainError("ball: need at least one layer");
    }
    if (outer_radius > profile.radius.back() * (1.0 + 1e-12)) {
        throw DomainError("ball: density profile does not reach the outer radius");
    }
    std::vector<Layer> out(layers);
    const double dr = outer_radius / static_cast<double>(layers);
    for (std::size_t j = 0; j < layers; ++j) {
        const double inner = dr * static_cast<double>(j);
        const double outer = j + 1 == layers ? outer_radius : dr * static_cast<double>(j + 1);
        const double mid = 0.5 * (inner + outer);
        const double volume = 4.0 / 3.0 * pi * (outer * outer * outer - inner * inner * inner);
        out[j] = {mid, profile.at(std::min(mid, profile.radius.back())) * volume};
    }
    return out;
}

}  // namespace

double ball_mass(const DensityProfile& profile, double outer_radius, std::size_t layers) {
    double total = 0.0;
    for (const Layer& l : make_layers(profile, outer_radius, layers)) {
        total += l.mass;
    }
    return total;
}

QuadratureResult solid_ball_force(const DensityProfile& profile, double outer_radius, const Vec3& p, double m1,
                                  double gravity, int mesh_level, std::size_t layers) {
    check_level(mesh_level);
    const std::vector<Layer> shells = make_layers(profile, outer_radius, layers);
    const Vec3 center{};
    const double d = norm(p - center);
    if (!(d > outer_radius)) {
        throw DomainError("ball: the attracted point must lie strictly outside the ball");
    }
    check_near_surface(d, outer_radius, mesh_level);

    std::vector<Vec3> fine;
    std::vector<Vec3> coarse;
    for (const Layer& l : shells) {
        if (l.mass == 0.0) {
            continue;
        }
        const ShellSpec s{l.radius, l.mass / (4.0 * pi * l.radius * l.radius), center};
        fine.push_back(raw_force(s, p, m1, gravity, mesh_level));
        coarse.push_back(raw_force(s, p, m1, gravity, mesh_level - 1));
    }
    const ShellSpec frame{outer_radius, 1.0, center};
    return finish(pairwise_sum<Vec3>(fine), pairwise_sum<Vec3>(coarse), frame, p, mesh_level,
                  polar_count(mesh_level) * azimuth_count(mesh_level) * fine.size());
}

}  // namespace orbita::shell
