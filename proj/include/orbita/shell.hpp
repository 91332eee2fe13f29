#ifndef ORBITA_SHELL_HPP
#define ORBITA_SHELL_HPP

// Gravitational pull of spherical shells and layered balls on a point mass,
// by surface quadrature.
//
// The shell is parametrised in a frame whose polar axis runs from the centre
// O towards the attracted point P. Nodes are Gauss-Legendre in the polar
// cosine times a uniform trapezoid in azimuth; mesh level L uses 2^L polar
// and 2^(L+1) azimuthal nodes.

#include <cstddef>
#include <istream>
#include <vector>

#include "orbita/vec.hpp"

namespace orbita::shell {

struct ShellSpec {
    double radius = 1.0;
    double density = 1.0;  ///< mass per unit area
    Vec3 center;

    double mass() const;
};

/// Throws DomainError unless radius > 0 and density > 0.
ShellSpec make_shell(double radius, double density, const Vec3& center = {});

/// G m1 m2 / d^2. Throws DomainError if d <= 0.
double point_mass_force(double gravity, double m1, double m2, double d);

/// The point P' on OP with |OP'| |OP| = R^2. Throws DomainError unless P is
/// strictly outside the shell.
Vec3 inversion_point(const ShellSpec& shell, const Vec3& p);

/// Triangle data relating a shell point Q to P and its inversion point P'.
struct InversionTriangle {
    double distance_ratio = 0.0;  ///< |P'Q| / |PQ|
    double angle_oqp = 0.0;       ///< angle O Q P' at Q
    double angle_opq = 0.0;       ///< angle O P Q at P
};
InversionTriangle inversion_triangle(const ShellSpec& shell, const Vec3& p, const Vec3& q);

struct QuadratureResult {
    Vec3 force;               ///< total force on the point mass
    double axial = 0.0;       ///< component along P -> O
    double transverse = 0.0;  ///< magnitude of the remainder
    int mesh_level = 0;
    std::size_t nodes = 0;
    double est_error = 0.0;   ///< |F(L) - F(L-1)| / |F(L)|
};

inline constexpr int kMinMeshLevel = 1;
inline constexpr int kMaxMeshLevel = 12;
/// Points closer than R (1 + kNearSurfaceGap) need at least kNearSurfaceLevel.
inline constexpr double kNearSurfaceGap = 1e-3;
inline constexpr int kNearSurfaceLevel = 12;

/// Force of a uniform shell on mass m1 at an exterior point P.
/// Throws DomainError for interior or on-surface points or an invalid
/// level, and QuadratureError for near-surface points at low levels.
QuadratureResult shell_force_quadrature(const ShellSpec& shell, const Vec3& p, double m1, double gravity,
                                        int mesh_level);

/// Refines from kMinMeshLevel until est_error <= target. Throws
/// QuadratureError if max_level is reached first.
QuadratureResult shell_force_converged(const ShellSpec& shell, const Vec3& p, double m1, double gravity,
                                       double target, int max_level = kMaxMeshLevel);

/// Sum of dA cos(theta) / |P'Q|^2 over the quadrature nodes, where theta is
/// the angle OPQ. Each term is the solid angle of the node's patch seen from
/// P', so the sum tends to 4 pi.
double inversion_solid_angle(const ShellSpec& shell, const Vec3& p, int mesh_level);

/// Quadrature nodes on the shell with their area weights.
struct SurfaceNode {
    Vec3 point;
    double area = 0.0;
};
std::vector<SurfaceNode> surface_nodes(const ShellSpec& shell, const Vec3& axis_point, int mesh_level);

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
};
GaussLegendre gauss_legendre(std::size_t n);

/// Radial density of a spherically symmetric ball.
struct DensityProfile {
    enum class Interpolation {
        step,    ///< density_i holds on (radius_{i-1}, radius_i]
        linear,  ///< piecewise linear, constant below radius_0
    };

    std::vector<double> radius;   ///< strictly increasing, positive
    std::vector<double> density;  ///< non-negative, mass per unit volume
    Interpolation mode = Interpolation::step;

    /// Density at r. Throws DomainError beyond the last radius.
    double at(double r) const;
};

/// Validates and builds a profile.
DensityProfile make_profile(std::vector<double> radius, std::vector<double> density,
                            DensityProfile::Interpolation mode = DensityProfile::Interpolation::step);

/// Reads two-column CSV (radius, density). Blank lines and lines starting
/// with '#' are ignored, as is a non-numeric header row.
DensityProfile read_profile_csv(std::istream& in,
                                DensityProfile::Interpolation mode = DensityProfile::Interpolation::step);

inline constexpr std::size_t kDefaultLayers = 64;

/// Mass of the layered ball as the force computation sees it: density at
/// each layer midpoint times the exact layer volume.
double ball_mass(const DensityProfile& profile, double outer_radius, std::size_t layers = kDefaultLayers);

/// Force of a layered ball on mass m1 at exterior point P: one shell
/// quadrature per radial layer, summed.
QuadratureResult solid_ball_force(const DensityProfile& profile, double outer_radius, const Vec3& p, double m1,
                                  double gravity, int mesh_level, std::size_t layers = kDefaultLayers);

namespace detail {
/// Quadrature without the exterior-point checks.
QuadratureResult integrate_shell(const ShellSpec& shell, const Vec3& p, double m1, double gravity,
                                 int mesh_level);
}  // namespace detail

}  // namespace orbita::shell

#endif  // ORBITA_SHELL_HPP
