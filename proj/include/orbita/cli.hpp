#ifndef ORBITA_CLI_HPP
#define ORBITA_CLI_HPP

// Experiment runners behind the `orbita` command, and the command itself.

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "orbita/dynamics.hpp"
#include "orbita/report.hpp"

namespace orbita::cli {

/// Settings shared by every experiment.
struct Context {
    dynamics::SimConfig sim;
    double tol_scale = 1.0;  ///< multiplies every "<=" threshold
};

struct EllipseArgs {
    double a = 0.0;
    double c = 0.0;
    std::size_t samples = 360;
    bool random = false;  ///< uniform in t when false, seeded draws otherwise
};
report::Report run_ellipse(const EllipseArgs& args, const Context& ctx);

struct InferArgs {
    double a = 0.0;
    double c = 0.0;
    double period = 1.0;
    std::size_t samples = 64;
};
report::Report run_infer(const InferArgs& args, const Context& ctx);

struct SolveArgs {
    double strength = 1.0;
    Vec2 pos;
    Vec2 vel;
    double duration = 0.0;  ///< 0: one period when bound, else 10 |r0| / |v0|
    std::size_t samples = 200;
};
report::Report run_solve(const SolveArgs& args, const Context& ctx);

struct ShellArgs {
    double radius = 1.0;
    std::optional<double> density;  ///< surface density; required without a profile
    double distance = 2.0;
    int mesh = 6;
    double m1 = 1.0;
    double gravity = 1.0;
    std::string profile_path;  ///< radius,density CSV for a layered ball
    std::size_t layers = 64;
    bool linear = false;  ///< profile interpolation
};
report::Report run_shell(const ShellArgs& args, const Context& ctx);

struct Kepler3Args {
    double strength = 39.47841760435743;  ///< 4 pi^2
    std::vector<double> semi_major{1, 2, 3, 4, 5};
    double eccentricity = 0.0;
};
report::Report run_kepler3(const Kepler3Args& args, const Context& ctx);

struct TwoBodyArgs {
    double gravity = 1.0;
    double m1 = 1.0;
    double m2 = 1.0;
    Vec2 pos1{-0.5, 0.0};
    Vec2 vel1{0.0, -0.55};
    Vec2 pos2{0.5, 0.0};
    Vec2 vel2{0.0, 0.55};
    double duration = 20.0;
    std::size_t samples = 200;
};
report::Report run_twobody(const TwoBodyArgs& args, const Context& ctx);

/// Parses arguments, runs one experiment and writes its report.
/// Returns 0 when every verdict passes or is N/A, 1 when one fails and 2 for
/// invalid input.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace orbita::cli

#endif  // ORBITA_CLI_HPP
