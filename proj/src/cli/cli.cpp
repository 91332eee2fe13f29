#include <algorithm>
#include <chrono>
#include <fstream>
#include <functional>
#include <memory>
#include <numbers>
#include <stdexcept>

#include <CLI11.hpp>

#include "orbita/cli.hpp"

namespace orbita::cli {

namespace {

class ConfigFileError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Reads --config files as JSON. Top-level keys name global options; a nested
// object keyed by a subcommand name holds that subcommand's options.
// Underscores in keys are accepted for dashes.
class JsonConfig : public CLI::Config {
public:
    std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
        return dump(app, default_also).dump(2) + "\n";
    }

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(input);
        } catch (const nlohmann::json::parse_error& e) {
            throw ConfigFileError(std::string("config: ") + e.what());
        }
        if (!j.is_object()) {
            throw ConfigFileError("config: top level must be a JSON object");
        }
        std::vector<CLI::ConfigItem> items;
        std::vector<std::string> parents;
        flatten(j, parents, items);
        return items;
    }

private:
    static std::string text(const nlohmann::json& v) {
        if (v.is_string()) {
            return v.get<std::string>();
        }
        if (v.is_null()) {
            return "";
        }
        return v.dump();
    }

    static void flatten(const nlohmann::json& j, std::vector<std::string>& parents,
                        std::vector<CLI::ConfigItem>& items) {
        for (const auto& [raw, value] : j.items()) {
            std::string key = raw;
            std::replace(key.begin(), key.end(), '_', '-');
            if (value.is_object()) {
                parents.push_back(key);
                flatten(value, parents, items);
                parents.pop_back();
                continue;
            }
            CLI::ConfigItem item;
            item.parents = parents;
            item.name = key;
            if (value.is_array()) {
                for (const auto& v : value) {
                    item.inputs.push_back(text(v));
                }
            } else {
                item.inputs.push_back(text(value));
            }
            items.push_back(std::move(item));
        }
    }

    static nlohmann::json dump(const CLI::App* app, bool default_also) {
        nlohmann::json j = nlohmann::json::object();
        for (const CLI::Option* opt : app->get_options()) {
            if (!opt->get_configurable() || opt->get_lnames().empty()) {
                continue;
            }
            const std::string& name = opt->get_lnames().front();
            const auto& res = opt->results();
            if (!res.empty()) {
                j[name] = res.size() == 1 ? nlohmann::json(res.front()) : nlohmann::json(res);
            } else if (default_also && !opt->get_default_str().empty()) {
                j[name] = opt->get_default_str();
            }
        }
        for (const CLI::App* sub : app->get_subcommands([](const CLI::App*) { return true; })) {
            nlohmann::json child = dump(sub, default_also);
            if (!child.empty()) {
                j[sub->get_name()] = std::move(child);
            }
        }
        return j;
    }
};

Vec2 to_vec(const std::vector<double>& v) { return {v.at(0), v.at(1)}; }

CLI::Option* add_vec(CLI::App* app, const std::string& name, std::vector<double>& target, const std::string& help) {
    return app->add_option(name, target, help)->delimiter(',')->expected(2);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Numerical experiments on central forces, conics and shell attraction", "orbita"};
    app.require_subcommand(1);
    app.config_formatter(std::make_shared<JsonConfig>());
    app.set_config("--config", "", "JSON file of option values; explicit flags take precedence");

    std::string format = "csv";
    std::string out_path;
    std::string integrator = "adaptive";
    Context ctx;
    app.add_option("--format", format, "Report format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    app.add_option("--out", out_path, "Write the report to PATH instead of stdout");
    app.add_option("--tol-scale", ctx.tol_scale, "Multiply every verdict tolerance by FACTOR")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--integrator", integrator, "Integrator")
        ->check(CLI::IsMember({"adaptive", "fixed"}))
        ->capture_default_str();
    app.add_option("--rel-tol", ctx.sim.rel_tol, "Relative tolerance (adaptive)")->capture_default_str();
    app.add_option("--abs-tol", ctx.sim.abs_tol, "Absolute tolerance (adaptive)")->capture_default_str();
    app.add_option("--fixed-step", ctx.sim.fixed_step, "Step length (fixed)")->capture_default_str();
    app.add_option("--r-min", ctx.sim.r_min, "Collision radius; 0 scales with the initial radius")
        ->capture_default_str();
    app.add_option("--max-steps", ctx.sim.max_steps, "Step limit per integration")->capture_default_str();
    app.add_option("--seed", ctx.sim.seed, "Seed for randomised sampling")->capture_default_str();

    std::function<report::Report()> experiment;

    EllipseArgs ell;
    std::string sampling = "uniform";
    CLI::App* ellipse = app.add_subcommand("ellipse", "Focal, tangent and curvature identities on an ellipse");
    ellipse->add_option("--a", ell.a, "Semi-major axis")->required();
    ellipse->add_option("--c", ell.c, "Centre-to-focus distance")->required();
    ellipse->add_option("--samples", ell.samples, "Sample count")->capture_default_str();
    ellipse->add_option("--sampling", sampling, "Parameter sampling")
        ->check(CLI::IsMember({"uniform", "random"}))
        ->capture_default_str();
    ellipse->callback([&] {
        ell.random = sampling == "random";
        experiment = [&] { return run_ellipse(ell, ctx); };
    });

    InferArgs inf;
    CLI::App* infer = app.add_subcommand("infer", "Recover the force law from an elliptic orbit under the area law");
    infer->add_option("--a", inf.a, "Semi-major axis")->required();
    infer->add_option("--c", inf.c, "Centre-to-focus distance")->required();
    infer->add_option("--T", inf.period, "Orbital period")->capture_default_str();
    infer->add_option("--samples", inf.samples, "Focal-angle samples")->capture_default_str();
    infer->callback([&] { experiment = [&] { return run_infer(inf, ctx); }; });

    SolveArgs sol;
    std::vector<double> pos, vel;
    CLI::App* solve = app.add_subcommand("solve", "Closed-form orbit in an inverse-square field vs integration");
    solve->add_option("--C", sol.strength, "Field strength (negative repels)")->capture_default_str();
    add_vec(solve, "--pos", pos, "Initial position x,y")->required();
    add_vec(solve, "--vel", vel, "Initial velocity x,y")->required();
    solve->add_option("--duration", sol.duration, "Integration time; 0 picks one period or a flyby")
        ->capture_default_str();
    solve->add_option("--samples", sol.samples, "Output samples")->capture_default_str();
    solve->callback([&] {
        sol.pos = to_vec(pos);
        sol.vel = to_vec(vel);
        experiment = [&] { return run_solve(sol, ctx); };
    });

    ShellArgs sh;
    std::string interp = "step";
    CLI::App* shell = app.add_subcommand("shell", "Attraction of a shell or layered ball on an exterior point");
    shell->add_option("--R", sh.radius, "Shell or ball radius")->capture_default_str();
    shell->add_option("--rho", sh.density, "Surface density of the shell");
    shell->add_option("--d", sh.distance, "Distance of the point from the centre")->capture_default_str();
    shell->add_option("--mesh", sh.mesh, "Finest mesh level")->capture_default_str();
    shell->add_option("--m1", sh.m1, "Mass of the point")->capture_default_str();
    shell->add_option("--G", sh.gravity, "Gravitational constant")->capture_default_str();
    shell->add_option("--profile", sh.profile_path, "CSV radius,density profile of a layered ball");
    shell->add_option("--layers", sh.layers, "Radial layers for --profile")->capture_default_str();
    shell->add_option("--interp", interp, "Profile interpolation")
        ->check(CLI::IsMember({"step", "linear"}))
        ->capture_default_str();
    shell->callback([&] {
        sh.linear = interp == "linear";
        experiment = [&] { return run_shell(sh, ctx); };
    });

    Kepler3Args k3;
    CLI::App* kepler3 = app.add_subcommand("kepler3", "Periods of simulated orbits against the third law");
    kepler3->add_option("--C", k3.strength, "Field strength")->capture_default_str();
    kepler3->add_option("--a", k3.semi_major, "Semi-major axes, comma separated")->delimiter(',');
    kepler3->add_option("--e", k3.eccentricity, "Eccentricity of every orbit")->capture_default_str();
    kepler3->callback([&] { experiment = [&] { return run_kepler3(k3, ctx); }; });

    TwoBodyArgs tw;
    std::vector<double> p1{tw.pos1.x, tw.pos1.y}, v1{tw.vel1.x, tw.vel1.y};
    std::vector<double> p2{tw.pos2.x, tw.pos2.y}, v2{tw.vel2.x, tw.vel2.y};
    CLI::App* twobody = app.add_subcommand("twobody", "Two bodies under mutual gravitation");
    twobody->add_option("--G", tw.gravity, "Gravitational constant")->capture_default_str();
    twobody->add_option("--m1", tw.m1, "Mass of body 1")->capture_default_str();
    twobody->add_option("--m2", tw.m2, "Mass of body 2")->capture_default_str();
    add_vec(twobody, "--pos1", p1, "Position of body 1")->capture_default_str();
    add_vec(twobody, "--vel1", v1, "Velocity of body 1")->capture_default_str();
    add_vec(twobody, "--pos2", p2, "Position of body 2")->capture_default_str();
    add_vec(twobody, "--vel2", v2, "Velocity of body 2")->capture_default_str();
    twobody->add_option("--duration", tw.duration, "Integration time")->capture_default_str();
    twobody->add_option("--samples", tw.samples, "Output samples")->capture_default_str();
    twobody->callback([&] {
        tw.pos1 = to_vec(p1);
        tw.vel1 = to_vec(v1);
        tw.pos2 = to_vec(p2);
        tw.vel2 = to_vec(v2);
        experiment = [&] { return run_twobody(tw, ctx); };
    });

    for (CLI::App* sub : {ellipse, infer, solve, shell, kepler3, twobody}) {
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    } catch (const ConfigFileError& e) {
        err << "orbita: " << e.what() << '\n';
        return 2;
    }

    try {
        ctx.sim.integrator = integrator == "fixed" ? ode::Method::fixed : ode::Method::adaptive;
        ctx.sim.validate();
        const auto start = std::chrono::steady_clock::now();
        report::Report rep = experiment();
        rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

        std::ofstream file;
        if (!out_path.empty()) {
            file.open(out_path, std::ios::binary);
            if (!file) {
                err << "orbita: cannot write " << out_path << '\n';
                return 2;
            }
        }
        std::ostream& sink = out_path.empty() ? out : file;
        if (format == "json") {
            report::write_json(rep, sink);
        } else {
            report::write_csv(rep, sink);
        }
        sink.flush();
        return rep.failed() ? 1 : 0;
    } catch (const std::exception& e) {
        err << "orbita: error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace orbita::cli
