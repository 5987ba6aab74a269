#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "spwell/constants.hpp"
#include "spwell/grid.hpp"
#include "spwell/params.hpp"
#include "spwell/well.hpp"

namespace spwell {

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

enum class RunMode {
    solve,
    ground_state,
    domain_approx,
    lambda_sweep,
    mu_sweep,
    verify,
    nonexistence_probe
};

inline std::string to_string(RunMode m) {
    switch (m) {
    case RunMode::solve: return "solve";
    case RunMode::ground_state: return "ground-state";
    case RunMode::domain_approx: return "domain-approx";
    case RunMode::lambda_sweep: return "lambda-sweep";
    case RunMode::mu_sweep: return "mu-sweep";
    case RunMode::verify: return "verify";
    case RunMode::nonexistence_probe: return "nonexistence-probe";
    }
    return "solve";
}

inline RunMode mode_from_string(const std::string& s) {
    for (RunMode m : {RunMode::solve, RunMode::ground_state, RunMode::domain_approx,
                      RunMode::lambda_sweep, RunMode::mu_sweep, RunMode::verify,
                      RunMode::nonexistence_probe})
        if (to_string(m) == s) return m;
    throw ConfigError("mode: unknown value '" + s + "'");
}

struct WellSpec {
    std::string shape = "ball"; // ball | ellipsoid | union_balls
    std::vector<Point> centers{{0.0, 0.0, 0.0}};
    std::vector<double> radii{1.0}; // per ball
    Point semi_axes{1.0, 1.0, 1.0}; // ellipsoid
    double tau = 0.25;
    double plateau = 1.0;

    Well build() const {
        if (shape == "ball") {
            if (centers.size() != 1 || radii.size() != 1)
                throw ConfigError("well: ball needs one center and one radius");
            return Well::ball(centers[0], radii[0], tau, plateau);
        }
        if (shape == "ellipsoid") {
            if (centers.size() != 1) throw ConfigError("well: ellipsoid needs one center");
            return Well::ellipsoid(centers[0], semi_axes, tau, plateau);
        }
        if (shape == "union_balls") {
            if (centers.size() != radii.size() || centers.empty())
                throw ConfigError("well: union_balls needs matching centers and radii");
            std::vector<Well::BallSpec> balls;
            for (std::size_t i = 0; i < centers.size(); ++i)
                balls.push_back({centers[i], radii[i]});
            return Well::union_balls(std::move(balls), tau, plateau);
        }
        throw ConfigError("well.shape: unknown value '" + shape + "'");
    }

    bool operator==(const WellSpec&) const = default;
};

struct GridSpec {
    std::string kind = "radial"; // radial | box3d
    double k = 8.0;
    int n = 1024;
    std::vector<double> k_schedule; // domain-approx only

    GridPtr build() const { return build_at(k); }
    GridPtr build_at(double kk) const {
        if (kind == "radial") return Grid::radial(kk, n);
        if (kind == "box3d") return Grid::box3d(kk, n);
        throw ConfigError("grid.kind: unknown value '" + kind + "'");
    }

    bool operator==(const GridSpec&) const = default;
};

struct Tolerances {
    double residual = 1e-10;
    double nehari = 1e-6;
    double level = 1e-8;
    double poisson = 1e-10;

    bool operator==(const Tolerances&) const = default;
};

struct Schedules {
    std::vector<double> lambda;
    std::vector<double> mu;

    bool operator==(const Schedules&) const = default;
};

/// Complete description of one run; (config, seed) determines every output
/// byte except timings.
struct RunConfig {
    Params params;
    WellSpec well;
    GridSpec grid;
    RunMode mode = RunMode::solve;
    Tolerances tolerances;
    Schedules schedules;
    std::uint64_t seed = 1;
    std::string output_dir = "out";
    int n_starts = 4;
    int probe_count = 20;

    bool operator==(const RunConfig& o) const {
        return params.p == o.params.p && params.lambda == o.params.lambda &&
               params.mu == o.params.mu && well == o.well && grid == o.grid &&
               mode == o.mode && tolerances == o.tolerances && schedules == o.schedules &&
               seed == o.seed && output_dir == o.output_dir && n_starts == o.n_starts &&
               probe_count == o.probe_count;
    }

    /// Hard validation (throws with field path) plus soft regime warnings.
    std::vector<std::string> validate() const {
        try {
            params.validate();
        } catch (const std::exception& e) {
            throw ConfigError(std::string("params: ") + e.what());
        }
        well.build();
        if (grid.kind != "radial" && grid.kind != "box3d")
            throw ConfigError("grid.kind: unknown value '" + grid.kind + "'");
        if (grid.n < 3) throw ConfigError("grid.n: need at least 3 nodes");
        if (!(grid.k > 0.0)) throw ConfigError("grid.k: must be positive");
        if (mode == RunMode::domain_approx && grid.k_schedule.size() < 2)
            throw ConfigError("grid.k_schedule: domain-approx needs at least two radii");
        if (mode == RunMode::domain_approx && grid.kind != "radial")
            throw ConfigError("grid.kind: domain-approx runs on radial grids");
        if (mode == RunMode::lambda_sweep && schedules.lambda.empty())
            throw ConfigError("schedules.lambda: lambda-sweep needs a schedule");
        if (mode == RunMode::mu_sweep && schedules.mu.empty())
            throw ConfigError("schedules.mu: mu-sweep needs a schedule");
        if (n_starts < 1) throw ConfigError("n_starts: must be >= 1");
        if (probe_count < 1) throw ConfigError("probe_count: must be >= 1");

        std::vector<std::string> warnings;
        const bool solver_mode = mode != RunMode::verify;
        if (solver_mode && params.regime() == Regime::middle)
            warnings.push_back("params.p: p in [2,3) is outside both solvable regimes; "
                               "solver drivers will reject it");
        if (solver_mode && params.regime() == Regime::subquadratic && params.lambda > 0.0) {
            const double cp = nonexistence_threshold(params.p);
            if (params.lambda >= cp)
                warnings.push_back("params.lambda: at or above the nonexistence threshold c(p)=" +
                                   std::to_string(cp) + "; expect the no-pass diagnostic");
        }
        return warnings;
    }
};

inline void to_json(nlohmann::json& j, const WellSpec& w) {
    j = nlohmann::json{{"shape", w.shape}, {"centers", w.centers}, {"radii", w.radii},
                       {"semi_axes", w.semi_axes}, {"tau", w.tau}, {"plateau", w.plateau}};
}
inline void from_json(const nlohmann::json& j, WellSpec& w) {
    w.shape = j.value("shape", "ball");
    if (j.contains("centers")) j.at("centers").get_to(w.centers);
    if (j.contains("radii")) j.at("radii").get_to(w.radii);
    if (j.contains("semi_axes")) j.at("semi_axes").get_to(w.semi_axes);
    w.tau = j.value("tau", 0.25);
    w.plateau = j.value("plateau", 1.0);
}

inline void to_json(nlohmann::json& j, const GridSpec& g) {
    j = nlohmann::json{{"kind", g.kind}, {"k", g.k}, {"n", g.n}};
    if (!g.k_schedule.empty()) j["k_schedule"] = g.k_schedule;
}
inline void from_json(const nlohmann::json& j, GridSpec& g) {
    g.kind = j.value("kind", "radial");
    g.k = j.value("k", 8.0);
    g.n = j.value("n", 1024);
    if (j.contains("k_schedule")) j.at("k_schedule").get_to(g.k_schedule);
}

inline void to_json(nlohmann::json& j, const Tolerances& t) {
    j = nlohmann::json{{"residual", t.residual}, {"nehari", t.nehari}, {"level", t.level},
                       {"poisson", t.poisson}};
}
inline void from_json(const nlohmann::json& j, Tolerances& t) {
    t.residual = j.value("residual", 1e-10);
    t.nehari = j.value("nehari", 1e-6);
    t.level = j.value("level", 1e-8);
    t.poisson = j.value("poisson", 1e-10);
}

inline void to_json(nlohmann::json& j, const Schedules& s) {
    j = nlohmann::json::object();
    if (!s.lambda.empty()) j["lambda"] = s.lambda;
    if (!s.mu.empty()) j["mu"] = s.mu;
}
inline void from_json(const nlohmann::json& j, Schedules& s) {
    if (j.contains("lambda")) j.at("lambda").get_to(s.lambda);
    if (j.contains("mu")) j.at("mu").get_to(s.mu);
}

inline void to_json(nlohmann::json& j, const RunConfig& c) {
    j = nlohmann::json{{"params", {{"p", c.params.p}, {"lambda", c.params.lambda},
                                   {"mu", c.params.mu}}},
                       {"well", c.well},
                       {"grid", c.grid},
                       {"mode", to_string(c.mode)},
                       {"tolerances", c.tolerances},
                       {"schedules", c.schedules},
                       {"seed", c.seed},
                       {"output_dir", c.output_dir},
                       {"n_starts", c.n_starts},
                       {"probe_count", c.probe_count}};
}
inline void from_json(const nlohmann::json& j, RunConfig& c) {
    if (!j.contains("params")) throw ConfigError("params: missing");
    const auto& p = j.at("params");
    if (!p.contains("p")) throw ConfigError("params.p: missing");
    c.params.p = p.at("p").get<double>();
    c.params.lambda = p.value("lambda", 1.0);
    c.params.mu = p.value("mu", 0.0);
    if (j.contains("well")) j.at("well").get_to(c.well);
    if (j.contains("grid")) j.at("grid").get_to(c.grid);
    c.mode = mode_from_string(j.value("mode", "solve"));
    if (j.contains("tolerances")) j.at("tolerances").get_to(c.tolerances);
    if (j.contains("schedules")) j.at("schedules").get_to(c.schedules);
    c.seed = j.value("seed", std::uint64_t{1});
    c.output_dir = j.value("output_dir", "out");
    c.n_starts = j.value("n_starts", 4);
    c.probe_count = j.value("probe_count", 20);
}

inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config file not found: " + path.string());
    nlohmann::json j = nlohmann::json::parse(in);
    return j.get<RunConfig>();
}

inline std::string serialize_config(const RunConfig& c) {
    return nlohmann::json(c).dump(2);
}

inline RunConfig parse_config(const std::string& text) {
    return nlohmann::json::parse(text).get<RunConfig>();
}

} // namespace spwell
