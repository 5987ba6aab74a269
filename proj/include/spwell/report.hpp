#pragma once

#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "spwell/bound_check.hpp"
#include "spwell/config.hpp"
#include "spwell/constants.hpp"
#include "spwell/solver.hpp"

namespace spwell {

inline void to_json(nlohmann::json& j, const BoundCheck& c) {
    j = nlohmann::json{{"name", c.name},       {"lhs", c.lhs},
                       {"rhs", c.rhs},         {"margin", c.margin},
                       {"tolerance", c.tolerance}, {"pass", c.pass},
                       {"kind", c.hard ? "hard" : "soft"}};
    if (!c.detail.empty()) j["detail"] = c.detail;
}

inline const char* to_string(SolveStatus s) {
    switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::zero: return "zero";
    case SolveStatus::no_pass: return "no-pass";
    case SolveStatus::diverged: return "diverged";
    }
    return "diverged";
}

inline const char* to_string(Provenance p) {
    switch (p) {
    case Provenance::mountain_pass: return "mountain-pass";
    case Provenance::newton: return "newton";
    case Provenance::gradient_flow: return "gradient-flow";
    case Provenance::continuation: return "continuation";
    }
    return "newton";
}

inline nlohmann::json solution_summary(const Solution& s) {
    nlohmann::json j;
    j["status"] = to_string(s.status);
    j["provenance"] = to_string(s.provenance);
    j["energy"] = {{"kinetic", s.energy.kinetic},
                   {"hartree", s.energy.hartree},
                   {"potential_power", s.energy.potential_power},
                   {"total", s.energy.total}};
    j["residual_norm"] = s.residual_norm;
    j["nehari_gap"] = s.nehari_gap;
    j["dv_norm"] = s.dv_norm;
    j["sup_u"] = s.u.size() ? s.u.max_abs() : 0.0;
    j["iterations"] = s.iterations;
    j["sweeps"] = s.sweeps;
    j["mp_level"] = std::isfinite(s.mp_level) ? s.mp_level : 0.0;
    j["rho"] = s.rho;
    j["alpha"] = s.alpha;
    j["level_upper"] = s.level_upper;
    j["endpoint_admissible"] = s.endpoint_admissible;
    return j;
}

inline nlohmann::json constants_json(const ConstantSet& c) {
    nlohmann::json j = nlohmann::json::object();
    auto put = [&](const char* name, const std::optional<double>& v) {
        if (v) j[name] = *v;
    };
    put("c_p", c.c_p);
    put("c_p_lambda_statement", c.c_p_lambda_statement);
    put("c_p_lambda_barrier", c.c_p_lambda_barrier);
    put("c_p_lambda_gap", c.c_p_lambda_gap);
    put("c_of_p", c.c_of_p);
    put("mu1", c.mu1);
    put("mu2", c.mu2);
    put("mu0", c.mu0);
    put("m0", c.m0);
    put("m_lambda", c.m_lambda);
    put("m_mu", c.m_mu);
    put("s0_estimate", c.s0);
    put("s_q125_estimate", c.s_q125);
    put("c_lambda_upper", c.c_lambda_upper);
    nlohmann::json m;
    m["beta0"] = c.moser.beta0;
    m["delta"] = c.moser.delta;
    m["gamma"] = c.moser.gamma;
    m["f_inf"] = c.moser.f_inf;
    m["g_inf"] = c.moser.g_inf;
    m["exponent"] = c.moser.exponent;
    m["cbar"] = c.moser.cbar;
    m["r1_unit_norm"] = c.moser.r1_of(1.0);
    if (c.moser.c1) m["c1"] = *c.moser.c1;
    if (c.moser.c2) m["c2"] = *c.moser.c2;
    j["moser"] = m;
    return j;
}

/// One row of the sweep CSV.
struct SweepRow {
    double p = 0.0, lambda = 0.0, mu = 0.0, k = 0.0;
    double energy = 0.0, dv_norm = 0.0, sup_u = 0.0;
    double decay_slope = 0.0;
    double g_mass = 0.0, outside_mass = 0.0;
    int pass_hard = 0, fail_hard = 0, pass_soft = 0, fail_soft = 0;
};

/// Self-contained run result: config echo, constants, solution summaries,
/// every BoundCheck with its tolerance, sweep rows, warnings, timings.
/// Everything except "timings" is a pure function of (config, seed).
struct RunReport {
    RunConfig config;
    nlohmann::json constants = nlohmann::json::object();
    std::vector<nlohmann::json> solutions;
    std::vector<BoundCheck> checks;
    std::vector<SweepRow> rows;
    std::vector<std::string> warnings;
    std::string status = "ok"; // ok | partial | failed
    nlohmann::json timings = nlohmann::json::object();
    std::optional<Field> primary_u; // fields behind the snapshot dumps
    std::optional<Field> primary_phi;

    bool hard_pass() const {
        for (const auto& c : checks)
            if (c.hard && !c.pass) return false;
        return status != "failed";
    }

    void tally_rows() {
        int ph = 0, fh = 0, ps = 0, fs = 0;
        for (const auto& c : checks)
            (c.hard ? (c.pass ? ph : fh) : (c.pass ? ps : fs))++;
        for (auto& r : rows) {
            r.pass_hard = ph;
            r.fail_hard = fh;
            r.pass_soft = ps;
            r.fail_soft = fs;
        }
    }

    nlohmann::json to_json(bool with_timings = true) const {
        nlohmann::json j;
        j["config"] = config;
        j["constants"] = constants;
        j["solutions"] = solutions;
        j["checks"] = checks;
        j["warnings"] = warnings;
        j["status"] = status;
        j["hard_pass"] = hard_pass();
        nlohmann::json rs = nlohmann::json::array();
        for (const auto& r : rows)
            rs.push_back({{"p", r.p}, {"lambda", r.lambda}, {"mu", r.mu}, {"k", r.k},
                          {"energy", r.energy}, {"dv_norm", r.dv_norm}, {"sup_u", r.sup_u},
                          {"decay_slope", r.decay_slope}, {"g_mass", r.g_mass},
                          {"outside_mass", r.outside_mass}});
        j["sweep_rows"] = rs;
        if (with_timings) j["timings"] = timings;
        return j;
    }
};

/// Sweep CSV: one row per run entry with the localization and bound-check
/// tallies. Mixed modes are rejected.
inline std::string sweep_table(const std::vector<RunReport>& reports) {
    std::ostringstream out;
    out << "p,lambda,mu,k,energy,dv_norm,sup_u,decay_slope,g_mass,outside_mass,"
           "pass_hard,fail_hard,pass_soft,fail_soft\n";
    if (reports.empty()) return out.str();
    const RunMode mode = reports.front().config.mode;
    for (const auto& r : reports)
        if (r.config.mode != mode)
            throw std::invalid_argument("sweep_table: mixed run modes");
    out.precision(17);
    for (const auto& rep : reports)
        for (const auto& r : rep.rows)
            out << r.p << ',' << r.lambda << ',' << r.mu << ',' << r.k << ',' << r.energy
                << ',' << r.dv_norm << ',' << r.sup_u << ',' << r.decay_slope << ','
                << r.g_mass << ',' << r.outside_mass << ',' << r.pass_hard << ','
                << r.fail_hard << ',' << r.pass_soft << ',' << r.fail_soft << '\n';
    return out.str();
}

} // namespace spwell
