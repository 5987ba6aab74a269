#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "spwell/run.hpp"

namespace {

void print_report(const spwell::RunReport& rep) {
    for (const auto& w : rep.warnings) std::printf("warning: %s\n", w.c_str());
    for (std::size_t i = 0; i < rep.solutions.size(); ++i) {
        const auto& s = rep.solutions[i];
        std::printf("solution[%zu]: status=%s I=%.8g |u|=%.6g residual=%.3e nehari=%.3e\n", i,
                    s.value("status", "?").c_str(), s["energy"].value("total", 0.0),
                    s.value("dv_norm", 0.0), s.value("residual_norm", 0.0),
                    s.value("nehari_gap", 0.0));
    }
    int hard_fail = 0, soft_fail = 0;
    for (const auto& c : rep.checks) {
        const bool hard = c.hard;
        std::printf("[%s] %-42s lhs=%.6g rhs=%.6g margin=%.3e%s\n", c.pass ? "PASS" : "FAIL",
                    c.name.c_str(), c.lhs, c.rhs, c.margin, hard ? "" : " (soft)");
        if (!c.pass) (hard ? hard_fail : soft_fail)++;
    }
    std::printf("status: %s (%d hard failures, %d soft failures)\n", rep.status.c_str(),
                hard_fail, soft_fail);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Schrödinger–Poisson steep-well solver and verification suite"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed_override;
    std::optional<std::string> out_override;

    auto add_common = [&](CLI::App* cmd, bool config_required) {
        auto* opt = cmd->add_option("--config", config_path, "run configuration JSON");
        if (config_required) opt->required();
        cmd->add_option_function<std::uint64_t>(
            "--seed", [&](std::uint64_t s) { seed_override = s; }, "override the config seed");
        cmd->add_option_function<std::string>(
            "--out", [&](std::string s) { out_override = std::move(s); },
            "override the output directory");
    };

    auto* solve = app.add_subcommand("solve", "run the mode given in the config");
    add_common(solve, true);
    auto* verify =
        app.add_subcommand("verify", "constants + oracle suite, no nonlinear solves");
    add_common(verify, false);

    CLI11_PARSE(app, argc, argv);

    try {
        spwell::RunConfig cfg;
        if (!config_path.empty()) cfg = spwell::load_config(config_path);
        if (app.got_subcommand(verify)) cfg.mode = spwell::RunMode::verify;
        if (seed_override) cfg.seed = *seed_override;
        if (out_override) cfg.output_dir = *out_override;

        spwell::RunReport rep = spwell::run(cfg);
        print_report(rep);
        return rep.hard_pass() ? 0 : 1;
    } catch (const spwell::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
