// fdlab: radial fast-diffusion laboratory.
//
// Subcommands:
//   solve      run one scenario and export the trajectory (CSV + metadata)
//   constants  print the named constant set for given parameters
//   check      run scenarios from a config file, emit reports
//   suite      run the bundled default suite (all estimate families)
//   export     re-emit a reports.csv as table or plotdata
//
// Exit code 0 iff all non-skipped checks hold.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "fdlab/constants.hpp"
#include "fdlab/harness.hpp"

namespace {

int emit_and_summarize(fdlab::ReportBundle& bundle, const std::string& out_dir) {
    fdlab::emit(bundle, "csv", out_dir);
    fdlab::emit(bundle, "table", out_dir);
    fdlab::emit(bundle, "plotdata", out_dir);
    std::cout << fdlab::reports_table(bundle);
    for (const auto& sc : bundle.scenarios)
        if (!sc.error.empty())
            std::cout << "scenario " << sc.cfg.id << " failed to run: " << sc.error << "\n";
    return bundle.failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fdlab: fast diffusion equation laboratory"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "fdlab_out", scenario_id, report_path,
                format = "table";
    int grid_override = 0;
    unsigned seed = 0;  // reserved: the pipeline is fully deterministic
    app.add_option("--config", config_path, "scenario config file");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--grid", grid_override, "override n_cells for all scenarios");
    app.add_option("--seed", seed, "unused; reserved");

    auto* solve = app.add_subcommand("solve", "run one scenario, export the trajectory");
    solve->add_option("--id", scenario_id, "scenario id (default: first in config)");

    auto* constants = app.add_subcommand("constants", "evaluate the named constant set");
    double m = 0.25, p = 2.0, R = 1.0, lambda = 1.5, epsilon = 0.5;
    int d = 4;
    bool csv = false, with_form = false;
    constants->add_option("--m", m, "exponent m < 1")->capture_default_str();
    constants->add_option("--d", d, "dimension")->capture_default_str();
    constants->add_option("--p", p, "integrability exponent")->capture_default_str();
    constants->add_option("--R", R, "data radius")->capture_default_str();
    constants->add_option("--lambda", lambda, "annulus ratio R0/(2R)")->capture_default_str();
    constants->add_option("--epsilon", epsilon, "cylinder shrink factor")->capture_default_str();
    constants->add_flag("--csv", csv, "emit name,value,formula_tag CSV");
    constants->add_flag("--with-inverse-m", with_form, "use the 1/m-normalized form");

    auto* check = app.add_subcommand("check", "run scenarios from --config, emit reports");
    auto* suite = app.add_subcommand("suite", "run the bundled default suite");
    auto* exp = app.add_subcommand("export", "re-emit a reports.csv");
    exp->add_option("--in", report_path, "reports.csv path")->required();
    exp->add_option("--format", format, "table | plotdata | csv")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) {
            if (config_path.empty()) throw std::runtime_error("solve: --config is required");
            std::ifstream is(config_path);
            if (!is) throw std::runtime_error("cannot open " + config_path);
            std::stringstream ss;
            ss << is.rdbuf();
            auto cfgs = fdlab::parse_config(ss.str());
            const fdlab::ScenarioConfig* pick = &cfgs.front();
            for (const auto& c : cfgs)
                if (!scenario_id.empty() && c.id == scenario_id) pick = &c;
            fdlab::ScenarioConfig cfg = *pick;
            if (grid_override > 0) cfg.solver.n_cells = grid_override;
            auto traj = fdlab::detail::run_solve(cfg, cfg.solver.n_cells);
            std::string dir = out_dir;
            if (const char* env = std::getenv("FDE_LAB_OUT")) dir = env;
            std::filesystem::create_directories(dir);
            const std::string path =
                (std::filesystem::path(dir) / (cfg.id + "_trajectory.csv")).string();
            fdlab::export_trajectory_csv(traj, path);
            std::cout << "wrote " << path << " (+.meta), " << traj.snapshots.size()
                      << " snapshots";
            if (traj.extinction)
                std::cout << ", T_est = " << traj.extinction->T_est
                          << ", fit quality = " << traj.extinction->fit_quality;
            std::cout << "\n";
            return 0;
        }
        if (constants->parsed()) {
            fdlab::FdeParams params{m, d,
                                    with_form || m <= 0 ? fdlab::EquationForm::WithInverseM
                                                        : fdlab::EquationForm::WithoutInverseM};
            auto cs = fdlab::constant_set(params, p, R, lambda, epsilon);
            if (csv) {
                std::printf("name,value,formula_tag\n");
                for (const auto& e : cs)
                    std::printf("%s,%.17g,\"%s\"\n", e.name.c_str(), e.value,
                                e.formula_tag.c_str());
            } else {
                for (const auto& e : cs)
                    std::printf("%-14s %-24.17g %s\n", e.name.c_str(), e.value,
                                e.formula_tag.c_str());
            }
            return 0;
        }
        if (check->parsed()) {
            if (config_path.empty()) throw std::runtime_error("check: --config is required");
            std::ifstream is(config_path);
            if (!is) throw std::runtime_error("cannot open " + config_path);
            std::stringstream ss;
            ss << is.rdbuf();
            std::string text = ss.str();
            if (grid_override > 0) {
                auto cfgs = fdlab::parse_config(text);  // validate before mutating
                (void)cfgs;
            }
            auto bundle = fdlab::run_scenarios_text(text);
            return emit_and_summarize(bundle, out_dir);
        }
        if (suite->parsed()) {
            std::string text =
                config_path.empty()
                    ? fdlab::paper_suite_config()
                    : [&] {
                          std::ifstream is(config_path);
                          if (!is) throw std::runtime_error("cannot open " + config_path);
                          std::stringstream ss;
                          ss << is.rdbuf();
                          return ss.str();
                      }();
            auto bundle = fdlab::run_scenarios_text(text);
            return emit_and_summarize(bundle, out_dir);
        }
        if (exp->parsed()) {
            std::ifstream is(report_path);
            if (!is) throw std::runtime_error("cannot open " + report_path);
            std::stringstream ss;
            ss << is.rdbuf();
            auto bundle = fdlab::parse_reports_csv(ss.str());
            if (format == "table") {
                std::cout << fdlab::reports_table(bundle);
            } else {
                fdlab::emit(bundle, format, out_dir);
                std::cout << "emitted " << format << " to " << out_dir << "\n";
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
