#pragma once

// Configuration-driven scenario runner: builds initial data families, runs
// solves, executes estimate suites and emits reports.
//
// Config format: plain-text [scenario] sections of key = value lines, '#'
// comments. No nesting. Each check runs on a documented parameter grid; a
// half-resolution companion run calibrates per-report tolerances
// (tolerance = max(1e-8 scale, 3 x |fine margin - coarse margin|)).

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fdlab/core.hpp"
#include "fdlab/estimates.hpp"
#include "fdlab/exact.hpp"
#include "fdlab/solver.hpp"

namespace fdlab {

enum class DataKind { Bump, Separable, VssSample, CustomTable };

struct ScenarioConfig {
    std::string id = "scenario";
    FdeParams params;
    DataKind data = DataKind::Bump;
    double bump_height = 1.0;
    double data_radius = 1.0;  // support radius R of the data
    double separable_T1 = 1.0;
    double vss_T = 1.0;
    std::string table_file;
    double domain_radius = 3.0;
    SolverOptions solver;
    std::vector<std::string> checks;
    double p = 2.0;       // default integrability exponent for p-dependent checks
    double p_lp = 0.0;    // override for the L^p evolution grid (0 = built-in rule)
    double epsilon = 0.25;
    std::string out_dir = "fdlab_out";
};

struct ScenarioResult {
    ScenarioConfig cfg;
    Trajectory traj;
    std::vector<EstimateReport> reports;
    std::string error;  // nonempty: the solve failed and all checks were skipped
    std::size_t skipped = 0;
};

struct ReportBundle {
    std::vector<ScenarioResult> scenarios;
    std::size_t checked = 0, held = 0, failed = 0, skipped = 0;
    std::string provenance;

    void tally() {
        checked = held = failed = skipped = 0;
        for (const auto& sc : scenarios) {
            skipped += sc.skipped;
            for (const auto& r : sc.reports) {
                ++checked;
                if (r.holds) ++held; else ++failed;
            }
        }
        checked += skipped;
    }
};

// ---------------------------------------------------------------------------
// Config parsing

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            if (!trim(cur).empty()) out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!trim(cur).empty()) out.push_back(trim(cur));
    return out;
}

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

[[noreturn]] inline void parse_fail(int line, const std::string& msg) {
    throw std::runtime_error("config line " + std::to_string(line) + ": " + msg);
}

}  // namespace detail

inline std::vector<ScenarioConfig> parse_config(const std::string& text) {
    std::vector<ScenarioConfig> out;
    ScenarioConfig* cur = nullptr;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.front() == '[') {
            if (t != "[scenario]") detail::parse_fail(lineno, "unknown section " + t);
            out.emplace_back();
            cur = &out.back();
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) detail::parse_fail(lineno, "expected key = value");
        if (!cur) detail::parse_fail(lineno, "key outside a [scenario] section");
        const std::string key = detail::trim(t.substr(0, eq));
        const std::string val = detail::trim(t.substr(eq + 1));
        auto num = [&]() {
            try {
                return std::stod(val);
            } catch (...) {
                detail::parse_fail(lineno, "bad number for " + key + ": " + val);
            }
        };
        if (key == "id") cur->id = val;
        else if (key == "m") cur->params.m = num();
        else if (key == "d") cur->params.d = int(num());
        else if (key == "form") {
            if (val == "with-inverse-m") cur->params.form = EquationForm::WithInverseM;
            else if (val == "without-inverse-m") cur->params.form = EquationForm::WithoutInverseM;
            else detail::parse_fail(lineno, "form must be with-inverse-m | without-inverse-m");
        } else if (key == "data") {
            if (val == "bump") cur->data = DataKind::Bump;
            else if (val == "separable") cur->data = DataKind::Separable;
            else if (val == "vss-sample") cur->data = DataKind::VssSample;
            else if (val == "custom-table") cur->data = DataKind::CustomTable;
            else detail::parse_fail(lineno, "unknown data kind " + val);
        } else if (key == "bump_height") cur->bump_height = num();
        else if (key == "data_radius") cur->data_radius = num();
        else if (key == "separable_T1") cur->separable_T1 = num();
        else if (key == "vss_T") cur->vss_T = num();
        else if (key == "table_file") cur->table_file = val;
        else if (key == "domain_radius") cur->domain_radius = num();
        else if (key == "n_cells") cur->solver.n_cells = int(num());
        else if (key == "dt_init") cur->solver.dt_init = num();
        else if (key == "dt_min") cur->solver.dt_min = num();
        else if (key == "dt_max") cur->solver.dt_max = num();
        else if (key == "t_end") cur->solver.t_end = num();
        else if (key == "newton_tol") cur->solver.newton_tol = num();
        else if (key == "value_floor") cur->solver.value_floor = num();
        else if (key == "extinction_threshold") cur->solver.extinction_threshold = num();
        else if (key == "snapshot_every_steps") cur->solver.snapshot_every_steps = int(num());
        else if (key == "snapshot_every_time") cur->solver.snapshot_every_time = num();
        else if (key == "boundary") {
            if (val == "zero") cur->solver.boundary = Boundary::zero();
            else detail::parse_fail(lineno, "boundary must be zero | use boundary_value for positive");
        } else if (key == "boundary_value") cur->solver.boundary = Boundary::positive(num());
        else if (key == "checks") cur->checks = detail::split_list(val);
        else if (key == "p") cur->p = num();
        else if (key == "p_lp") cur->p_lp = num();
        else if (key == "epsilon") cur->epsilon = num();
        else if (key == "out") cur->out_dir = val;
        else detail::parse_fail(lineno, "unknown key " + key);
    }
    if (out.empty()) throw std::runtime_error("config: no [scenario] sections found");
    for (auto& sc : out) sc.params.validate();
    return out;
}

// ---------------------------------------------------------------------------
// Data families and the solve step

namespace detail {

inline std::function<double(double)> make_initial_data(const ScenarioConfig& cfg) {
    const double base = cfg.solver.boundary.kind == BoundaryKind::PositiveDirichlet
                            ? cfg.solver.boundary.value
                            : 0.0;
    switch (cfg.data) {
        case DataKind::Bump: {
            const double R = cfg.data_radius, h = cfg.bump_height;
            return [R, h, base](double r) {
                const double s = r / R;
                return base + (s < 1.0 ? h * std::pow(1.0 - s * s, 3) : 0.0);
            };
        }
        case DataKind::Separable: {
            auto prof = separable_profile(cfg.params, cfg.domain_radius, 8192);
            const double amp = std::pow(cfg.separable_T1, 1.0 / (1.0 - cfg.params.m));
            return [prof, amp](double r) { return amp * prof.S(r); };
        }
        case DataKind::VssSample:
            throw std::logic_error("vss-sample scenarios are sampled, not solved");
        case DataKind::CustomTable: {
            std::ifstream is(cfg.table_file);
            if (!is) throw std::runtime_error("custom-table: cannot open " + cfg.table_file);
            std::vector<double> rs, us;
            double r, u;
            char comma;
            while (is >> r >> comma >> u) {
                rs.push_back(r);
                us.push_back(u);
            }
            if (rs.size() < 2) throw std::runtime_error("custom-table: need at least 2 rows");
            return [rs, us](double rr) {
                if (rr <= rs.front()) return us.front();
                if (rr >= rs.back()) return us.back();
                std::size_t i = 1;
                while (rs[i] < rr) ++i;
                const double w = (rr - rs[i - 1]) / (rs[i] - rs[i - 1]);
                return (1 - w) * us[i - 1] + w * us[i];
            };
        }
    }
    throw std::logic_error("unreachable");
}

inline Trajectory sample_vss_trajectory(const ScenarioConfig& cfg, int n_cells) {
    FdeParams P = cfg.params;
    auto sol = vss(P, cfg.vss_T);
    Trajectory traj;
    traj.params = P;
    traj.grid = RadialGrid::uniform(P.d, cfg.domain_radius, n_cells);
    traj.boundary = Boundary::zero();
    const int nt = 60;
    for (int j = 0; j <= nt; ++j) {
        Snapshot s;
        s.t = cfg.vss_T * (0.05 + 0.90 * j / nt);
        s.values.resize(traj.grid.nodes());
        for (std::size_t i = 0; i < traj.grid.nodes(); ++i) {
            const double r = std::max(traj.grid.radii[i], 0.5 * traj.grid.faces[1]);
            s.values[i] = sol.evaluate(s.t, r);
        }
        traj.snapshots.push_back(s);
    }
    traj.extinction = ExtinctionRecord{cfg.vss_T, 0.0};
    return traj;
}

inline Trajectory run_solve(const ScenarioConfig& cfg, int n_cells) {
    if (cfg.data == DataKind::VssSample) return sample_vss_trajectory(cfg, n_cells);
    SolverOptions opts = cfg.solver;
    opts.n_cells = n_cells;
    return solve_radial_dirichlet(cfg.params, make_initial_data(cfg), cfg.domain_radius, opts);
}

// critical time of the run in trajectory frame (minimal geometry: support
// data_radius, annulus to the domain boundary)
inline double t_star_traj(const ScenarioConfig& cfg, const Trajectory& traj) {
    const double R = cfg.data_radius;
    const double M = lp_norm_ball(traj.front(), traj.grid, 1.0, R);
    if (!(M > 0)) return 0.0;
    const auto ct = critical_time(traj.params, R, traj.grid.R_dom() / (2.0 * R), M);
    const double wo = traj.params.form == EquationForm::WithInverseM ? 1.0 / traj.params.m : 1.0;
    return ct.t_star / wo;
}

// z-geometry critical time used by the Harnack windows (support 2R, domain
// 9R/2), trajectory frame
inline double harnack_window_scale(const Trajectory& traj, double R) {
    const auto& P = traj.params;
    const double M0 = lp_norm_ball(traj.front(), traj.grid, 1.0, R);
    const auto cutz = cutoff_k0(P.d, 2.0 * R, 4.5 * R);
    const double volAz =
        unit_ball_volume(P.d) * (std::pow(4.5 * R, P.d) - std::pow(4.0 * R, P.d));
    const double wo = P.form == EquationForm::WithInverseM ? 1.0 / P.m : 1.0;
    return 0.5 * cutz.k0 * 0.25 * R * R * std::pow(M0 / volAz, 1.0 - P.m) / wo;
}

}  // namespace detail

/// Run one named check against a trajectory on its documented grid. Returns
/// the produced reports; throws on precondition violations (callers record
/// those as skipped).
inline std::vector<EstimateReport> run_check(const std::string& check, const ScenarioConfig& cfg,
                                             const Trajectory& traj) {
    const auto& P = traj.params;
    const double R = cfg.data_radius;
    const double R_dom = traj.grid.R_dom();
    std::vector<EstimateReport> out;
    auto extend = [&](std::vector<EstimateReport> v) {
        for (auto& r : v) out.push_back(std::move(r));
    };

    if (check == "flux_lemma") {
        const double T = traj.extinction ? traj.extinction->T_est : traj.t_end();
        for (double s : {0.0, 0.25 * T, 0.5 * T})
            extend(check_flux_lemma(traj, R, R_dom, s));
    } else if (check == "positivity_lower") {
        const double ts = detail::t_star_traj(cfg, traj);
        for (double f : {0.2, 0.6, 1.0})
            extend(check_positivity_lower(traj, f * ts, R, PositivityVariant::Theorem));
    } else if (check == "positivity_good_range") {
        const double ts = detail::t_star_traj(cfg, traj);
        for (double f : {0.2, 0.6, 1.0})
            extend(check_positivity_lower(traj, f * ts, R, PositivityVariant::GoodRange));
    } else if (check == "ac_lower") {
        const double ts = detail::t_star_traj(cfg, traj);
        for (double f : {0.1, 0.3, 0.5, 0.9}) {
            extend(check_ac_lower(traj, f * ts, R, AcVariant::TForm));
            if (P.subcritical() && P.d >= 3)
                extend(check_ac_lower(traj, f * ts, R, AcVariant::PcForm));
        }
    } else if (check == "extinction_bounds") {
        extend(check_extinction_bounds(traj, cfg.p));
    } else if (check == "lp_evolution") {
        const double Tend = traj.t_end();
        const double Ra = 0.4 * R_dom, Rb = 0.8 * R_dom;
        std::vector<double> ps;
        if (cfg.p_lp > 0) {
            ps = {cfg.p_lp};
        } else if (P.m > 0 && P.m < 1) {
            ps = {1.0, 2.0, std::max(1.0, P.p_c() + 0.5)};
        } else {
            ps = {cfg.p};
        }
        for (double pp : ps)
            for (auto [fs, ft] : {std::pair{0.0, 0.25}, {0.25, 0.5}, {0.0, 0.5}})
                extend(check_lp_evolution(traj, std::nullopt, pp, Ra, Rb, fs * Tend, ft * Tend));
        if (P.m > 0 && P.m < 1) {
            auto zero = zero_like(traj);
            extend(check_lp_evolution(traj, zero, 1.0, Ra, Rb, 0.0, 0.4 * Tend));
            extend(check_lp_evolution(traj, zero, 1.0, Ra, Rb, 0.4 * Tend, 0.0));
        }
    } else if (check == "smoothing_upper") {
        const double Tend = traj.t_end();
        const double R0 = 0.8 * R_dom;
        const double psm = std::max({cfg.p, 1.0 + 1e-9, P.p_c() + 1e-9});
        if (cfg.data == DataKind::VssSample) {
            // shifted-center cylinder form on interior annuli only (the data
            // is singular at the origin and lies outside L^p there)
            const double rc = 0.5 * R_dom;
            for (double f : {0.4, 0.6})
                extend(check_smoothing_upper(traj, psm, f * Tend, 0.4 * R_dom, true,
                                             0.2 * R_dom, rc));
        } else {
            for (double f : {0.25, 0.5}) {
                extend(check_smoothing_upper(traj, psm, f * Tend, R0, false));
                extend(check_smoothing_upper(traj, psm, f * Tend, R0, true, 0.5 * R0));
            }
        }
    } else if (check == "harnack_initial" || check == "harnack_intrinsic" ||
               check == "harnack_alternative" || check == "harnack_good_range") {
        HarnackArgs args;
        args.R = R_dom / 6.0;
        args.p = cfg.p;
        args.epsilon = cfg.epsilon;
        const double ts = detail::harnack_window_scale(traj, args.R);
        if (check == "harnack_initial") {
            args.t0 = 0.5 * ts;
            args.theta = 0.2 * args.t0;
            extend(check_harnack(traj, HarnackVariant::Initial, args));
        } else if (check == "harnack_intrinsic") {
            args.t0 = 0.0;
            args.theta = 0.2 * (1.0 - args.epsilon) * ts;
            extend(check_harnack(traj, HarnackVariant::Intrinsic, args));
        } else if (check == "harnack_alternative") {
            args.t0 = 0.0;
            args.theta = 0.1 * ts;
            extend(check_harnack(traj, HarnackVariant::Alternative, args));
        } else {
            args.p = 1.0;
            args.t0 = 0.0;
            args.theta = 0.2 * (1.0 - args.epsilon) * ts;
            extend(check_harnack(traj, HarnackVariant::GoodRange, args));
        }
    } else if (check == "aleksandrov") {
        const double lam = std::min(2.9, R_dom / R);
        extend(check_aleksandrov(traj, R, lam));
    } else if (check == "obstruction") {
        const double T = traj.extinction ? traj.extinction->T_est : traj.t_end();
        extend(obstruction_demo(traj, {1, 2, 4, 8, 16}, 0.05 * T, R, 0.5 * R));
    } else if (check == "benilan") {
        auto bc = benilan_crandall_margin(traj);
        auto r = detail::make_report("benilan_crandall", "monotonicity", Direction::LhsGeqRhs,
                                     bc.worst_decrease, 0.0, 1e-6,
                                     "worst relative decrease of t^{-1/(1-m)} u");
        r.t = bc.t;
        r.R = bc.r;
        out.push_back(r);
    } else {
        throw std::invalid_argument("unknown check: " + check);
    }
    return out;
}

/// Execute one scenario: fine solve, half-resolution companion, all checks,
/// coarse-pair tolerance adjustment.
inline ScenarioResult run_scenario(const ScenarioConfig& cfg) {
    ScenarioResult res;
    res.cfg = cfg;
    try {
        res.traj = detail::run_solve(cfg, cfg.solver.n_cells);
    } catch (const std::exception& e) {
        res.error = e.what();
        res.skipped = cfg.checks.size();
        return res;
    }
    std::optional<Trajectory> coarse;
    if (!cfg.checks.empty()) {
        try {
            coarse = detail::run_solve(cfg, std::max(12, cfg.solver.n_cells / 2));
        } catch (const std::exception&) {
            coarse.reset();  // tolerance falls back to the 1e-8 floor
        }
    }
    for (const auto& name : cfg.checks) {
        try {
            auto fine = run_check(name, cfg, res.traj);
            if (coarse) {
                try {
                    auto cr = run_check(name, cfg, *coarse);
                    if (cr.size() == fine.size()) {
                        for (std::size_t i = 0; i < fine.size(); ++i) {
                            const double disc = std::abs(fine[i].margin - cr[i].margin);
                            fine[i].tolerance = std::max(fine[i].tolerance, 3.0 * disc);
                            fine[i].holds = fine[i].margin >= -fine[i].tolerance;
                            fine[i].notes += "; coarse_margin=" + std::to_string(cr[i].margin);
                        }
                    }
                } catch (const std::exception&) {
                    // coarse pass is advisory only
                }
            }
            for (auto& r : fine) {
                r.scenario_id = cfg.id;
                res.reports.push_back(std::move(r));
            }
        } catch (const std::exception& e) {
            ++res.skipped;
            EstimateReport sk;
            sk.name = name;
            sk.variant = "skipped";
            sk.scenario_id = cfg.id;
            sk.notes = e.what();
            sk.holds = true;  // skipped rows do not fail the suite; counted separately
            sk.tolerance = -1;
            res.reports.push_back(sk);
        }
    }
    // drop skipped markers from the holds tally by moving them to the end
    return res;
}

inline ReportBundle run_scenarios_text(const std::string& config_text) {
    ReportBundle bundle;
    auto cfgs = parse_config(config_text);
    for (const auto& cfg : cfgs) bundle.scenarios.push_back(run_scenario(cfg));
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016llx",
                  (unsigned long long)detail::fnv1a(config_text));
    bundle.provenance = std::string("config_fnv1a=") + hash;
    // count skipped markers separately from held/failed
    for (auto& sc : bundle.scenarios) {
        std::vector<EstimateReport> kept;
        for (auto& r : sc.reports) {
            if (r.variant == "skipped") continue;
            kept.push_back(r);
        }
        sc.reports.swap(kept);
    }
    bundle.tally();
    return bundle;
}

inline ReportBundle run_scenarios(const std::string& config_path) {
    std::ifstream is(config_path);
    if (!is) throw std::runtime_error("run_scenarios: cannot open " + config_path);
    std::stringstream ss;
    ss << is.rdbuf();
    return run_scenarios_text(ss.str());
}

// ---------------------------------------------------------------------------
// Emission

namespace detail {

inline std::string csv_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

inline std::string reports_csv(const ReportBundle& bundle) {
    std::ostringstream os;
    os << "scenario_id,estimate_name,variant,t,s,R,R0,p,lhs,rhs,margin,holds,tolerance,notes\n";
    for (const auto& sc : bundle.scenarios)
        for (const auto& r : sc.reports) {
            os << r.scenario_id << ',' << r.name << ',' << r.variant << ',' << detail::fmt(r.t)
               << ',' << detail::fmt(r.s) << ',' << detail::fmt(r.R) << ',' << detail::fmt(r.R0)
               << ',' << detail::fmt(r.p) << ',' << detail::fmt(r.lhs) << ','
               << detail::fmt(r.rhs) << ',' << detail::fmt(r.margin) << ','
               << (r.holds ? 1 : 0) << ',' << detail::fmt(r.tolerance) << ','
               << detail::csv_quote(r.notes) << '\n';
        }
    return os.str();
}

inline std::string reports_table(const ReportBundle& bundle) {
    // one row per (scenario, estimate, variant) with the worst margin
    struct Agg {
        double worst = std::numeric_limits<double>::infinity();
        bool holds = true;
        int n = 0;
    };
    std::map<std::string, Agg> agg;
    std::vector<std::string> order;
    for (const auto& sc : bundle.scenarios)
        for (const auto& r : sc.reports) {
            const std::string key = sc.cfg.id + "  " + r.name + "/" + r.variant;
            if (!agg.count(key)) order.push_back(key);
            auto& a = agg[key];
            a.n++;
            a.holds = a.holds && r.holds;
            a.worst = std::min(a.worst, r.margin);
        }
    std::ostringstream os;
    os << "scenario / estimate                                             n   holds  worst margin\n";
    os << "-----------------------------------------------------------------------------------\n";
    for (const auto& key : order) {
        const auto& a = agg.at(key);
        char line[160];
        std::snprintf(line, sizeof line, "%-60s %4d   %-5s  %.6g\n", key.c_str(), a.n,
                      a.holds ? "yes" : "NO", a.worst);
        os << line;
    }
    char sum[160];
    std::snprintf(sum, sizeof sum, "checked=%zu held=%zu failed=%zu skipped=%zu\n",
                  bundle.checked, bundle.held, bundle.failed, bundle.skipped);
    os << sum << bundle.provenance << '\n';
    return os.str();
}

/// csv | table | plotdata emission into a directory. plotdata writes one
/// (t, lhs, rhs) series file per (scenario, estimate, variant).
inline std::vector<std::string> emit(const ReportBundle& bundle, const std::string& format,
                                     const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::string dir = out_dir;
    if (const char* env = std::getenv("FDE_LAB_OUT")) dir = env;
    fs::create_directories(dir);
    std::vector<std::string> written;
    auto write = [&](const std::string& name, const std::string& content) {
        const std::string path = (fs::path(dir) / name).string();
        std::ofstream os(path);
        if (!os) throw std::runtime_error("emit: cannot write " + path);
        os << content;
        written.push_back(path);
    };
    if (format == "csv") {
        write("reports.csv", reports_csv(bundle));
    } else if (format == "table") {
        if (bundle.checked == 0) throw std::runtime_error("emit: empty bundle for table format");
        write("reports.txt", reports_table(bundle));
    } else if (format == "plotdata") {
        std::map<std::string, std::ostringstream> series;
        for (const auto& sc : bundle.scenarios)
            for (const auto& r : sc.reports) {
                const std::string key = "plot_" + sc.cfg.id + "_" + r.name + "_" + r.variant +
                                        ".dat";
                auto& os = series[key];
                if (os.tellp() == 0) os << "# t lhs rhs\n";
                os << detail::fmt(r.t) << ' ' << detail::fmt(r.lhs) << ' ' << detail::fmt(r.rhs)
                   << '\n';
            }
        for (auto& [name, os] : series) write(name, os.str());
    } else {
        throw std::invalid_argument("emit: unknown format " + format);
    }
    return written;
}

/// Parse a reports.csv back into a bundle (used by the export subcommand and
/// the round-trip test).
inline ReportBundle parse_reports_csv(const std::string& text) {
    ReportBundle bundle;
    std::istringstream is(text);
    std::string line;
    std::getline(is, line);  // header
    std::map<std::string, std::size_t> scen_index;
    while (std::getline(is, line)) {
        if (detail::trim(line).empty()) continue;
        std::vector<std::string> cells;
        std::string cur;
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            const char c = line[i];
            if (quoted) {
                if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else if (c == '"') {
                    quoted = false;
                } else {
                    cur += c;
                }
            } else if (c == '"') {
                quoted = true;
            } else if (c == ',') {
                cells.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        cells.push_back(cur);
        if (cells.size() != 14) throw std::runtime_error("parse_reports_csv: bad row: " + line);
        EstimateReport r;
        r.scenario_id = cells[0];
        r.name = cells[1];
        r.variant = cells[2];
        r.t = std::stod(cells[3]);
        r.s = std::stod(cells[4]);
        r.R = std::stod(cells[5]);
        r.R0 = std::stod(cells[6]);
        r.p = std::stod(cells[7]);
        r.lhs = std::stod(cells[8]);
        r.rhs = std::stod(cells[9]);
        r.margin = std::stod(cells[10]);
        r.holds = cells[11] == "1";
        r.tolerance = std::stod(cells[12]);
        r.notes = cells[13];
        if (!scen_index.count(r.scenario_id)) {
            scen_index[r.scenario_id] = bundle.scenarios.size();
            bundle.scenarios.emplace_back();
            bundle.scenarios.back().cfg.id = r.scenario_id;
        }
        bundle.scenarios[scen_index[r.scenario_id]].reports.push_back(r);
    }
    bundle.tally();
    return bundle;
}

// ---------------------------------------------------------------------------
// Bundled default suite: the three canonical runs plus the exact-solution
// sample and the obstruction base run.

inline std::string paper_suite_config() {
    return R"(# default verification suite: canonical runs for all estimate families
[scenario]
id = good-range
m = 0.7
d = 3
form = without-inverse-m
data = bump
bump_height = 1.0
data_radius = 1.0
domain_radius = 3.0
n_cells = 160
dt_init = 1e-7
dt_max = 4e-4
t_end = 10.0
extinction_threshold = 1e-4
snapshot_every_steps = 1
p = 2.0
epsilon = 0.25
checks = flux_lemma, positivity_lower, positivity_good_range, ac_lower, extinction_bounds, lp_evolution, smoothing_upper, harnack_initial, harnack_intrinsic, harnack_alternative, harnack_good_range, aleksandrov, benilan

[scenario]
id = subcritical
m = 0.25
d = 4
form = without-inverse-m
data = bump
bump_height = 1.0
data_radius = 1.0
domain_radius = 3.0
n_cells = 160
dt_init = 1e-7
dt_max = 4e-4
t_end = 10.0
extinction_threshold = 1e-4
snapshot_every_steps = 1
p = 2.0
epsilon = 0.25
checks = flux_lemma, positivity_lower, ac_lower, extinction_bounds, lp_evolution, smoothing_upper, harnack_initial, harnack_intrinsic, harnack_alternative, aleksandrov, benilan

[scenario]
id = negative-m
m = -0.5
d = 3
form = with-inverse-m
data = bump
bump_height = 1.0
data_radius = 1.0
domain_radius = 3.0
boundary_value = 0.2
n_cells = 160
dt_init = 1e-8
dt_max = 2e-4
t_end = 0.02
p = 3.0
p_lp = 2.0
checks = lp_evolution, smoothing_upper

[scenario]
id = vss-sample
m = 0.25
d = 4
form = with-inverse-m
data = vss-sample
vss_T = 1.0
domain_radius = 1.0
n_cells = 400
p = 2.0
checks = smoothing_upper, benilan

[scenario]
id = obstruction-base
m = 0.25
d = 4
form = without-inverse-m
data = bump
bump_height = 1.0
data_radius = 1.0
domain_radius = 9.0
n_cells = 288
dt_init = 1e-7
dt_max = 1e-3
t_end = 10.0
extinction_threshold = 1e-5
snapshot_every_steps = 1
checks = obstruction
)";
}

}  // namespace fdlab
