#include "nlrs_cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <json.hpp>
#include <stdexcept>

namespace nlrs::cli {

using Json = nlohmann::ordered_json;

namespace {

struct Verdict {
    std::string name;
    bool pass;
    std::string detail;
};

struct Outcome {
    std::vector<Verdict> verdicts;
    Json results = Json::object();
    int solves = 0;
};

std::string g17(double v) { return fmt::format("{:.17g}", v); }

std::string point_csv(const Point& p, int n) { return n == 1 ? g17(p[0]) : g17(p[0]) + " " + g17(p[1]); }

class Csv {
public:
    Csv(const std::filesystem::path& path, const std::vector<std::string>& header) : os_(path, std::ios::trunc) {
        if (!os_) throw std::runtime_error("output path not writable: " + path.string());
        row(header);
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) os_ << (i ? "," : "") << cells[i];
        os_ << '\n';
    }

private:
    std::ofstream os_;
};

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("output path not writable: " + path.string());
    os << text;
}

FormOptions form_opts(const RunConfig& c) { return FormOptions{.threads = c.solver.threads}; }

SolverOptions options_with_center(const RunConfig& c, const Point& first) {
    SolverOptions o = c.solver;
    o.centers.insert(o.centers.begin(), first);
    return o;
}

Point to_frame(const ProblemSpec& prob, const Point& x) {
    const double s = prob.frame == Frame::rescaled ? 1.0 / prob.eps : 1.0;
    return {x[0] * s, x[1] * s};
}

OracleDResult run_oracle(const RunConfig& c, Outcome& out) {
    const auto fixture = oracle_D(c.alpha, c.p, c.n, c.ladder(), options_with_center(c, {0.0, 0.0}));
    out.solves += static_cast<int>(fixture.rungs.size());
    return fixture;
}

Json rungs_json(const OracleDResult& f) {
    Json a = Json::array();
    for (const auto& r : f.rungs) a.push_back({{"L", r.L}, {"N", r.N}, {"h", r.h}, {"level", r.level}});
    return a;
}

Outcome cmd_solve(const RunConfig& c) {
    Outcome out;
    const auto prob = c.problem();
    const auto cond = condition_C_check(c.coeffs, c.alpha, c.p, c.n, c.scan);
    auto opts = options_with_center(c, to_frame(prob, cond.argmin));
    opts.record_history = true;
    const auto A = assemble_problem_form(prob, form_opts(c));
    const auto gs = solve_ground_state(make_model(prob), A, opts);
    out.solves = 1 + opts.restarts + static_cast<int>(c.solver.centers.size());

    write_field(gs.u, c.out_dir / "ground_state.rsfld");
    Csv csv(c.out_dir / "solve.csv", {"iter", "quotient", "level", "grad_norm", "step"});
    for (const auto& h : gs.history)
        csv.row({fmt::format("{}", h.iter), g17(h.quotient), g17(h.level), g17(h.grad_norm), g17(h.step)});

    const double min_u = *std::min_element(gs.u.values().begin(), gs.u.values().end());
    const double rescaled = prob.frame == Frame::original ? gs.level / std::pow(prob.eps, prob.n) : gs.level;
    out.results = {{"level", gs.level},
                   {"rescaled_level", rescaled},
                   {"gradient_norm", gs.gradient_norm},
                   {"nehari_residual", gs.nehari_residual},
                   {"iterations", gs.iterations},
                   {"restart_index", gs.restart_index},
                   {"converged", gs.converged}};
    out.verdicts.push_back({"converged", gs.converged,
                            fmt::format("grad_norm={:.3e} tol_g={:.3e} iterations={}", gs.gradient_norm,
                                        c.solver.tol_g, gs.iterations)});
    out.verdicts.push_back({"nonnegative", !c.solver.clip_negative || min_u >= 0.0, fmt::format("min_u={:.3e}", min_u)});
    out.verdicts.push_back({"level_positive", gs.level > 0.0, fmt::format("level={:.17g}", gs.level)});
    return out;
}

Outcome cmd_sweep(const RunConfig& c) {
    Outcome out;
    const auto prob = c.problem();
    const auto cond = condition_C_check(c.coeffs, c.alpha, c.p, c.n, c.scan);
    const SweepOptions sw{cond.argmin, c.radii, c.localization_R};
    const auto rows = sweep_epsilon(prob, c.eps_list, sw, options_with_center(c, cond.argmin), form_opts(c));
    out.solves = static_cast<int>(rows.size());

    std::vector<std::string> header{"epsilon", "level", "mass_center", "eps_times_center"};
    for (double r : c.radii) header.push_back(fmt::format("frac_r{:g}", r));
    header.push_back("localization_R");
    Csv csv(c.out_dir / "sweep.csv", header);
    Json jrows = Json::array();
    for (const auto& r : rows) {
        std::vector<std::string> cells{g17(r.eps)};
        if (r.u) {
            cells.insert(cells.end(), {g17(r.level), point_csv(r.mass_center, c.n), point_csv(r.eps_center, c.n)});
            for (double f : r.fractions) cells.push_back(g17(f));
            cells.push_back(g17(r.localization));
        } else {
            cells.resize(header.size());
        }
        csv.row(cells);
        jrows.push_back({{"epsilon", r.eps}, {"converged", r.converged}, {"iterations", r.iterations}, {"error", r.error}});
    }
    out.results["xi_star"] = {cond.argmin[0], cond.argmin[1]};
    out.results["condition_C"] = cond.holds;
    out.results["rows"] = jrows;

    const bool all_ok = std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.converged; });
    out.verdicts.push_back({"all_converged", all_ok, fmt::format("{} eps values", rows.size())});
    if (!all_ok) return out;

    const double h = prob.grid.spacing();
    if (cond.holds) {
        for (std::size_t k = 0; k < c.radii.size(); ++k) {
            if (c.radii[k] < h) continue;
            bool nondec = true;
            std::string trail;
            for (std::size_t i = 0; i < rows.size(); ++i) {
                if (i > 0) nondec = nondec && rows[i].fractions[k] >= rows[i - 1].fractions[k];
                trail += (i ? " -> " : "") + fmt::format("{:.6f}", rows[i].fractions[k]);
            }
            out.verdicts.push_back({fmt::format("concentration_r{}", c.radii[k]), nondec, trail});
        }
    }

    const auto fixture = run_oracle(c, out);
    const double eps_min = c.eps_list.back();
    const double lower = comparison_level(prob, eps_min, options_with_center(c, {0.0, 0.0}));
    ++out.solves;
    const double upper = cond.min_value * fixture.D;
    const double level = rows.back().level;
    out.results["D"] = fixture.D;
    out.results["comparison_level"] = lower;
    out.results["min_C_xi"] = upper;
    out.verdicts.push_back({"level_bounds", lower * 0.99 <= level && level <= upper * 1.05,
                            fmt::format("{:.6g} <= {:.6g} <= {:.6g} at eps={}", lower * 0.99, level, upper * 1.05,
                                        eps_min)});
    return out;
}

Outcome cmd_scaling(const RunConfig& c) {
    Outcome out;
    const auto fixture = run_oracle(c, out);
    const auto grid = make_grid(c.n, c.scaling_L, c.scaling_N);
    const auto rep = verify_scaling_law(c.alpha, c.p, c.n, c.qk_pairs, grid, fixture, options_with_center(c, {0.0, 0.0}));
    out.solves += static_cast<int>(rep.rows.size());
    Csv csv(c.out_dir / "scaling.csv", {"Q", "K", "computed_level", "predicted_level", "rel_error"});
    for (const auto& r : rep.rows)
        csv.row({g17(r.Q), g17(r.K), g17(r.computed_level), g17(r.predicted_level), g17(r.rel_error)});
    out.results = {{"D_used", rep.D_used},
                   {"D_extrapolated", rep.D_extrapolated},
                   {"D_error_estimate", fixture.error_estimate},
                   {"same_grid_D", rep.same_grid_D},
                   {"L", rep.L},
                   {"N", rep.N},
                   {"h", rep.h},
                   {"rungs", rungs_json(fixture)}};
    out.verdicts.push_back({"scaling_law_2pct", rep.max_rel_error <= 0.02,
                            fmt::format("max_rel_error={:.4e}", rep.max_rel_error)});
    return out;
}

Outcome cmd_cxi(const RunConfig& c) {
    Outcome out;
    const auto fixture = run_oracle(c, out);
    const auto grid = make_grid(c.n, c.scaling_L, c.scaling_N);
    const auto t = scan_C_xi(c.coeffs, c.alpha, c.p, c.n, c.scan, fixture, c.spot_checks, grid,
                             options_with_center(c, {0.0, 0.0}));
    Csv csv(c.out_dir / "cxi.csv", {"xi", "C_analytic", "C_spotcheck", "rel_error"});
    std::size_t spots = 0;
    for (const auto& r : t.rows) {
        spots += r.C_spotcheck ? 1 : 0;
        csv.row({point_csv(r.xi, c.n), g17(r.C_analytic), r.C_spotcheck ? g17(*r.C_spotcheck) : "",
                 r.rel_error ? g17(*r.rel_error) : ""});
    }
    out.solves += static_cast<int>(spots);
    out.results = {{"argmin", {t.argmin[0], t.argmin[1]}},
                   {"min", t.min_value},
                   {"D_used", reference_D(fixture, grid)},
                   {"max_spot_error", t.max_spot_error}};
    if (spots > 0)
        out.verdicts.push_back({"spot_checks_2pct", t.max_spot_error <= 0.02,
                                fmt::format("{} spot checks, max_rel_error={:.4e}", spots, t.max_spot_error)});
    return out;
}

Outcome cmd_norm(const RunConfig& c) {
    Outcome out;
    std::vector<ProblemSpec> specs;
    for (double e : c.audit_eps) {
        ProblemSpec s = c.problem();
        s.eps = e;
        s.frame = Frame::rescaled;
        s.grid = make_grid(c.n, c.audit_L, c.audit_N);
        specs.push_back(s);
    }
    const auto rep = norm_equivalence_audit(specs, c.audit_samples, c.solver.seed, c.solver.threads);
    Csv csv(c.out_dir / "norm.csv", {"sample", "lhs", "rhs", "ratio", "holds"});
    for (const auto& r : rep.rows)
        csv.row({fmt::format("{}", r.sample), g17(r.lhs), g17(r.rhs), g17(r.ratio), r.holds ? "true" : "false"});
    out.results = {{"worst_ratio", rep.worst_ratio},
                   {"failures", rep.failures},
                   {"constant", norm_equivalence_constant(c.coeffs.a1, c.alpha, c.scope.rho0, c.n)}};
    out.verdicts.push_back({"norm_equivalence", rep.pass,
                            fmt::format("{} samples, {} failures, worst ratio {:.6f}", rep.rows.size(), rep.failures,
                                        rep.worst_ratio)});
    return out;
}

Outcome cmd_oracle(const RunConfig& c) {
    Outcome out;
    const auto f = run_oracle(c, out);
    Csv csv(c.out_dir / "oracle.csv", {"L", "N", "h", "level"});
    for (const auto& r : f.rungs) csv.row({g17(r.L), fmt::format("{}", r.N), g17(r.h), g17(r.level)});
    out.results = {{"D", f.D}, {"error_estimate", f.error_estimate}, {"order", f.order}, {"rungs", rungs_json(f)}};
    const double last_step = std::abs(f.rungs.back().level - f.rungs[f.rungs.size() - 2].level);
    out.verdicts.push_back({"extrapolation_consistent", last_step > f.error_estimate,
                            fmt::format("|l_f - l_c|={:.4e} error_estimate={:.4e}", last_step, f.error_estimate)});
    return out;
}

Outcome dispatch(const std::string& name, const RunConfig& c) {
    if (name == "solve") return cmd_solve(c);
    if (name == "sweep-eps") return cmd_sweep(c);
    if (name == "verify-scaling") return cmd_scaling(c);
    if (name == "scan-cxi") return cmd_cxi(c);
    if (name == "check-norm") return cmd_norm(c);
    if (name == "oracle-d") return cmd_oracle(c);
    throw std::invalid_argument("unknown subcommand '" + name + "'");
}

}  // namespace

const std::vector<std::string>& subcommand_names() {
    static const std::vector<std::string> names{"solve", "sweep-eps", "verify-scaling", "scan-cxi", "check-norm",
                                                "oracle-d"};
    return names;
}

RunConfig apply_flags(RunConfig config, const RunFlags& flags) {
    if (flags.seed) config.solver.seed = *flags.seed;
    if (flags.threads) config.solver.threads = *flags.threads;
    if (flags.out) config.out_dir = *flags.out;
    config.validate();
    return config;
}

std::string error_json(const std::string& command, const std::string& message) {
    return Json{{"command", command}, {"error", message}}.dump(2) + "\n";
}

int run_subcommand(const std::string& name, const RunConfig& config, bool quiet, std::ostream& log) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
        std::error_code ec;
        std::filesystem::create_directories(config.out_dir, ec);
        if (ec) throw std::runtime_error("output path not writable: " + config.out_dir.string());
        const Outcome out = dispatch(name, config);

        Json echo = Json::object();
        for (const auto& [section, keys] : echo_config(config))
            for (const auto& [k, v] : keys) echo[section][k] = v;
        Json verdicts = Json::array();
        bool all_pass = true;
        for (const auto& v : out.verdicts) {
            verdicts.push_back({{"name", v.name}, {"pass", v.pass}, {"detail", v.detail}});
            all_pass = all_pass && v.pass;
        }
        Json summary{{"command", name},
                     {"config_echo", echo},
                     {"verdicts", verdicts},
                     {"timings", {{"solves", out.solves}}},
                     {"results", out.results}};
        write_text(config.out_dir / "summary.json", summary.dump(2) + "\n");
        if (!quiet) {
            for (const auto& v : out.verdicts)
                log << fmt::format("[{}] {}: {}\n", v.pass ? "PASS" : "FAIL", v.name, v.detail);
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            log << fmt::format("{} finished in {:.2f} s\n", name, secs);
        }
        return all_pass ? 0 : 1;
    } catch (const std::exception& e) {
        const std::string text = error_json(name, e.what());
        std::error_code ec;
        if (std::filesystem::is_directory(config.out_dir, ec)) {
            std::ofstream os(config.out_dir / "error.json", std::ios::trunc);
            os << text;
        }
        log << text;
        return 2;
    }
}

}  // namespace nlrs::cli
