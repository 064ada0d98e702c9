#include "nlrs/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>

#include "nlrs/parallel.hpp"

namespace nlrs {

double reference_D(const OracleDResult& fixture, const Grid& grid) {
    if (auto l = fixture.level_on(grid)) return *l;
    return fixture.D;
}

ScalingReport verify_scaling_law(double alpha, double p, int n, const std::vector<std::pair<double, double>>& QK,
                                 const Grid& grid, const OracleDResult& fixture, const SolverOptions& options) {
    validate_exponents(alpha, n, p);
    if (grid.dim() != n) throw std::invalid_argument("grid dimension does not match n");
    if (QK.empty()) throw std::invalid_argument("no (Q,K) pairs given");
    ScalingReport rep;
    rep.D_extrapolated = fixture.D;
    rep.same_grid_D = fixture.level_on(grid).has_value();
    rep.D_used = reference_D(fixture, grid);
    rep.L = grid.half_width();
    rep.N = grid.points_per_dim();
    rep.h = grid.spacing();

    const auto A = assemble_full_form(grid, alpha, true, FormOptions{.threads = options.threads});
    std::vector<std::optional<GroundState>> states(QK.size());
    SolverOptions inner = options;
    inner.threads = 1;
    parallel_for(QK.size(), options.threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
            ConstCoeffProblem prob{QK[k].first, QK[k].second, alpha, p, n, grid};
            states[k] = solve_ground_state(make_model(prob), A, inner);
        }
    });
    for (std::size_t k = 0; k < QK.size(); ++k) {
        const auto& gs = *states[k];
        const auto [Q, K] = QK[k];
        if (!gs.converged)
            throw std::runtime_error(fmt::format("solver did not converge for (Q,K)=({},{}): {}", Q, K, gs.message));
        ScalingRow row{Q, K, gs.level, scaling_factor(Q, K, alpha, p, n) * rep.D_used, 0.0, gs.iterations};
        row.rel_error = std::abs(row.computed_level - row.predicted_level) / row.predicted_level;
        rep.max_rel_error = std::max(rep.max_rel_error, row.rel_error);
        rep.rows.push_back(row);
    }
    return rep;
}

ConcentrationReport concentration_sweep(const ProblemSpec& family, const std::vector<double>& eps_list,
                                        const std::vector<double>& radii, double localization_R,
                                        const SolverOptions& options, const ScanOptions& scan) {
    ConcentrationReport rep;
    rep.condition = condition_C_check(family.coeffs, family.alpha, family.p, family.n, scan);
    if (!rep.condition.holds) throw std::invalid_argument("no strict concentration gap");
    if (radii.empty()) throw std::invalid_argument("no ball radii given");
    rep.xi_star = rep.condition.argmin;
    rep.radii = radii;

    ProblemSpec fam = family;
    fam.frame = Frame::original;
    SweepOptions sw{rep.xi_star, radii, localization_R};
    rep.rows = sweep_epsilon(fam, eps_list, sw, options, FormOptions{.threads = options.threads});

    const bool all_ok = std::all_of(rep.rows.begin(), rep.rows.end(), [](const auto& r) { return r.error.empty(); });
    for (std::size_t k = 0; k < radii.size(); ++k) {
        bool nondec = all_ok, strict = all_ok;
        for (std::size_t i = 1; all_ok && i < rep.rows.size(); ++i) {
            const double a = rep.rows[i - 1].fractions[k], b = rep.rows[i].fractions[k];
            nondec = nondec && b >= a;
            strict = strict && b > a;
        }
        rep.nondecreasing.push_back(nondec);
        rep.strictly_increasing.push_back(strict);
    }
    return rep;
}

double comparison_level(const ProblemSpec& family, double eps, const SolverOptions& options) {
    ProblemSpec cmp = family;
    cmp.eps = eps;
    if (family.scope.kind != ScopeSpec::Kind::infinite) {
        // Constant scope rho0 in the rescaled frame; eps*rho0 in original coordinates.
        cmp.scope = ScopeSpec{ScopeSpec::Kind::constant, eps * family.scope.rho0, eps * family.scope.rho0, 1.0};
    }
    cmp.coeffs.Q = CoeffProfile::constant(family.coeffs.a1);
    cmp.coeffs.K = CoeffProfile::constant(family.coeffs.a2);
    const auto A = assemble_problem_form(cmp, FormOptions{.threads = options.threads});
    const auto gs = solve_ground_state(make_model(cmp), A, options);
    if (!gs.converged) throw std::runtime_error("comparison problem did not converge: " + gs.message);
    return cmp.frame == Frame::original ? gs.level / std::pow(eps, cmp.n) : gs.level;
}

CxiTable scan_C_xi(const CoeffSpec& coeffs, double alpha, double p, int n, const ScanOptions& scan,
                   const OracleDResult& fixture, const std::vector<Point>& spot_checks, const Grid& solver_grid,
                   const SolverOptions& options) {
    validate_exponents(alpha, n, p);
    const double D = reference_D(fixture, solver_grid);
    const auto pts = scan_points(n, scan);
    CxiTable t;
    t.min_value = std::numeric_limits<double>::infinity();
    for (const Point& xi : pts) {
        const double c = c_of_xi(xi, coeffs, alpha, p, n, D);
        t.rows.push_back({xi, c, std::nullopt, std::nullopt});
        if (c < t.min_value) {
            t.min_value = c;
            t.argmin = xi;
        }
    }
    if (spot_checks.empty()) return t;

    std::map<std::size_t, int> snapped;
    for (const Point& s : spot_checks) {
        std::size_t best = 0;
        double bd = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const double d = distance(pts[i], s, n);
            if (d < bd) {
                bd = d;
                best = i;
            }
        }
        snapped.emplace(best, 0);
    }
    std::vector<std::size_t> idx;
    for (const auto& kv : snapped) idx.push_back(kv.first);

    const auto A = assemble_full_form(solver_grid, alpha, true, FormOptions{.threads = options.threads});
    std::vector<double> levels(idx.size());
    std::vector<std::string> failures(idx.size());
    SolverOptions inner = options;
    inner.threads = 1;
    parallel_for(idx.size(), options.threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
            const Point& xi = pts[idx[k]];
            ConstCoeffProblem prob{coeffs.Q(xi, n), coeffs.K(xi, n), alpha, p, n, solver_grid};
            const auto gs = solve_ground_state(make_model(prob), A, inner);
            levels[k] = gs.level;
            if (!gs.converged) failures[k] = gs.message;
        }
    });
    for (std::size_t k = 0; k < idx.size(); ++k) {
        if (!failures[k].empty())
            throw std::runtime_error(fmt::format("spot check at xi={} did not converge: {}", pts[idx[k]][0], failures[k]));
        auto& row = t.rows[idx[k]];
        row.C_spotcheck = levels[k];
        row.rel_error = std::abs(levels[k] - row.C_analytic) / row.C_analytic;
        t.max_spot_error = std::max(t.max_spot_error, *row.rel_error);
    }
    return t;
}

Field smooth_once(const Field& u) {
    const Grid& g = u.grid();
    const int n = g.dim();
    const std::size_t N = g.points_per_dim();
    std::vector<double> out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        const auto mi = g.multi_index(i);
        double s = u[i];
        for (int d = 0; d < n; ++d) {
            for (int dir : {-1, 1}) {
                auto j = mi;
                const auto k = static_cast<long>(mi[static_cast<std::size_t>(d)]) + dir;
                if (k < 0 || k >= static_cast<long>(N)) continue;
                j[static_cast<std::size_t>(d)] = static_cast<std::size_t>(k);
                s += u[g.flat_index(j)];
            }
        }
        out[i] = s / (1.0 + 2.0 * n);
    }
    return Field(g, std::move(out));
}

AuditReport norm_equivalence_audit(const std::vector<ProblemSpec>& specs, std::size_t samples, std::uint64_t seed,
                                   int threads) {
    if (samples < 1) throw std::invalid_argument("sample count must be at least 1");
    if (specs.empty()) throw std::invalid_argument("no audit specs given");

    struct Prepared {
        QuadForm regional;
        QuadForm full;
        Field Q;
        double a1;
        double alpha;
        double rho0;
    };
    std::vector<Prepared> prep;
    for (const ProblemSpec& s : specs) {
        if (s.scope.kind == ScopeSpec::Kind::infinite) throw std::invalid_argument("audit needs a finite scope");
        ProblemSpec r = s;
        r.frame = Frame::rescaled;
        auto model = make_model(r);
        prep.push_back({assemble_problem_form(r, FormOptions{.threads = threads}),
                        assemble_full_form(r.grid, r.alpha, true, FormOptions{.threads = threads}),
                        Field(r.grid, std::move(model.Q)), r.coeffs.a1, r.alpha, r.scope.rho0});
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<Field> fields;
    fields.reserve(samples);
    for (std::size_t s = 0; s < samples; ++s) {
        const Grid& g = specs[s % specs.size()].grid;
        for (;;) {
            std::vector<double> v(g.size());
            for (double& x : v) x = normal(rng);
            Field f = smooth_once(Field(g, std::move(v)));
            if (std::any_of(f.values().begin(), f.values().end(), [](double x) { return x != 0.0; })) {
                fields.push_back(std::move(f));
                break;
            }
        }
    }

    AuditReport rep;
    rep.rows.resize(samples);
    parallel_for(samples, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t s = begin; s < end; ++s) {
            const std::size_t k = s % specs.size();
            const auto& P = prep[k];
            const auto r = check_norm_equivalence(fields[s], P.regional, P.full, P.Q, P.a1, P.alpha, P.rho0);
            rep.rows[s] = {s, k, r.lhs, r.rhs, r.lhs / r.rhs, r.holds};
        }
    });
    for (const auto& row : rep.rows) {
        rep.worst_ratio = std::max(rep.worst_ratio, row.ratio);
        if (!row.holds) ++rep.failures;
    }
    rep.pass = rep.failures == 0;
    return rep;
}

}  // namespace nlrs
