#include "nlrs/solver.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fmt/format.h>
#include <limits>
#include <random>
#include <stdexcept>

#include "nlrs/parallel.hpp"

namespace nlrs {

void SolverOptions::validate() const {
    if (max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
    if (!(tol_g > 0.0) || !(tol_c_rel > 0.0)) throw std::invalid_argument("tolerances must be positive");
    if (!(initial_step > 0.0)) throw std::invalid_argument("initial_step must be positive");
    if (memory < 1) throw std::invalid_argument("memory must be at least 1");
    if (max_backtracks < 1) throw std::invalid_argument("max_backtracks must be at least 1");
    if (!(width > 0.0) || !(amplitude > 0.0)) throw std::invalid_argument("initial width and amplitude must be positive");
    if (centers.empty()) throw std::invalid_argument("at least one initial center is required");
    if (restarts < 0) throw std::invalid_argument("restarts must be nonnegative");
    if (threads < 1) throw std::invalid_argument("threads must be at least 1");
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct State {
    std::vector<double> u;
    std::vector<double> Au;
    double norm2 = 0.0;
    double nonlinear = 0.0;
    /// log M(u); +inf when u is degenerate.
    double F = kInf;
};

class Descent {
public:
    Descent(const EnergyModel& model, const QuadForm& A, const SolverOptions& opt)
        : m_(model), A_(A), opt_(opt), hn_(model.grid.cell_volume()), p_(model.p),
          a_((p_ + 1.0) / (p_ - 1.0)), b_(2.0 / (p_ - 1.0)), c_(0.5 - 1.0 / (p_ + 1.0)) {}

    void evaluate(State& s) const {
        const std::size_t M = s.u.size();
        s.Au.resize(M);
        apply_form(A_, s.u, s.Au);
        double quad = 0.0, pot = 0.0, nl = 0.0;
        for (std::size_t i = 0; i < M; ++i) {
            const double v = s.u[i];
            const double a = std::abs(v);
            quad += v * s.Au[i];
            pot += m_.Q[i] * v * v;
            nl += m_.K[i] * std::pow(a, p_ + 1.0);
        }
        s.norm2 = m_.prefactor * quad + hn_ * pot;
        s.nonlinear = hn_ * nl;
        s.F = (s.norm2 > 0.0 && s.nonlinear > 0.0 && std::isfinite(s.norm2) && std::isfinite(s.nonlinear))
                  ? a_ * std::log(s.norm2) - b_ * std::log(s.nonlinear)
                  : kInf;
    }

    void quotient_gradient(const State& s, std::vector<double>& g) const {
        g.resize(s.u.size());
        const double cq = 2.0 * a_ / s.norm2;
        const double cn = b_ * (p_ + 1.0) / s.nonlinear;
        for (std::size_t i = 0; i < s.u.size(); ++i) {
            const double v = s.u[i];
            const double dq = m_.prefactor * s.Au[i] / hn_ + m_.Q[i] * v;
            const double dn = m_.K[i] * std::pow(std::abs(v), p_ - 1.0) * v;
            g[i] = cq * dq - cn * dn;
        }
    }

    double projection_t(const State& s) const { return std::pow(s.norm2 / s.nonlinear, 1.0 / (p_ - 1.0)); }

    /// L^2 norm of the energy gradient at t u.
    double energy_gradient_norm(const State& s) const {
        const double t = projection_t(s);
        const double tp = std::pow(t, p_);
        double acc = 0.0;
        for (std::size_t i = 0; i < s.u.size(); ++i) {
            const double v = s.u[i];
            const double g = t * (m_.prefactor * s.Au[i] / hn_ + m_.Q[i] * v) -
                             tp * m_.K[i] * std::pow(std::abs(v), p_ - 1.0) * v;
            acc += g * g;
        }
        return std::sqrt(hn_ * acc);
    }

    double nehari_residual(const State& s) const {
        const double t = projection_t(s);
        return std::abs(t * t * s.norm2 - std::pow(t, p_ + 1.0) * s.nonlinear);
    }

    double level(const State& s) const { return c_ * std::exp(s.F); }

    void clip(std::vector<double>& u) const {
        if (!opt_.clip_negative) return;
        for (double& v : u) v = std::max(v, 0.0);
    }

    GroundState run(std::vector<double> u0, int restart_index) const {
        State cur;
        cur.u = std::move(u0);
        clip(cur.u);
        evaluate(cur);
        if (!std::isfinite(cur.F)) {
            cur.u = perturbed_gaussian(restart_index);
            evaluate(cur);
            if (!std::isfinite(cur.F)) throw std::runtime_error("degenerate initial guess (vanishing nonlinear integral)");
        }

        GroundState out{.u = Field::zeros(m_.grid)};
        out.restart_index = restart_index;
        std::deque<double> recent{cur.F};
        std::vector<double> g, g_new;
        quotient_gradient(cur, g);
        State best = cur;
        double step = opt_.initial_step;
        State trial;
        int k = 0;
        for (;; ++k) {
            const double gn = energy_gradient_norm(cur);
            const double res = nehari_residual(cur);
            const double lev = level(cur);
            if (opt_.record_history) out.history.push_back({k, std::exp(cur.F), lev, gn, step});
            if (gn <= opt_.tol_g && res <= opt_.tol_c_rel * lev) {
                out.converged = true;
                break;
            }
            if (k >= opt_.max_iters) {
                out.message = "iteration limit reached";
                break;
            }
            const double ref = *std::max_element(recent.begin(), recent.end());
            bool accepted = false;
            double tau = step;
            for (int b = 0; b < opt_.max_backtracks; ++b, tau *= 0.5) {
                trial.u.resize(cur.u.size());
                for (std::size_t i = 0; i < cur.u.size(); ++i) trial.u[i] = cur.u[i] - tau * g[i];
                clip(trial.u);
                evaluate(trial);
                if (trial.F <= ref) {
                    accepted = true;
                    break;
                }
            }
            if (!accepted) {
                out.message = "line search failed";
                break;
            }
            quotient_gradient(trial, g_new);
            double sy = 0.0, ss = 0.0;
            for (std::size_t i = 0; i < cur.u.size(); ++i) {
                const double si = trial.u[i] - cur.u[i];
                ss += si * si;
                sy += si * (g_new[i] - g[i]);
            }
            step = sy > 0.0 ? ss / sy : 2.0 * tau;
            step = std::clamp(step, 1e-12, 1e12);
            std::swap(cur, trial);
            std::swap(g, g_new);
            if (cur.F < best.F) best = cur;
            recent.push_back(cur.F);
            if (static_cast<int>(recent.size()) > opt_.memory) recent.pop_front();
        }
        const State& fin = out.converged ? cur : best;
        out.iterations = k;
        out.quotient = std::exp(fin.F);
        out.level = level(fin);
        out.gradient_norm = energy_gradient_norm(fin);
        out.nehari_residual = nehari_residual(fin);
        const double t = projection_t(fin);
        std::vector<double> v(fin.u.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = t * fin.u[i];
        out.u = Field(m_.grid, std::move(v));
        return out;
    }

    std::vector<double> gaussian(const Point& c) const {
        Profile pr{Profile::Kind::gaussian, c, opt_.width, opt_.amplitude};
        return std::move(sample_profile(m_.grid, pr)).release();
    }

    std::vector<double> perturbed_gaussian(int restart_index) const {
        std::mt19937_64 rng(opt_.seed + static_cast<std::uint64_t>(restart_index));
        std::normal_distribution<double> noise(0.0, 0.1);
        const Point& c = opt_.centers[static_cast<std::size_t>(restart_index) % opt_.centers.size()];
        auto u = gaussian(c);
        for (double& v : u) v = std::abs(v * (1.0 + noise(rng)));
        return u;
    }

private:
    const EnergyModel& m_;
    const QuadForm& A_;
    const SolverOptions& opt_;
    double hn_, p_, a_, b_, c_;
};

GroundState pick_best(std::vector<std::optional<GroundState>>& runs, const std::vector<std::string>& errors) {
    int best = -1;
    for (std::size_t r = 0; r < runs.size(); ++r) {
        if (!runs[r]) continue;
        if (best < 0) {
            best = static_cast<int>(r);
            continue;
        }
        const auto& a = *runs[r];
        const auto& b = *runs[static_cast<std::size_t>(best)];
        if ((a.converged && !b.converged) || (a.converged == b.converged && a.level < b.level)) best = static_cast<int>(r);
    }
    if (best < 0) throw std::runtime_error("all restarts failed: " + errors.front());
    return std::move(*runs[static_cast<std::size_t>(best)]);
}

GroundState solve_from(const EnergyModel& model, const QuadForm& A, const SolverOptions& options,
                       std::vector<std::vector<double>> starts) {
    options.validate();
    if (A.grid() != model.grid) throw std::invalid_argument("grid mismatch");
    const Descent d(model, A, options);
    std::vector<std::optional<GroundState>> runs(starts.size());
    std::vector<std::string> errors(starts.size());
    parallel_for(starts.size(), options.threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) {
            try {
                runs[r] = d.run(std::move(starts[r]), static_cast<int>(r));
            } catch (const std::exception& e) {
                errors[r] = e.what();
            }
        }
    });
    return pick_best(runs, errors);
}

}  // namespace

GroundState solve_ground_state(const EnergyModel& model, const QuadForm& A, const SolverOptions& options) {
    options.validate();
    const Descent d(model, A, options);
    std::vector<std::vector<double>> starts;
    for (const Point& c : options.centers) starts.push_back(d.gaussian(c));
    for (int r = 0; r < options.restarts; ++r)
        starts.push_back(d.perturbed_gaussian(static_cast<int>(options.centers.size()) + r));
    return solve_from(model, A, options, std::move(starts));
}

GroundState solve_ground_state(const EnergyModel& model, const QuadForm& A, const SolverOptions& options,
                               const std::vector<Field>& initial) {
    if (initial.empty()) throw std::invalid_argument("no initial fields given");
    std::vector<std::vector<double>> starts;
    for (const Field& f : initial) {
        if (f.grid() != model.grid) throw std::invalid_argument("initial field grid mismatch");
        starts.emplace_back(f.values().begin(), f.values().end());
    }
    return solve_from(model, A, options, std::move(starts));
}

std::optional<double> OracleDResult::level_on(const Grid& grid) const {
    for (const auto& r : rungs)
        if (r.L == grid.half_width() && r.N == grid.points_per_dim()) return r.level;
    return std::nullopt;
}

OracleDResult oracle_D(double alpha, double p, int n, const std::vector<LadderRung>& ladder,
                       const SolverOptions& options) {
    validate_exponents(alpha, n, p);
    if (ladder.size() < 2) throw std::invalid_argument("refinement ladder must be strictly increasing");
    for (std::size_t i = 1; i < ladder.size(); ++i) {
        if (ladder[i].N <= ladder[i - 1].N) throw std::invalid_argument("refinement ladder must be strictly increasing");
        if (ladder[i].L != ladder[0].L) throw std::invalid_argument("refinement ladder must share one half-width L");
    }
    OracleDResult r;
    r.order = 2.0 - 2.0 * alpha;
    for (const auto& rung : ladder) {
        ConstCoeffProblem prob{1.0, 1.0, alpha, p, n, make_grid(n, rung.L, rung.N)};
        const auto A = assemble_problem_form(prob, FormOptions{.threads = options.threads});
        const auto model = make_model(prob);
        const auto gs = solve_ground_state(model, A, options);
        if (!gs.converged)
            throw std::runtime_error(fmt::format("solver did not converge on rung L={} N={}: {}", rung.L, rung.N,
                                                 gs.message));
        r.rungs.push_back({rung.L, rung.N, prob.grid.spacing(), gs.level, gs.iterations});
    }
    const auto& c = r.rungs[r.rungs.size() - 2];
    const auto& f = r.rungs.back();
    const double ratio = std::pow(c.h / f.h, r.order);
    r.D = f.level + (f.level - c.level) / (ratio - 1.0);
    r.error_estimate = std::abs(r.D - f.level);
    return r;
}

namespace {

// Multilinear interpolation of u at x (zero outside the box).
double interpolate(const Field& u, const Point& x) {
    const Grid& g = u.grid();
    const int n = g.dim();
    const double L = g.half_width(), h = g.spacing();
    const long N = static_cast<long>(g.points_per_dim());
    long base[2] = {0, 0};
    double frac[2] = {0.0, 0.0};
    for (int d = 0; d < n; ++d) {
        const double s = (x[static_cast<std::size_t>(d)] + L) / h;
        if (s < 0.0 || s > static_cast<double>(N - 1)) return 0.0;
        base[d] = std::min(static_cast<long>(std::floor(s)), N - 2);
        frac[d] = s - static_cast<double>(base[d]);
    }
    double acc = 0.0;
    const int corners = n == 1 ? 2 : 4;
    for (int c = 0; c < corners; ++c) {
        double w = 1.0;
        std::array<std::size_t, 2> idx{0, 0};
        for (int d = 0; d < n; ++d) {
            const int bit = (c >> d) & 1;
            w *= bit ? frac[d] : 1.0 - frac[d];
            idx[static_cast<std::size_t>(d)] = static_cast<std::size_t>(base[d] + bit);
        }
        if (w != 0.0) acc += w * u[g.flat_index(idx)];
    }
    return acc;
}

// Rescaled-frame warm start: v_new(x) = v_old(x * eps_new / eps_old).
Field rescale(const Field& v, double ratio) {
    const Grid& g = v.grid();
    std::vector<double> out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Point x = g.coordinate(i);
        out[i] = interpolate(v, {x[0] * ratio, x[1] * ratio});
    }
    return Field(g, std::move(out));
}

}  // namespace

std::vector<SweepRecord> sweep_epsilon(const ProblemSpec& family, const std::vector<double>& eps_list,
                                       const SweepOptions& sweep, const SolverOptions& options,
                                       const FormOptions& form_options) {
    if (eps_list.empty()) throw std::invalid_argument("epsilon list is empty");
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        if (!(eps_list[i] > 0.0)) throw std::invalid_argument("epsilon must be positive");
        if (i > 0 && !(eps_list[i] < eps_list[i - 1])) throw std::invalid_argument("epsilon list must be descending");
    }
    for (double r : sweep.radii)
        if (!(r > 0.0)) throw std::invalid_argument("ball radii must be positive");
    if (!(sweep.localization_R > 0.0)) throw std::invalid_argument("localization radius must be positive");
    options.validate();

    const bool original = family.frame == Frame::original;
    const int n = family.n;
    std::optional<QuadForm> form;
    std::optional<Field> previous;
    double previous_eps = 0.0;
    std::vector<SweepRecord> out;
    for (double eps : eps_list) {
        SweepRecord rec;
        rec.eps = eps;
        try {
            ProblemSpec prob = family;
            prob.eps = eps;
            if (!original || !form) form.emplace(assemble_problem_form(prob, form_options));
            const auto model = make_model(prob);
            const double s = original ? 1.0 : 1.0 / eps;
            std::vector<Field> init;
            if (previous) {
                init.push_back(original ? *previous : rescale(*previous, eps / previous_eps));
            } else {
                const Point c0{sweep.xi_star[0] * s, sweep.xi_star[1] * s};
                init.push_back(
                    sample_profile(prob.grid, Profile{Profile::Kind::gaussian, c0, options.width, options.amplitude}));
            }
            const auto gs = solve_ground_state(model, *form, options, init);
            const double en = std::pow(eps, n);
            rec.frame_level = gs.level;
            rec.level = original ? gs.level / en : gs.level;
            const Point c = mass_center(gs.u);
            const double to_rescaled = original ? 1.0 / eps : 1.0;
            rec.mass_center = {c[0] * to_rescaled, c[1] * to_rescaled};
            rec.eps_center = {eps * rec.mass_center[0], eps * rec.mass_center[1]};
            const Point xi_frame{sweep.xi_star[0] * s, sweep.xi_star[1] * s};
            for (double r : sweep.radii) rec.fractions.push_back(mass_in_ball(gs.u, xi_frame, r * s));
            rec.localization = original ? localization_profile(gs.u, eps * sweep.localization_R) / en
                                        : localization_profile(gs.u, sweep.localization_R);
            rec.converged = gs.converged;
            rec.iterations = gs.iterations;
            rec.gradient_norm = gs.gradient_norm;
            if (!gs.converged) rec.error = gs.message;
            previous = gs.u;
            previous_eps = eps;
            rec.u = gs.u;
        } catch (const std::exception& e) {
            rec.error = e.what();
        }
        out.push_back(std::move(rec));
    }
    return out;
}

}  // namespace nlrs
