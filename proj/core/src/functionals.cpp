#include "nlrs/functionals.hpp"

#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <stdexcept>

namespace nlrs {

void validate_exponents(double alpha, int n, double p) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument(fmt::format("alpha={} outside (0,1)", alpha));
    if (n != 1 && n != 2) throw std::invalid_argument(fmt::format("unsupported dimension n={}", n));
    if (!(n > 2.0 * alpha)) throw std::invalid_argument("n > 2α violated");
    const double upper = (n + 2.0 * alpha) / (n - 2.0 * alpha);
    if (!(p > 1.0 && p < upper))
        throw std::invalid_argument(fmt::format("p={:.10g} violates 1<p<(n+2α)/(n−2α)={:.10g}", p, upper));
}

void ProblemSpec::validate() const {
    validate_exponents(alpha, n, p);
    if (!(eps > 0.0)) throw std::invalid_argument("epsilon must be positive");
    if (grid.dim() != n) throw std::invalid_argument("grid dimension does not match n");
    scope.validate(n);
    coeffs.validate(n);
}

void ConstCoeffProblem::validate() const {
    validate_exponents(alpha, n, p);
    if (!(Q > 0.0) || !(K > 0.0)) throw std::invalid_argument("constant coefficients Q and K must be positive");
    if (grid.dim() != n) throw std::invalid_argument("grid dimension does not match n");
}

EnergyModel make_model(const ProblemSpec& problem) {
    problem.validate();
    EnergyModel m;
    m.grid = problem.grid;
    m.p = problem.p;
    m.prefactor = problem.frame == Frame::original ? std::pow(problem.eps, 2.0 * problem.alpha) : 1.0;
    const double s = problem.frame == Frame::rescaled ? problem.eps : 1.0;
    const std::size_t M = problem.grid.size();
    m.Q.resize(M);
    m.K.resize(M);
    for (std::size_t i = 0; i < M; ++i) {
        const Point x = problem.grid.coordinate(i);
        const Point y{s * x[0], s * x[1]};
        m.Q[i] = problem.coeffs.Q(y, problem.n);
        m.K[i] = problem.coeffs.K(y, problem.n);
    }
    return m;
}

EnergyModel make_model(const ConstCoeffProblem& problem) {
    problem.validate();
    EnergyModel m;
    m.grid = problem.grid;
    m.p = problem.p;
    m.prefactor = 1.0;
    m.Q.assign(problem.grid.size(), problem.Q);
    m.K.assign(problem.grid.size(), problem.K);
    return m;
}

QuadForm assemble_problem_form(const ProblemSpec& problem, const FormOptions& options) {
    problem.validate();
    if (problem.scope.kind == ScopeSpec::Kind::infinite)
        return assemble_full_form(problem.grid, problem.alpha, true, options);
    return assemble_regional_form(problem.grid, make_scope_field(problem.scope, problem.n, problem.eps, problem.frame),
                                  problem.alpha, options);
}

QuadForm assemble_problem_form(const ConstCoeffProblem& problem, const FormOptions& options) {
    problem.validate();
    return assemble_full_form(problem.grid, problem.alpha, true, options);
}

namespace {

void check_grids(const EnergyModel& model, const QuadForm& A, const Field& u) {
    if (u.grid() != model.grid || A.grid() != model.grid) throw std::invalid_argument("grid mismatch");
}

struct Parts {
    double quadratic;
    double potential;
    double nonlinear;
};

Parts parts(const EnergyModel& model, const QuadForm& A, const Field& u) {
    check_grids(model, A, u);
    const double hn = model.grid.cell_volume();
    Parts r{model.prefactor * quad_energy(A, u), 0.0, 0.0};
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double a = std::abs(u[i]);
        r.potential += hn * model.Q[i] * a * a;
        r.nonlinear += hn * model.K[i] * std::pow(a, model.p + 1.0);
    }
    return r;
}

double checked_norm_ratio(const Parts& q) {
    const double norm2 = q.quadratic + q.potential;
    if (norm2 == 0.0) throw std::invalid_argument("zero field has no Nehari projection");
    if (!(q.nonlinear > 0.0)) throw std::invalid_argument("vanishing nonlinear integral");
    return norm2 / q.nonlinear;
}

}  // namespace

EnergyReport energy(const EnergyModel& model, const QuadForm& A, const Field& u) {
    const Parts q = parts(model, A, u);
    EnergyReport r;
    r.quadratic = q.quadratic;
    r.potential = q.potential;
    r.nonlinear = q.nonlinear;
    r.total = 0.5 * (q.quadratic + q.potential) - q.nonlinear / (model.p + 1.0);
    return r;
}

Field gradient(const EnergyModel& model, const QuadForm& A, const Field& u) {
    check_grids(model, A, u);
    const double hn = model.grid.cell_volume();
    std::vector<double> g(u.size());
    apply_form(A, u.values(), g);
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double v = u[i];
        g[i] = model.prefactor * g[i] / hn + model.Q[i] * v - model.K[i] * std::pow(std::abs(v), model.p - 1.0) * v;
    }
    return Field(u.grid(), std::move(g));
}

double nehari_t(const EnergyModel& model, const QuadForm& A, const Field& u) {
    return std::pow(checked_norm_ratio(parts(model, A, u)), 1.0 / (model.p - 1.0));
}

double level_from_field(const EnergyModel& model, const QuadForm& A, const Field& u) {
    const Parts q = parts(model, A, u);
    checked_norm_ratio(q);
    const double p = model.p;
    const double norm2 = q.quadratic + q.potential;
    return (0.5 - 1.0 / (p + 1.0)) * std::pow(norm2, (p + 1.0) / (p - 1.0)) / std::pow(q.nonlinear, 2.0 / (p - 1.0));
}

double nehari_residual(const EnergyModel& model, const QuadForm& A, const Field& u) {
    const Parts q = parts(model, A, u);
    return std::abs(q.quadratic + q.potential - q.nonlinear);
}

ScalingExponents scaling_exponents(double alpha, double p, int n) {
    return {(p + 1.0) / (p - 1.0) - n / (2.0 * alpha), 2.0 / (p - 1.0)};
}

double scaling_factor(double Q, double K, double alpha, double p, int n) {
    const auto e = scaling_exponents(alpha, p, n);
    return std::pow(Q, e.theta) / std::pow(K, e.sigma);
}

double c_of_xi(const Point& xi, const CoeffSpec& coeffs, double alpha, double p, int n, double D) {
    if (!(D > 0.0)) throw std::invalid_argument("reference level D must be positive");
    return scaling_factor(coeffs.Q(xi, n), coeffs.K(xi, n), alpha, p, n) * D;
}

std::vector<Point> scan_points(int n, const ScanOptions& options) {
    if (options.points < 2) throw std::invalid_argument("scan needs at least 2 points");
    const double S = options.half_width;
    const double step = 2.0 * S / static_cast<double>(options.points - 1);
    std::vector<Point> pts;
    pts.reserve(n == 1 ? options.points : options.points * options.points);
    for (std::size_t a = 0; a < options.points; ++a) {
        const double x0 = -S + static_cast<double>(a) * step;
        if (n == 1) {
            pts.push_back({x0, 0.0});
            continue;
        }
        for (std::size_t b = 0; b < options.points; ++b) pts.push_back({x0, -S + static_cast<double>(b) * step});
    }
    return pts;
}

ConditionCReport condition_C_check(const CoeffSpec& coeffs, double alpha, double p, int n,
                                   const ScanOptions& options) {
    ConditionCReport r;
    r.min_value = std::numeric_limits<double>::infinity();
    for (const Point& xi : scan_points(n, options)) {
        const double v = scaling_factor(coeffs.Q(xi, n), coeffs.K(xi, n), alpha, p, n);
        if (v < r.min_value) {
            r.min_value = v;
            r.argmin = xi;
        }
    }
    r.limit_value = scaling_factor(coeffs.Q_inf(), coeffs.K_inf(), alpha, p, n);
    r.margin = r.limit_value - r.min_value;
    r.holds = r.margin > 0.0;
    return r;
}

}  // namespace nlrs
