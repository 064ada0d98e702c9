#include "nlrs/coefficients.hpp"

#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace nlrs {

Frame frame_from_name(const std::string& name) {
    if (name == "original") return Frame::original;
    if (name == "rescaled") return Frame::rescaled;
    throw std::invalid_argument("unknown frame '" + name + "' (expected original or rescaled)");
}

std::string to_string(Frame frame) { return frame == Frame::original ? "original" : "rescaled"; }

namespace {

double norm2(const Point& x, int n) {
    double s = 0.0;
    for (int d = 0; d < n; ++d) s += x[d] * x[d];
    return s;
}

// Points used to spot-check hypotheses on R^n: radii up to 1e4 in a few directions.
std::vector<Point> sample_points(int n) {
    std::vector<Point> pts;
    const double radii[] = {0.0, 0.1, 0.25, 0.5, 1.0, 2.0, 3.0, 5.0, 10.0, 20.0, 50.0, 100.0, 1e3, 1e4};
    const int directions = n == 1 ? 2 : 8;
    for (double r : radii) {
        for (int k = 0; k < directions; ++k) {
            const double phi = 2.0 * std::numbers::pi * k / directions;
            if (n == 1)
                pts.push_back({k == 0 ? r : -r, 0.0});
            else
                pts.push_back({r * std::cos(phi), r * std::sin(phi)});
        }
    }
    return pts;
}

}  // namespace

ScopeSpec::Kind ScopeSpec::kind_from_name(const std::string& name) {
    if (name == "constant") return Kind::constant;
    if (name == "saturating") return Kind::saturating;
    if (name == "infinite") return Kind::infinite;
    throw std::invalid_argument("unknown scope kind '" + name + "'");
}

double ScopeSpec::operator()(const Point& x, int n) const {
    switch (kind) {
    case Kind::constant:
        return rho0;
    case Kind::saturating:
        return rho_inf - (rho_inf - rho0) / (1.0 + norm2(x, n) / (width * width));
    case Kind::infinite:
        break;
    }
    return std::numeric_limits<double>::infinity();
}

double ScopeSpec::upper_bound() const {
    switch (kind) {
    case Kind::constant:
        return rho0;
    case Kind::saturating:
        return rho_inf;
    case Kind::infinite:
        break;
    }
    return std::numeric_limits<double>::infinity();
}

std::string ScopeSpec::describe() const {
    switch (kind) {
    case Kind::constant:
        return fmt::format("constant(rho0={:.17g})", rho0);
    case Kind::saturating:
        return fmt::format("saturating(rho0={:.17g},rho_inf={:.17g},width={:.17g})", rho0, rho_inf, width);
    case Kind::infinite:
        break;
    }
    return "infinite";
}

void ScopeSpec::validate(int n) const {
    if (kind == Kind::infinite) return;
    if (!(rho0 > 0.0)) throw std::invalid_argument(fmt::format("(H1) violated: rho0={} must be positive", rho0));
    if (kind == Kind::constant) return;
    if (!(rho_inf > rho0))
        throw std::invalid_argument(fmt::format("(H1) violated: need rho0={} < rho_inf={}", rho0, rho_inf));
    if (!(width > 0.0)) throw std::invalid_argument("scope width must be positive");
    for (const Point& x : sample_points(n)) {
        const double r = (*this)(x, n);
        if (r < rho0 || r >= rho_inf)
            throw std::invalid_argument(fmt::format("(H1) violated: rho={} at |x|={} outside [rho0, rho_inf)", r,
                                                    std::sqrt(norm2(x, n))));
    }
}

double eval_scope(const ScopeSpec& spec, const Point& x, int n, double eps, Frame frame) {
    if (!(eps > 0.0)) throw std::invalid_argument("epsilon must be positive");
    if (frame == Frame::original) return spec(x, n);
    Point y{eps * x[0], eps * x[1]};
    return spec(y, n) / eps;
}

ScopeField make_scope_field(const ScopeSpec& spec, int n, double eps, Frame frame) {
    if (!(eps > 0.0)) throw std::invalid_argument("epsilon must be positive");
    ScopeField f;
    f.radius = [spec, n, eps, frame](const Point& x) { return eval_scope(spec, x, n, eps, frame); };
    f.sup = frame == Frame::original ? spec.upper_bound() : spec.upper_bound() / eps;
    f.description = fmt::format("{}@eps={:.17g},frame={}", spec.describe(), eps, to_string(frame));
    return f;
}

ScopeField constant_scope(double rho) {
    ScopeSpec s;
    s.kind = ScopeSpec::Kind::constant;
    s.rho0 = rho;
    s.rho_inf = rho;
    return make_scope_field(s, 1, 1.0, Frame::original);
}

CoeffProfile::Kind CoeffProfile::kind_from_name(const std::string& name) {
    if (name == "constant") return Kind::constant;
    if (name == "lorentzian") return Kind::lorentzian;
    if (name == "gaussian") return Kind::gaussian;
    throw std::invalid_argument("unknown coefficient profile '" + name + "'");
}

CoeffProfile CoeffProfile::constant(double v) {
    CoeffProfile p;
    p.kind = Kind::constant;
    p.value_inf = v;
    p.value_center = v;
    return p;
}

double CoeffProfile::operator()(const Point& x, int n) const {
    double r2 = 0.0;
    for (int d = 0; d < n; ++d) r2 += (x[d] - center[d]) * (x[d] - center[d]);
    switch (kind) {
    case Kind::constant:
        return value_inf;
    case Kind::lorentzian:
        return value_inf - (value_inf - value_center) / (1.0 + r2 / (width * width));
    case Kind::gaussian:
        return value_inf + (value_center - value_inf) * std::exp(-r2 / (2.0 * width * width));
    }
    return value_inf;
}

std::string CoeffProfile::describe() const {
    switch (kind) {
    case Kind::constant:
        return fmt::format("constant({:.17g})", value_inf);
    case Kind::lorentzian:
        return fmt::format("lorentzian(inf={:.17g},center_value={:.17g},width={:.17g})", value_inf, value_center,
                           width);
    case Kind::gaussian:
        return fmt::format("gaussian(inf={:.17g},center_value={:.17g},width={:.17g})", value_inf, value_center,
                           width);
    }
    return "?";
}

void CoeffSpec::validate(int n) const {
    if (!(Q_inf() > 0.0) || !(K_inf() > 0.0))
        throw std::invalid_argument(fmt::format("(H0) violated: Q_inf={} and K_inf={} must be positive", Q_inf(),
                                                K_inf()));
    if (!(a1 > 0.0)) throw std::invalid_argument(fmt::format("(H2) violated: a1={} must be positive", a1));
    if (!(a1 <= a2)) throw std::invalid_argument(fmt::format("(H2) violated: a1={} > a2={}", a1, a2));
    for (const CoeffProfile* c : {&Q, &K}) {
        if (c->kind != CoeffProfile::Kind::constant && !(c->width > 0.0))
            throw std::invalid_argument("coefficient profile width must be positive");
        const char* name = c == &Q ? "Q" : "K";
        auto pts = sample_points(n);
        pts.push_back(c->center);
        for (const Point& x : pts) {
            const double v = (*c)(x, n);
            if (!(v >= a1 && v <= a2))
                throw std::invalid_argument(
                    fmt::format("(H2) violated: {}={} at x=({}, {}) outside [a1={}, a2={}]", name, v, x[0], x[1], a1, a2));
        }
    }
}

double unit_sphere_area(int n) {
    if (n == 1) return 2.0;
    if (n == 2) return 2.0 * std::numbers::pi;
    throw std::invalid_argument("unsupported dimension");
}

}  // namespace nlrs
