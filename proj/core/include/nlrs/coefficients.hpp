#pragma once

#include <functional>
#include <string>

#include "nlrs/field.hpp"

namespace nlrs {

enum class Frame { original, rescaled };

Frame frame_from_name(const std::string& name);
std::string to_string(Frame frame);

/// Interaction radius rho(x) of the regional operator.
///
/// constant:   rho(x) = rho0
/// saturating: rho(x) = rho_inf - (rho_inf - rho0) / (1 + |x|^2 / width^2)
/// infinite:   rho(x) = +inf (full fractional form)
struct ScopeSpec {
    enum class Kind { constant, saturating, infinite };
    Kind kind = Kind::constant;
    double rho0 = 1.0;
    double rho_inf = 1.0;
    double width = 1.0;

    double operator()(const Point& x, int n) const;
    /// Supremum of rho over R^n.
    double upper_bound() const;
    std::string describe() const;
    /// Checks 0 < rho0 <= rho(x) < rho_inf and rho -> rho_inf on sample points.
    void validate(int n) const;

    static Kind kind_from_name(const std::string& name);
};

/// original frame: rho(x); rescaled frame: rho(eps x) / eps.
double eval_scope(const ScopeSpec& spec, const Point& x, int n, double eps, Frame frame);

/// Scope radius as a function on all of R^n, as consumed by assembly.
struct ScopeField {
    std::function<double(const Point&)> radius;
    /// Upper bound on radius(x) over the points assembly will query.
    double sup = 0.0;
    std::string description;
};

ScopeField make_scope_field(const ScopeSpec& spec, int n, double eps, Frame frame);
ScopeField constant_scope(double rho);

/// One coefficient profile (Q or K).
///
/// constant:   c(x) = value_inf
/// lorentzian: c(x) = value_inf - (value_inf - value_center) / (1 + |x - center|^2 / width^2)
/// gaussian:   c(x) = value_inf + (value_center - value_inf) exp(-|x - center|^2 / (2 width^2))
struct CoeffProfile {
    enum class Kind { constant, lorentzian, gaussian };
    Kind kind = Kind::constant;
    double value_inf = 1.0;
    double value_center = 1.0;
    Point center{0.0, 0.0};
    double width = 1.0;

    double operator()(const Point& x, int n) const;
    double limit() const { return value_inf; }
    std::string describe() const;

    static CoeffProfile constant(double v);
    static Kind kind_from_name(const std::string& name);
};

struct CoeffSpec {
    CoeffProfile Q;
    CoeffProfile K;
    double a1 = 1.0;
    double a2 = 1.0;

    double Q_inf() const { return Q.limit(); }
    double K_inf() const { return K.limit(); }
    /// (H0) positive limits and (H2) a1 <= Q, K <= a2 on sample points.
    void validate(int n) const;
};

/// Surface measure of the unit sphere S^{n-1}: 2 for n = 1, 2 pi for n = 2.
double unit_sphere_area(int n);

}  // namespace nlrs
