#pragma once

#include <vector>

#include "nlrs/coefficients.hpp"
#include "nlrs/field.hpp"
#include "nlrs/nonlocal_op.hpp"

namespace nlrs {

/// eps^{2 alpha} (-Delta)^alpha_rho u + Q(x) u = K(x) |u|^{p-1} u, in the original frame,
/// or its rescaled form with rho_eps(x) = rho(eps x)/eps, Q(eps x), K(eps x).
struct ProblemSpec {
    double alpha = 0.4;
    int n = 1;
    double p = 2.0;
    double eps = 1.0;
    Frame frame = Frame::rescaled;
    ScopeSpec scope;
    CoeffSpec coeffs;
    Grid grid;

    /// Throws std::invalid_argument naming the violated hypothesis.
    void validate() const;
};

/// Frozen-coefficient problem (-Delta)^alpha u + Q u = K |u|^{p-1} u with the full form.
struct ConstCoeffProblem {
    double Q = 1.0;
    double K = 1.0;
    double alpha = 0.4;
    double p = 2.0;
    int n = 1;
    Grid grid;

    void validate() const;
};

/// n > 2 alpha and 1 < p < (n + 2 alpha)/(n - 2 alpha).
void validate_exponents(double alpha, int n, double p);

/// Nodal data every energy evaluation needs.
struct EnergyModel {
    Grid grid;
    std::vector<double> Q;
    std::vector<double> K;
    /// eps^{2 alpha} in the original frame, 1 otherwise.
    double prefactor = 1.0;
    double p = 2.0;
};

EnergyModel make_model(const ProblemSpec& problem);
EnergyModel make_model(const ConstCoeffProblem& problem);

/// The quadratic form matching the problem's frame and scope (full form when rho = infinity).
QuadForm assemble_problem_form(const ProblemSpec& problem, const FormOptions& options = {});
QuadForm assemble_problem_form(const ConstCoeffProblem& problem, const FormOptions& options = {});

struct EnergyReport {
    double total = 0.0;
    double quadratic = 0.0;
    double potential = 0.0;
    double nonlinear = 0.0;
};

EnergyReport energy(const EnergyModel& model, const QuadForm& A, const Field& u);

/// Discrete L^2 gradient g: energy(u + t w) - energy(u) = t sum_i h^n g_i w_i + O(t^2).
Field gradient(const EnergyModel& model, const QuadForm& A, const Field& u);

/// Unique t > 0 with t u on the Nehari manifold.
double nehari_t(const EnergyModel& model, const QuadForm& A, const Field& u);

/// Energy of the Nehari projection of u: (1/2 - 1/(p+1)) M(u).
double level_from_field(const EnergyModel& model, const QuadForm& A, const Field& u);

/// |I'(u) u| = |quadratic + potential - nonlinear|.
double nehari_residual(const EnergyModel& model, const QuadForm& A, const Field& u);

struct ScalingExponents {
    /// (p+1)/(p-1) - n/(2 alpha)
    double theta;
    /// 2/(p-1)
    double sigma;
};

ScalingExponents scaling_exponents(double alpha, double p, int n);

/// Q^theta / K^sigma for constant coefficients.
double scaling_factor(double Q, double K, double alpha, double p, int n);

/// Ground-state energy function C(xi) = Q(xi)^theta / K(xi)^sigma * D.
double c_of_xi(const Point& xi, const CoeffSpec& coeffs, double alpha, double p, int n, double D);

struct ScanOptions {
    double half_width = 50.0;
    std::size_t points = 2001;
};

/// Uniform scan points on [-S, S]^n, row-major.
std::vector<Point> scan_points(int n, const ScanOptions& options);

struct ConditionCReport {
    bool holds = false;
    Point argmin{0.0, 0.0};
    double min_value = 0.0;
    double limit_value = 0.0;
    /// limit_value - min_value
    double margin = 0.0;
};

/// Scans Q^theta/K^sigma and compares the minimum with Q_inf^theta/K_inf^sigma.
/// Ties resolve to the smallest scan index.
ConditionCReport condition_C_check(const CoeffSpec& coeffs, double alpha, double p, int n,
                                   const ScanOptions& options = {});

}  // namespace nlrs
