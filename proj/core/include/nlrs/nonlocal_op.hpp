#pragma once

#include <Eigen/SparseCore>
#include <filesystem>
#include <span>
#include <string>

#include "nlrs/coefficients.hpp"
#include "nlrs/field.hpp"

namespace nlrs {

using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct FormOptions {
    /// Accumulate interactions with the zero extension outside the box on the diagonal.
    bool zero_extension = true;
    /// Multiplier on the |z| = h shell; 1 is the plain punched-hole rule.
    double shell_weight = 1.0;
    int threads = 1;
};

/// Assembled symmetric quadratic form u^T A u approximating
///   sum over ordered pairs of |u(x+z) - u(x)|^2 / |z|^{n+2 alpha}, |z| < rho(x).
class QuadForm {
public:
    QuadForm(Grid grid, SparseRowMatrix matrix, double alpha, std::string scope_description,
             double truncation_radius, bool tail_correction, FormOptions options);

    const Grid& grid() const { return grid_; }
    const SparseRowMatrix& matrix() const { return matrix_; }
    double alpha() const { return alpha_; }
    const std::string& scope_description() const { return scope_; }
    /// Largest interaction radius represented by explicit lattice offsets.
    double truncation_radius() const { return r_trunc_; }
    bool tail_correction() const { return tail_; }
    const FormOptions& options() const { return options_; }

private:
    Grid grid_;
    SparseRowMatrix matrix_;
    double alpha_;
    std::string scope_;
    double r_trunc_;
    bool tail_;
    FormOptions options_;
};

/// Regional form: node pair (i, j) interacts iff |x_j - x_i| < rho(x_i), once per ordering.
QuadForm assemble_regional_form(const Grid& grid, const ScopeField& scope, double alpha,
                                const FormOptions& options = {});

/// Full form (rho = infinity). Zero-extension ghosts are enumerated up to
/// full_form_tail_radius(grid); tail_correction adds the analytic remainder
/// h^n |S^{n-1}| / (alpha R_tail^{2 alpha}) to every diagonal entry.
QuadForm assemble_full_form(const Grid& grid, double alpha, bool tail_correction,
                            const FormOptions& options = {});

/// Box diameter plus one spacing: every lattice offset beyond it leaves the box.
double full_form_tail_radius(const Grid& grid);

Field apply_form(const QuadForm& A, const Field& u);
double quad_energy(const QuadForm& A, const Field& u);
/// Raw-span variants used in inner loops; no grid check.
void apply_form(const QuadForm& A, std::span<const double> u, std::span<double> out);
double quad_energy(const QuadForm& A, std::span<const double> u);

struct NormEquivalenceReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double constant = 0.0;
    bool holds = false;
};

/// A / a1 with A = max{a1, 1 + 2 |S^{n-1}| / (alpha rho0^{2 alpha})}.
double norm_equivalence_constant(double a1, double alpha, double rho0, int n);

/// lhs = (u^T A_full u + int u^2)^{1/2}; rhs = S (u^T A_regional u + int Q u^2)^{1/2}.
NormEquivalenceReport check_norm_equivalence(const Field& u, const QuadForm& regional, const QuadForm& full,
                                             const Field& Q, double a1, double alpha, double rho0);

/// Coordinate-list dump: "i j value" per line, sorted by (i, j), 17 significant digits.
void write_form_coo(const QuadForm& A, const std::filesystem::path& path);

}  // namespace nlrs
