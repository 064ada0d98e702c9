#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nlrs/field.hpp"
#include "nlrs/functionals.hpp"
#include "nlrs/nonlocal_op.hpp"

namespace nlrs {

struct SolverOptions {
    int max_iters = 20000;
    /// Bound on the h^n-scaled L^2 norm of the energy gradient at the Nehari projection.
    double tol_g = 1e-8;
    /// Nehari residual bound relative to the level.
    double tol_c_rel = 1e-9;
    double initial_step = 1.0;
    /// Nonmonotone line-search memory; 1 enforces strict descent of the quotient.
    int memory = 10;
    int max_backtracks = 60;
    bool clip_negative = true;
    /// Centers of the default gaussian initial guesses, one solve per center.
    std::vector<Point> centers{Point{0.0, 0.0}};
    /// Extra starts from seeded perturbations of the gaussian at the first center.
    int restarts = 0;
    double width = 1.0;
    double amplitude = 1.0;
    std::uint64_t seed = 0;
    int threads = 1;
    bool record_history = false;

    void validate() const;
};

struct IterationRecord {
    int iter;
    double quotient;
    double level;
    double grad_norm;
    double step;
};

struct GroundState {
    /// Nonnegative (when clipping) and Nehari-projected.
    Field u;
    double level = 0.0;
    double quotient = 0.0;
    double gradient_norm = 0.0;
    double nehari_residual = 0.0;
    int iterations = 0;
    bool converged = false;
    int restart_index = 0;
    std::string message{};
    std::vector<IterationRecord> history{};
};

/// Minimizes M(u) = (|u|^2)^{(p+1)/(p-1)} / (int K |u|^{p+1})^{2/(p-1)} from a gaussian at each
/// configured center and returns the lowest-level result (ties: lowest restart index).
GroundState solve_ground_state(const EnergyModel& model, const QuadForm& A, const SolverOptions& options);

/// Same, starting from the given fields (warm start).
GroundState solve_ground_state(const EnergyModel& model, const QuadForm& A, const SolverOptions& options,
                               const std::vector<Field>& initial);

struct LadderRung {
    double L;
    std::size_t N;
};

struct RungLevel {
    double L;
    std::size_t N;
    double h;
    double level;
    int iterations;
};

struct OracleDResult {
    double D = 0.0;
    double error_estimate = 0.0;
    /// Richardson order in h.
    double order = 0.0;
    std::vector<RungLevel> rungs;

    /// Level on the rung matching `grid`, if any.
    std::optional<double> level_on(const Grid& grid) const;
};

/// Ground level of the Q = K = 1 full-form problem on each rung, Richardson-extrapolated
/// in h with order 2 - 2 alpha from the two finest rungs.
OracleDResult oracle_D(double alpha, double p, int n, const std::vector<LadderRung>& ladder,
                       const SolverOptions& options);

struct SweepOptions {
    /// Predicted concentration point (original coordinates).
    Point xi_star{0.0, 0.0};
    /// Ball radii for mass fractions around xi_star (original coordinates).
    std::vector<double> radii{1.0};
    /// R of the localization diagnostic, in rescaled coordinates.
    double localization_R = 1.0;
};

struct SweepRecord {
    double eps = 0.0;
    /// Ground level C_{rho_eps} of the rescaled problem.
    double level = 0.0;
    /// Level of the functional actually minimized (frame-dependent).
    double frame_level = 0.0;
    /// Mass center y_eps in rescaled coordinates, and eps * y_eps.
    Point mass_center{0.0, 0.0};
    Point eps_center{0.0, 0.0};
    std::vector<double> fractions;
    double localization = 0.0;
    bool converged = false;
    int iterations = 0;
    double gradient_norm = 0.0;
    std::string error;
    std::optional<Field> u;
};

/// Solves the family for each eps (descending), warm-starting from the previous solution.
std::vector<SweepRecord> sweep_epsilon(const ProblemSpec& family, const std::vector<double>& eps_list,
                                       const SweepOptions& sweep, const SolverOptions& options,
                                       const FormOptions& form_options = {});

}  // namespace nlrs
