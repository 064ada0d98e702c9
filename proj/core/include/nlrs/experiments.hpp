#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "nlrs/functionals.hpp"
#include "nlrs/solver.hpp"

namespace nlrs {

struct ScalingRow {
    double Q;
    double K;
    double computed_level;
    double predicted_level;
    double rel_error;
    int iterations;
};

struct ScalingReport {
    std::vector<ScalingRow> rows;
    /// D used for the predictions: the same-grid rung level when available.
    double D_used = 0.0;
    double D_extrapolated = 0.0;
    bool same_grid_D = false;
    double L = 0.0;
    std::size_t N = 0;
    double h = 0.0;
    double max_rel_error = 0.0;
};

/// D for predictions on `grid`: the matching rung level, else the extrapolated value.
double reference_D(const OracleDResult& fixture, const Grid& grid);

ScalingReport verify_scaling_law(double alpha, double p, int n, const std::vector<std::pair<double, double>>& QK,
                                 const Grid& grid, const OracleDResult& fixture, const SolverOptions& options);

struct ConcentrationReport {
    Point xi_star{0.0, 0.0};
    std::vector<double> radii;
    /// Sorted by descending eps.
    std::vector<SweepRecord> rows;
    /// Per radius: fraction_in_ball nondecreasing / strictly increasing as eps decreases.
    std::vector<bool> nondecreasing;
    std::vector<bool> strictly_increasing;
    ConditionCReport condition;
};

/// Original-frame eps sweep around the condition-(C) argmin. Throws "no strict concentration gap"
/// when condition (C) fails on the scan.
ConcentrationReport concentration_sweep(const ProblemSpec& family, const std::vector<double>& eps_list,
                                        const std::vector<double>& radii, double localization_R,
                                        const SolverOptions& options, const ScanOptions& scan = {});

/// Ground level of the comparison problem (scope rho0, Q = a1, K = a2) in the family's frame at `eps`,
/// converted to the rescaled normalization.
double comparison_level(const ProblemSpec& family, double eps, const SolverOptions& options);

struct CxiRow {
    Point xi;
    double C_analytic;
    std::optional<double> C_spotcheck;
    std::optional<double> rel_error;
};

struct CxiTable {
    std::vector<CxiRow> rows;
    Point argmin{0.0, 0.0};
    double min_value = 0.0;
    double max_spot_error = 0.0;
};

/// Analytic C(xi) on the scan points; each spot check is snapped to the nearest scan point and
/// compared with the frozen-coefficient ground level on `solver_grid`.
CxiTable scan_C_xi(const CoeffSpec& coeffs, double alpha, double p, int n, const ScanOptions& scan,
                   const OracleDResult& fixture, const std::vector<Point>& spot_checks, const Grid& solver_grid,
                   const SolverOptions& options);

struct AuditRow {
    std::size_t sample;
    std::size_t spec_index;
    double lhs;
    double rhs;
    double ratio;
    bool holds;
};

struct AuditReport {
    std::vector<AuditRow> rows;
    double worst_ratio = 0.0;
    std::size_t failures = 0;
    bool pass = false;
};

/// Random smoothed fields (node-wise standard normal, one nearest-neighbour averaging pass),
/// assigned round-robin to the specs. Specs must have a finite scope.
AuditReport norm_equivalence_audit(const std::vector<ProblemSpec>& specs, std::size_t samples, std::uint64_t seed,
                                   int threads = 1);

/// One nearest-neighbour averaging pass with zero extension.
Field smooth_once(const Field& u);

}  // namespace nlrs
