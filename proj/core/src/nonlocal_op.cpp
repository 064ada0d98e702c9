#include "nlrs/nonlocal_op.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <vector>

#include "nlrs/parallel.hpp"

namespace nlrs {

QuadForm::QuadForm(Grid grid, SparseRowMatrix matrix, double alpha, std::string scope_description,
                   double truncation_radius, bool tail_correction, FormOptions options)
    : grid_(grid),
      matrix_(std::move(matrix)),
      alpha_(alpha),
      scope_(std::move(scope_description)),
      r_trunc_(truncation_radius),
      tail_(tail_correction),
      options_(options) {}

namespace {

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument(fmt::format("alpha={} outside (0,1)", alpha));
}

struct Offset {
    long k0;
    long k1;
    double dist;
    double weight;
};

// Nonzero lattice offsets with |k| h < radius, in lexicographic (k0, k1) order so that
// target columns come out sorted for every row.
std::vector<Offset> lattice_offsets(const Grid& grid, double radius, double alpha, double shell_weight) {
    const int n = grid.dim();
    const double h = grid.spacing();
    const double hn = grid.cell_volume();
    const long kmax = static_cast<long>(std::ceil(radius / h));
    const long k1max = n == 2 ? kmax : 0;
    std::vector<Offset> out;
    for (long a = -kmax; a <= kmax; ++a) {
        for (long b = -k1max; b <= k1max; ++b) {
            const long k2 = a * a + b * b;
            if (k2 == 0) continue;
            const double dist = h * std::sqrt(static_cast<double>(k2));
            if (!(dist < radius)) continue;
            double w = hn * hn / std::pow(dist, n + 2.0 * alpha);
            if (k2 == 1) w *= shell_weight;
            out.push_back({a, b, dist, w});
        }
    }
    return out;
}

struct Entry {
    int col;
    double value;
};

// Row-local assembly. For the ordered pair (i, j) and its mirror (j, i) the row gets
// c * w on the diagonal and -c * w at column j, with c = [|z| < rho(x_i)] + [|z| < rho(x_j)].
// Ghost columns (outside the box) only feed the diagonal.
SparseRowMatrix assemble_rows(const Grid& grid, const std::vector<Offset>& offsets, const ScopeField* scope,
                              bool zero_extension, double diag_extra, int threads) {
    const std::size_t M = grid.size();
    const int n = grid.dim();
    const long N = static_cast<long>(grid.points_per_dim());
    const double L = grid.half_width();
    const double h = grid.spacing();

    std::vector<double> nodal_radius;
    if (scope) {
        nodal_radius.resize(M);
        for (std::size_t i = 0; i < M; ++i) nodal_radius[i] = scope->radius(grid.coordinate(i));
    }

    std::vector<std::vector<Entry>> rows(M);
    parallel_for(M, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const auto mi = grid.multi_index(i);
            const double rho_i = scope ? nodal_radius[i] : std::numeric_limits<double>::infinity();
            auto& row = rows[i];
            row.reserve(offsets.size() / (n == 1 ? 2 : 4) + 1);
            double diag = 0.0;
            for (const Offset& o : offsets) {
                const long t0 = static_cast<long>(mi[0]) + o.k0;
                const long t1 = static_cast<long>(mi[1]) + o.k1;
                const bool inside = t0 >= 0 && t0 < N && (n == 1 || (t1 >= 0 && t1 < N));
                if (!inside && !zero_extension) continue;
                int count = 2;
                if (scope) {
                    double rho_t;
                    if (inside) {
                        rho_t = nodal_radius[grid.flat_index({static_cast<std::size_t>(t0),
                                                              static_cast<std::size_t>(t1)})];
                    } else {
                        const Point xg{-L + static_cast<double>(t0) * h,
                                       n == 2 ? -L + static_cast<double>(t1) * h : 0.0};
                        rho_t = scope->radius(xg);
                    }
                    count = (o.dist < rho_i ? 1 : 0) + (o.dist < rho_t ? 1 : 0);
                    if (count == 0) continue;
                }
                const double cw = count * o.weight;
                diag += cw;
                if (inside) {
                    const auto j = grid.flat_index({static_cast<std::size_t>(t0), static_cast<std::size_t>(t1)});
                    row.push_back({static_cast<int>(j), -cw});
                }
            }
            diag += diag_extra;
            const auto pos = std::lower_bound(row.begin(), row.end(), static_cast<int>(i),
                                              [](const Entry& e, int c) { return e.col < c; });
            row.insert(pos, Entry{static_cast<int>(i), diag});
        }
    });

    SparseRowMatrix A(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(M));
    Eigen::VectorXi nnz(static_cast<Eigen::Index>(M));
    for (std::size_t i = 0; i < M; ++i) nnz[static_cast<Eigen::Index>(i)] = static_cast<int>(rows[i].size());
    A.reserve(nnz);
    for (std::size_t i = 0; i < M; ++i) {
        for (const Entry& e : rows[i]) A.insert(static_cast<Eigen::Index>(i), e.col) = e.value;
        std::vector<Entry>().swap(rows[i]);
    }
    A.makeCompressed();
    return A;
}

}  // namespace

QuadForm assemble_regional_form(const Grid& grid, const ScopeField& scope, double alpha, const FormOptions& options) {
    check_alpha(alpha);
    if (!scope.radius) throw std::invalid_argument("scope function is empty");
    // An unbounded scope is cut at the full form's tail radius (no tail term here).
    const double reach = std::isfinite(scope.sup) ? scope.sup : full_form_tail_radius(grid);
    if (!(reach > 0.0)) throw std::invalid_argument("scope radius must be positive");
    const auto offsets = lattice_offsets(grid, reach, alpha, options.shell_weight);
    auto A = assemble_rows(grid, offsets, &scope, options.zero_extension, 0.0, options.threads);
    return QuadForm(grid, std::move(A), alpha, scope.description, reach, false, options);
}

double full_form_tail_radius(const Grid& grid) {
    return 2.0 * std::sqrt(static_cast<double>(grid.dim())) * grid.half_width() + grid.spacing();
}

QuadForm assemble_full_form(const Grid& grid, double alpha, bool tail_correction, const FormOptions& options) {
    check_alpha(alpha);
    const double R_tail = full_form_tail_radius(grid);
    const auto offsets = lattice_offsets(grid, R_tail, alpha, options.shell_weight);
    double extra = 0.0;
    if (tail_correction && options.zero_extension)
        extra = grid.cell_volume() * unit_sphere_area(grid.dim()) / (alpha * std::pow(R_tail, 2.0 * alpha));
    auto A = assemble_rows(grid, offsets, nullptr, options.zero_extension, extra, options.threads);
    return QuadForm(grid, std::move(A), alpha, "infinite", R_tail, tail_correction, options);
}

void apply_form(const QuadForm& A, std::span<const double> u, std::span<double> out) {
    const auto& m = A.matrix();
    Eigen::Map<const Eigen::VectorXd> x(u.data(), static_cast<Eigen::Index>(u.size()));
    Eigen::Map<Eigen::VectorXd> y(out.data(), static_cast<Eigen::Index>(out.size()));
    y.noalias() = m * x;
}

double quad_energy(const QuadForm& A, std::span<const double> u) {
    std::vector<double> Au(u.size());
    apply_form(A, u, Au);
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * Au[i];
    return s;
}

Field apply_form(const QuadForm& A, const Field& u) {
    if (u.grid() != A.grid()) throw std::invalid_argument("grid mismatch");
    std::vector<double> out(u.size());
    apply_form(A, u.values(), out);
    return Field(u.grid(), std::move(out));
}

double quad_energy(const QuadForm& A, const Field& u) {
    if (u.grid() != A.grid()) throw std::invalid_argument("grid mismatch");
    return quad_energy(A, u.values());
}

double norm_equivalence_constant(double a1, double alpha, double rho0, int n) {
    if (!(a1 > 0.0) || !(rho0 > 0.0)) throw std::invalid_argument("a1 and rho0 must be positive");
    check_alpha(alpha);
    const double A = std::max(a1, 1.0 + 2.0 * unit_sphere_area(n) / (alpha * std::pow(rho0, 2.0 * alpha)));
    return A / a1;
}

NormEquivalenceReport check_norm_equivalence(const Field& u, const QuadForm& regional, const QuadForm& full,
                                             const Field& Q, double a1, double alpha, double rho0) {
    const Grid& g = u.grid();
    if (regional.grid() != g || full.grid() != g || Q.grid() != g) throw std::invalid_argument("grid mismatch");
    const double hn = g.cell_volume();
    double l2 = 0.0, ql2 = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        l2 += hn * u[i] * u[i];
        ql2 += hn * Q[i] * u[i] * u[i];
    }
    if (l2 == 0.0) throw std::invalid_argument("check_norm_equivalence: zero field");
    NormEquivalenceReport r;
    r.constant = norm_equivalence_constant(a1, alpha, rho0, g.dim());
    r.lhs = std::sqrt(quad_energy(full, u) + l2);
    r.rhs = r.constant * std::sqrt(quad_energy(regional, u) + ql2);
    r.holds = r.lhs <= r.rhs;
    return r;
}

void write_form_coo(const QuadForm& A, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    const auto& m = A.matrix();
    for (Eigen::Index i = 0; i < m.outerSize(); ++i)
        for (SparseRowMatrix::InnerIterator it(m, i); it; ++it)
            os << fmt::format("{} {} {:.17g}\n", it.row(), it.col(), it.value());
    if (!os) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace nlrs
