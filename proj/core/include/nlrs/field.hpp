#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace nlrs {

/// A point in R^n, n <= 2. Unused trailing components are zero.
using Point = std::array<double, 2>;

double distance(const Point& a, const Point& b, int n);

/// Truncated uniform lattice on [-L, L]^n with N (odd) points per dimension.
/// Nodes are numbered row-major, first dimension slowest.
class Grid {
public:
    Grid() = default;

    int dim() const { return n_; }
    double half_width() const { return L_; }
    std::size_t points_per_dim() const { return N_; }
    double spacing() const { return h_; }
    std::size_t size() const;
    /// h^n, the weight of one node in the rectangle rule.
    double cell_volume() const;

    Point coordinate(std::size_t index) const;
    std::array<std::size_t, 2> multi_index(std::size_t index) const;
    std::size_t flat_index(const std::array<std::size_t, 2>& idx) const;
    bool contains(const Point& x) const;

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    friend Grid make_grid(int n, double L, std::size_t N);

    int n_ = 1;
    double L_ = 1.0;
    std::size_t N_ = 3;
    double h_ = 1.0;
};

Grid make_grid(int n, double L, std::size_t N);

/// Nodal values of a real function on a Grid, zero outside the box.
class Field {
public:
    Field(Grid grid, std::vector<double> values);
    static Field zeros(const Grid& grid);

    const Grid& grid() const { return grid_; }
    std::span<const double> values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    std::size_t size() const { return values_.size(); }

    /// Moves the storage out; the field is left empty.
    std::vector<double> release() && { return std::move(values_); }

private:
    Grid grid_;
    std::vector<double> values_;
};

struct Profile {
    enum class Kind { zero, gaussian, bump };
    Kind kind = Kind::zero;
    Point center{0.0, 0.0};
    /// Gaussian standard deviation, or bump support radius.
    double width = 1.0;
    double amplitude = 1.0;

    static Profile from_name(const std::string& name, Point center, double width, double amplitude);
};

/// gaussian: a exp(-|x-c|^2 / (2 w^2)); bump: a exp(1 - 1/(1 - (r/w)^2)) for r < w.
Field sample_profile(const Grid& grid, const Profile& profile);

double lp_norm_weighted(const Field& u, double q, double weight = 1.0);
double lp_norm_weighted(const Field& u, double q, const Field& weight);

/// Fraction of the discrete L^2 mass inside the open ball B(center, radius).
double mass_in_ball(const Field& u, const Point& center, double radius);

/// max over lattice nodes y of sum_{|x_i - y| < R} h^n u_i^2.
double localization_profile(const Field& u, double R);

/// L^2-density-weighted centroid of u.
Point mass_center(const Field& u);

void write_field(const Field& u, const std::filesystem::path& path);
Field read_field(const std::filesystem::path& path);

}  // namespace nlrs
