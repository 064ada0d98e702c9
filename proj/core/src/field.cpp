#include "nlrs/field.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>

namespace nlrs {

double distance(const Point& a, const Point& b, int n) {
    double s = 0.0;
    for (int d = 0; d < n; ++d) {
        const double t = a[d] - b[d];
        s += t * t;
    }
    return std::sqrt(s);
}

Grid make_grid(int n, double L, std::size_t N) {
    if (n != 1 && n != 2)
        throw std::invalid_argument("unsupported dimension n=" + std::to_string(n) + " (expected 1 or 2)");
    if (N % 2 == 0)
        throw std::invalid_argument("N must be odd");
    if (N < 3)
        throw std::invalid_argument("N must be at least 3");
    if (!(L > 0.0) || !std::isfinite(L))
        throw std::invalid_argument("L must be positive");
    Grid g;
    g.n_ = n;
    g.L_ = L;
    g.N_ = N;
    g.h_ = 2.0 * L / static_cast<double>(N - 1);
    return g;
}

std::size_t Grid::size() const { return n_ == 1 ? N_ : N_ * N_; }

double Grid::cell_volume() const { return n_ == 1 ? h_ : h_ * h_; }

std::array<std::size_t, 2> Grid::multi_index(std::size_t index) const {
    if (n_ == 1) return {index, 0};
    return {index / N_, index % N_};
}

std::size_t Grid::flat_index(const std::array<std::size_t, 2>& idx) const {
    return n_ == 1 ? idx[0] : idx[0] * N_ + idx[1];
}

Point Grid::coordinate(std::size_t index) const {
    const auto mi = multi_index(index);
    Point x{0.0, 0.0};
    for (int d = 0; d < n_; ++d)
        x[d] = -L_ + static_cast<double>(mi[d]) * h_;
    return x;
}

bool Grid::contains(const Point& x) const {
    for (int d = 0; d < n_; ++d)
        if (std::abs(x[d]) > L_) return false;
    return true;
}

Field::Field(Grid grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size())
        throw std::invalid_argument("field length " + std::to_string(values_.size()) +
                                    " does not match grid size " + std::to_string(grid_.size()));
    for (double v : values_)
        if (!std::isfinite(v)) throw std::invalid_argument("field contains non-finite values");
}

Field Field::zeros(const Grid& grid) { return Field(grid, std::vector<double>(grid.size(), 0.0)); }

Profile Profile::from_name(const std::string& name, Point center, double width, double amplitude) {
    Profile p;
    if (name == "zero")
        p.kind = Kind::zero;
    else if (name == "gaussian")
        p.kind = Kind::gaussian;
    else if (name == "bump")
        p.kind = Kind::bump;
    else
        throw std::invalid_argument("unknown profile '" + name + "'");
    p.center = center;
    p.width = width;
    p.amplitude = amplitude;
    return p;
}

Field sample_profile(const Grid& grid, const Profile& profile) {
    if (profile.kind != Profile::Kind::zero && !(profile.width > 0.0))
        throw std::invalid_argument("profile width must be positive");
    std::vector<double> v(grid.size(), 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double r = distance(grid.coordinate(i), profile.center, grid.dim());
        switch (profile.kind) {
        case Profile::Kind::zero:
            break;
        case Profile::Kind::gaussian:
            v[i] = profile.amplitude * std::exp(-r * r / (2.0 * profile.width * profile.width));
            break;
        case Profile::Kind::bump:
            if (r < profile.width) {
                const double s = r / profile.width;
                v[i] = profile.amplitude * std::exp(1.0 - 1.0 / (1.0 - s * s));
            }
            break;
        }
    }
    return Field(grid, std::move(v));
}

namespace {

void check_exponent(double q) {
    if (!(q >= 1.0)) throw std::invalid_argument("norm exponent q must be >= 1");
}

double weighted_sum(const Field& u, double q, auto&& weight_at) {
    const double hn = u.grid().cell_volume();
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        s += hn * weight_at(i) * std::pow(std::abs(u[i]), q);
    return std::pow(s, 1.0 / q);
}

double ball_sum(const Field& u, const Point& center, double radius) {
    const Grid& g = u.grid();
    const double hn = g.cell_volume();
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        if (distance(g.coordinate(i), center, g.dim()) < radius) s += hn * u[i] * u[i];
    return s;
}

}  // namespace

double lp_norm_weighted(const Field& u, double q, double weight) {
    check_exponent(q);
    if (!(weight > 0.0)) throw std::invalid_argument("weight must be strictly positive");
    return weighted_sum(u, q, [weight](std::size_t) { return weight; });
}

double lp_norm_weighted(const Field& u, double q, const Field& weight) {
    check_exponent(q);
    if (weight.grid() != u.grid()) throw std::invalid_argument("grid mismatch");
    for (double w : weight.values())
        if (!(w > 0.0)) throw std::invalid_argument("weight must be strictly positive");
    return weighted_sum(u, q, [&weight](std::size_t i) { return weight[i]; });
}

double mass_in_ball(const Field& u, const Point& center, double radius) {
    const double hn = u.grid().cell_volume();
    double total = 0.0;
    for (double v : u.values()) total += hn * v * v;
    if (total == 0.0) throw std::invalid_argument("mass_in_ball: zero field");
    return ball_sum(u, center, radius) / total;
}

double localization_profile(const Field& u, double R) {
    if (!(R > 0.0)) throw std::invalid_argument("localization radius must be positive");
    const Grid& g = u.grid();
    const double h = g.spacing();
    const double hn = g.cell_volume();
    const auto N = static_cast<long>(g.points_per_dim());
    // Lattice offsets with |k| h < R.
    const long kmax = static_cast<long>(std::ceil(R / h));
    std::vector<std::array<long, 2>> offsets;
    for (long a = -kmax; a <= kmax; ++a) {
        for (long b = (g.dim() == 2 ? -kmax : 0); b <= (g.dim() == 2 ? kmax : 0); ++b) {
            const double r = h * std::sqrt(static_cast<double>(a * a + b * b));
            if (r < R) offsets.push_back({a, b});
        }
    }
    double best = 0.0;
    for (std::size_t c = 0; c < u.size(); ++c) {
        const auto mi = g.multi_index(c);
        double s = 0.0;
        for (const auto& k : offsets) {
            const long i0 = static_cast<long>(mi[0]) + k[0];
            const long i1 = static_cast<long>(mi[1]) + k[1];
            if (i0 < 0 || i0 >= N) continue;
            if (g.dim() == 2 && (i1 < 0 || i1 >= N)) continue;
            const double v = u[g.flat_index({static_cast<std::size_t>(i0), static_cast<std::size_t>(i1)})];
            s += hn * v * v;
        }
        best = std::max(best, s);
    }
    return best;
}

Point mass_center(const Field& u) {
    const Grid& g = u.grid();
    Point c{0.0, 0.0};
    double total = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double w = u[i] * u[i];
        const Point x = g.coordinate(i);
        for (int d = 0; d < g.dim(); ++d) c[d] += w * x[d];
        total += w;
    }
    if (total == 0.0) throw std::invalid_argument("mass_center: zero field");
    for (int d = 0; d < g.dim(); ++d) c[d] /= total;
    return c;
}

// ---- binary persistence -------------------------------------------------

namespace {

constexpr char kMagic[6] = {'R', 'S', 'F', 'L', 'D', '1'};

template <class T>
void put_le(std::ostream& os, T value) {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
    const U bits = std::bit_cast<U>(value);
    char bytes[sizeof(U)];
    for (std::size_t b = 0; b < sizeof(U); ++b) bytes[b] = static_cast<char>((bits >> (8 * b)) & 0xffu);
    os.write(bytes, sizeof(U));
}

template <class T>
T get_le(std::istream& is) {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
    unsigned char bytes[sizeof(U)];
    if (!is.read(reinterpret_cast<char*>(bytes), sizeof(U)))
        throw std::runtime_error("unexpected end of field file");
    U bits = 0;
    for (std::size_t b = 0; b < sizeof(U); ++b) bits |= static_cast<U>(bytes[b]) << (8 * b);
    return std::bit_cast<T>(bits);
}

}  // namespace

void write_field(const Field& u, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    const Grid& g = u.grid();
    os.write(kMagic, sizeof(kMagic));
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(g.dim()));
    put_le<std::uint64_t>(os, static_cast<std::uint64_t>(g.points_per_dim()));
    put_le<double>(os, g.half_width());
    put_le<double>(os, g.spacing());
    for (double v : u.values()) put_le<double>(os, v);
    if (!os) throw std::runtime_error("write failed for '" + path.string() + "'");
}

Field read_field(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
    char magic[sizeof(kMagic)];
    if (!is.read(magic, sizeof(magic))) throw std::runtime_error("not a field file");
    if (!std::equal(std::begin(magic), std::end(magic), std::begin(kMagic)))
        throw std::runtime_error("not a field file");
    const auto n = get_le<std::uint32_t>(is);
    const auto N = get_le<std::uint64_t>(is);
    const auto L = get_le<double>(is);
    const auto h = get_le<double>(is);
    Grid g;
    try {
        g = make_grid(static_cast<int>(n), L, static_cast<std::size_t>(N));
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(std::string("dimension mismatch: ") + e.what());
    }
    if (g.spacing() != h) throw std::runtime_error("dimension mismatch: spacing inconsistent with L and N");
    std::vector<double> values(g.size());
    for (auto& v : values) v = get_le<double>(is);
    return Field(g, std::move(values));
}

}  // namespace nlrs
