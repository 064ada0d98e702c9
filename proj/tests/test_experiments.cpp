#include <gtest/gtest.h>

#include <cmath>

#include "nlrs/experiments.hpp"
#include "support/expect_error.hpp"

using namespace nlrs;

namespace {

const OracleDResult& small_fixture() {
    static const OracleDResult d = oracle_D(0.4, 2.0, 1, {{10.0, 201}, {10.0, 401}}, SolverOptions{});
    return d;
}

ProblemSpec canonical(Frame frame, double eps, const Grid& grid) {
    ProblemSpec s;
    s.eps = eps;
    s.frame = frame;
    s.scope = ScopeSpec{ScopeSpec::Kind::constant, 1.0, 1.0, 1.0};
    s.coeffs.Q = CoeffProfile{CoeffProfile::Kind::lorentzian, 2.0, 1.0, {0.0, 0.0}, 1.0};
    s.coeffs.K = CoeffProfile::constant(1.0);
    s.coeffs.a1 = 1.0;
    s.coeffs.a2 = 2.0;
    s.grid = grid;
    return s;
}

CoeffSpec flat() {
    CoeffSpec c;
    c.Q = CoeffProfile::constant(1.0);
    c.K = CoeffProfile::constant(1.0);
    return c;
}

}  // namespace

TEST(Scaling, UnitPairReproducesSameGridD) {
    const auto& d = small_fixture();
    const Grid g = make_grid(1, 10.0, 201);
    const auto rep = verify_scaling_law(0.4, 2.0, 1, {{1.0, 1.0}, {2.0, 1.0}}, g, d, SolverOptions{});
    EXPECT_TRUE(rep.same_grid_D);
    EXPECT_EQ(rep.D_used, *d.level_on(g));
    EXPECT_EQ(rep.D_extrapolated, d.D);
    ASSERT_EQ(rep.rows.size(), 2u);
    EXPECT_LE(rep.rows[0].rel_error, 1e-10);
    EXPECT_DOUBLE_EQ(rep.rows[1].predicted_level, std::pow(2.0, 1.75) * rep.D_used);
    EXPECT_DOUBLE_EQ(rep.max_rel_error, std::max(rep.rows[0].rel_error, rep.rows[1].rel_error));
}

TEST(Scaling, OffGridFallsBackToExtrapolatedD) {
    const auto& d = small_fixture();
    const auto rep = verify_scaling_law(0.4, 2.0, 1, {{1.0, 1.0}}, make_grid(1, 10.0, 301), d, SolverOptions{});
    EXPECT_FALSE(rep.same_grid_D);
    EXPECT_EQ(rep.D_used, d.D);
}

TEST(Scaling, LargeBoxMatchesPrediction) {
    const Grid g = make_grid(1, 80.0, 401);
    SolverOptions o;
    o.threads = 2;
    const auto A = assemble_full_form(g, 0.4, true);
    const auto unit = solve_ground_state(make_model(ConstCoeffProblem{1.0, 1.0, 0.4, 2.0, 1, g}), A, o);
    const auto two = solve_ground_state(make_model(ConstCoeffProblem{2.0, 1.0, 0.4, 2.0, 1, g}), A, o);
    ASSERT_TRUE(unit.converged && two.converged);
    EXPECT_LE(std::abs(two.level / (std::pow(2.0, 1.75) * unit.level) - 1.0), 0.02);
}

TEST(Scaling, Errors) {
    const auto& d = small_fixture();
    EXPECT_ERROR_CONTAINS(verify_scaling_law(0.4, 2.0, 1, {}, make_grid(1, 10.0, 201), d, {}), "no (Q,K) pairs");
    EXPECT_ERROR_CONTAINS(verify_scaling_law(0.4, 2.0, 1, {{1.0, 1.0}}, make_grid(2, 5.0, 11), d, {}),
                          "grid dimension");
}

TEST(Concentration, RequiresStrictGap) {
    auto prob = canonical(Frame::original, 1.0, make_grid(1, 10.0, 201));
    prob.coeffs = flat();
    EXPECT_ERROR_CONTAINS(concentration_sweep(prob, {1.0, 0.5}, {1.0}, 1.0, SolverOptions{}),
                          "no strict concentration gap");
}

TEST(Concentration, CanonicalFractionsIncrease) {
    const auto rep = concentration_sweep(canonical(Frame::rescaled, 1.0, make_grid(1, 10.0, 201)), {1.0, 0.5, 0.25},
                                         {1.0}, 1.0, SolverOptions{});
    EXPECT_EQ(rep.xi_star[0], 0.0);
    ASSERT_EQ(rep.rows.size(), 3u);
    EXPECT_TRUE(rep.nondecreasing[0]);
    EXPECT_TRUE(rep.strictly_increasing[0]);
}

TEST(Comparison, FrameIndependent) {
    const double eps = 0.25;
    const auto orig = canonical(Frame::original, eps, make_grid(1, 2.5, 201));
    const auto resc = canonical(Frame::rescaled, eps, make_grid(1, 10.0, 201));
    const double a = comparison_level(orig, eps, SolverOptions{});
    const double b = comparison_level(resc, eps, SolverOptions{});
    EXPECT_LE(std::abs(a - b), 1e-8 * b);
}

TEST(Comparison, BoundsFamilyLevelFromBelow) {
    const auto prob = canonical(Frame::rescaled, 0.5, make_grid(1, 10.0, 201));
    const double lower = comparison_level(prob, 0.5, SolverOptions{});
    const auto gs = solve_ground_state(make_model(prob), assemble_problem_form(prob), SolverOptions{});
    ASSERT_TRUE(gs.converged);
    EXPECT_GT(lower, 0.0);
    EXPECT_LE(lower, gs.level);
}

TEST(ScanCxi, FlatCoefficients) {
    const auto& d = small_fixture();
    const Grid g = make_grid(1, 10.0, 201);
    const auto t = scan_C_xi(flat(), 0.4, 2.0, 1, ScanOptions{5.0, 11}, d, {Point{0.4, 0.0}}, g, SolverOptions{});
    ASSERT_EQ(t.rows.size(), 11u);
    for (const auto& r : t.rows) EXPECT_DOUBLE_EQ(r.C_analytic, *d.level_on(g));
    EXPECT_EQ(t.argmin[0], -5.0);
    std::size_t spots = 0;
    for (const auto& r : t.rows)
        if (r.C_spotcheck) {
            ++spots;
            EXPECT_EQ(r.xi[0], 0.0);
            EXPECT_LE(*r.rel_error, 1e-10);
        }
    EXPECT_EQ(spots, 1u);
}

TEST(ScanCxi, CanonicalMinimumAtOrigin) {
    const auto t = scan_C_xi(canonical(Frame::original, 1.0, make_grid(1, 10.0, 201)).coeffs, 0.4, 2.0, 1,
                             ScanOptions{}, small_fixture(), {}, make_grid(1, 10.0, 201), SolverOptions{});
    EXPECT_EQ(t.argmin[0], 0.0);
    EXPECT_EQ(t.max_spot_error, 0.0);
}

TEST(Smoothing, HandExample) {
    const Grid g = make_grid(1, 1.0, 3);
    const auto s = smooth_once(Field(g, {3.0, 0.0, 0.0}));
    EXPECT_DOUBLE_EQ(s[0], 1.0);
    EXPECT_DOUBLE_EQ(s[1], 1.0);
    EXPECT_DOUBLE_EQ(s[2], 0.0);
    const Grid g2 = make_grid(2, 1.0, 3);
    std::vector<double> v(9, 0.0);
    v[4] = 5.0;
    const auto s2 = smooth_once(Field(g2, v));
    EXPECT_DOUBLE_EQ(s2[4], 1.0);
    EXPECT_DOUBLE_EQ(s2[1], 1.0);
    EXPECT_DOUBLE_EQ(s2[0], 0.0);
}

TEST(Audit, SmallRunPassesAndIsReproducible) {
    std::vector<ProblemSpec> specs;
    for (double eps : {1.0, 0.5}) specs.push_back(canonical(Frame::rescaled, eps, make_grid(1, 5.0, 101)));
    const auto a = norm_equivalence_audit(specs, 40, 11, 1);
    const auto b = norm_equivalence_audit(specs, 40, 11, 3);
    EXPECT_TRUE(a.pass);
    EXPECT_EQ(a.failures, 0u);
    ASSERT_EQ(a.rows.size(), 40u);
    EXPECT_EQ(a.rows[1].spec_index, 1u);
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        EXPECT_EQ(a.rows[i].lhs, b.rows[i].lhs);
        EXPECT_EQ(a.rows[i].rhs, b.rows[i].rhs);
        EXPECT_LE(a.rows[i].ratio, a.worst_ratio);
    }
    const auto c = norm_equivalence_audit(specs, 40, 12, 1);
    EXPECT_NE(a.rows[0].lhs, c.rows[0].lhs);
}

TEST(Audit, Errors) {
    auto spec = canonical(Frame::rescaled, 1.0, make_grid(1, 5.0, 51));
    EXPECT_ERROR_CONTAINS(norm_equivalence_audit({spec}, 0, 1), "sample count");
    EXPECT_ERROR_CONTAINS(norm_equivalence_audit({}, 5, 1), "no audit specs");
    spec.scope.kind = ScopeSpec::Kind::infinite;
    EXPECT_ERROR_CONTAINS(norm_equivalence_audit({spec}, 5, 1), "finite scope");
}
