#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "nlrs/nonlocal_op.hpp"
#include "support/expect_error.hpp"
#include "support/oracles.hpp"

using namespace nlrs;

namespace {

FormOptions no_ghosts() {
    FormOptions o;
    o.zero_extension = false;
    return o;
}

ScopeSpec saturating(double rho0, double rho_inf, double width) {
    return ScopeSpec{ScopeSpec::Kind::saturating, rho0, rho_inf, width};
}

}  // namespace

TEST(Scope, EvalFrames) {
    const ScopeSpec two{ScopeSpec::Kind::constant, 2.0, 2.0, 1.0};
    EXPECT_DOUBLE_EQ(eval_scope(two, {0.7, 0}, 1, 0.5, Frame::rescaled), 4.0);
    EXPECT_DOUBLE_EQ(eval_scope(two, {0.7, 0}, 1, 0.5, Frame::original), 2.0);
    const ScopeSpec sat = saturating(1.0, 3.0, 2.0);
    for (Point x : {Point{0, 0}, Point{1.5, 0}, Point{-4, 0}})
        EXPECT_DOUBLE_EQ(eval_scope(sat, x, 1, 1.0, Frame::rescaled), eval_scope(sat, x, 1, 1.0, Frame::original));
    EXPECT_DOUBLE_EQ(sat({0, 0}, 1), 1.0);
    EXPECT_NEAR(sat({1e4, 0}, 1), 3.0, 1e-6);
    EXPECT_LT(sat({1e4, 0}, 1), 3.0);
    EXPECT_DOUBLE_EQ(eval_scope(sat, {2.0, 0}, 1, 0.25, Frame::rescaled), sat({0.5, 0}, 1) / 0.25);
}

TEST(Scope, HypothesisH1) {
    EXPECT_ERROR_CONTAINS((ScopeSpec{ScopeSpec::Kind::constant, 0.0, 0.0, 1.0}.validate(1)), "(H1)");
    EXPECT_ERROR_CONTAINS(saturating(2.0, 1.0, 1.0).validate(1), "(H1)");
    EXPECT_NO_THROW(saturating(0.5, 2.0, 1.0).validate(2));
    EXPECT_NO_THROW((ScopeSpec{ScopeSpec::Kind::constant, 1.0, 1.0, 1.0}.validate(1)));
}

TEST(RegionalForm, TwoNodeHandSum) {
    // Nodes -1, 0, 1 (h = 1); u = (1, 0, 0) and rho = 1.5: only the pair (-1, 0) interacts,
    // once per ordering, each with weight 1/1^{1+2 alpha}.
    const Grid g = make_grid(1, 1.0, 3);
    for (double alpha : {0.1, 0.4, 0.9}) {
        const auto A = assemble_regional_form(g, constant_scope(1.5), alpha, no_ghosts());
        EXPECT_DOUBLE_EQ(quad_energy(A, Field(g, {1.0, 0.0, 0.0})), 2.0);
    }
}

TEST(RegionalForm, ConstantsInKernelWithoutGhosts) {
    const Grid g = make_grid(1, 3.0, 61);
    const auto A = assemble_regional_form(g, constant_scope(1.0), 0.4, no_ghosts());
    EXPECT_NEAR(quad_energy(A, Field(g, std::vector<double>(g.size(), 2.5))), 0.0, 1e-12);
    const auto B = assemble_regional_form(g, constant_scope(1.0), 0.4);
    EXPECT_GT(quad_energy(B, Field(g, std::vector<double>(g.size(), 2.5))), 0.0);
}

TEST(RegionalForm, MatchesDoubleLoopOracle1d) {
    std::mt19937_64 rng(11);
    const Grid g = make_grid(1, 5.0, 101);
    const double alpha = 0.4;
    for (bool ghosts : {false, true}) {
        for (double rho : {0.35, 2.0, 50.0}) {
            FormOptions o;
            o.zero_extension = ghosts;
            const auto A = assemble_regional_form(g, constant_scope(rho), alpha, o);
            for (int k = 0; k < 3; ++k) {
                const Field u = oracle::random_field(g, rng);
                const double ref = oracle::regional_double_loop(
                    u, [rho](const Point&) { return rho; }, rho, alpha, ghosts);
                EXPECT_LE(oracle::rel_diff(quad_energy(A, u), ref), 1e-12) << "rho=" << rho << " ghosts=" << ghosts;
            }
        }
    }
}

TEST(RegionalForm, MatchesDoubleLoopOracleVariableScope) {
    std::mt19937_64 rng(12);
    const double alpha = 0.3;
    for (int n : {1, 2}) {
        const Grid g = make_grid(n, 2.0, n == 1 ? 41 : 11);
        const ScopeSpec spec = saturating(0.45, 1.3, 0.8);
        const auto scope = make_scope_field(spec, n, 0.5, Frame::rescaled);
        const auto A = assemble_regional_form(g, scope, alpha);
        const Field u = oracle::random_field(g, rng);
        const double ref = oracle::regional_double_loop(u, scope.radius, scope.sup, alpha, true);
        EXPECT_LE(oracle::rel_diff(quad_energy(A, u), ref), 1e-12) << "n=" << n;
    }
}

TEST(RegionalForm, ExactSymmetry) {
    for (int n : {1, 2}) {
        const Grid g = make_grid(n, 2.0, n == 1 ? 81 : 15);
        const auto A = assemble_regional_form(g, make_scope_field(saturating(0.3, 1.1, 0.5), n, 1.0, Frame::original), 0.4);
        const SparseRowMatrix At = A.matrix().transpose();
        EXPECT_EQ(A.matrix().nonZeros(), At.nonZeros());
        const SparseRowMatrix D = A.matrix() - At;
        for (Eigen::Index i = 0; i < D.outerSize(); ++i)
            for (SparseRowMatrix::InnerIterator it(D, i); it; ++it) EXPECT_EQ(it.value(), 0.0);
    }
}

TEST(RegionalForm, PositiveSemidefinite) {
    std::mt19937_64 rng(13);
    const Grid g = make_grid(1, 4.0, 81);
    const auto A = assemble_regional_form(g, make_scope_field(saturating(0.2, 2.0, 1.0), 1, 1.0, Frame::original), 0.6);
    for (int k = 0; k < 100; ++k) EXPECT_GE(quad_energy(A, oracle::random_field(g, rng)), 0.0);
    const Eigen::MatrixXd dense(A.matrix());
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-12 * es.eigenvalues().maxCoeff());
    const auto B = assemble_regional_form(g, constant_scope(1.0), 0.6, no_ghosts());
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eb{Eigen::MatrixXd(B.matrix())};
    EXPECT_NEAR(eb.eigenvalues().minCoeff(), 0.0, 1e-12 * eb.eigenvalues().maxCoeff());
}

TEST(RegionalForm, ScopeMonotonicity) {
    std::mt19937_64 rng(14);
    const Grid g = make_grid(1, 5.0, 101);
    const auto A0 = assemble_regional_form(g, constant_scope(0.5), 0.4);
    const auto A1 = assemble_regional_form(g, make_scope_field(saturating(0.5, 1.5, 1.0), 1, 1.0, Frame::original), 0.4);
    const auto A2 = assemble_regional_form(g, constant_scope(1.5), 0.4);
    for (int k = 0; k < 100; ++k) {
        const Field u = oracle::random_field(g, rng);
        const double e0 = quad_energy(A0, u), e1 = quad_energy(A1, u), e2 = quad_energy(A2, u);
        EXPECT_LE(e0, e1);
        EXPECT_LE(e1, e2);
    }
}

TEST(RegionalForm, ThreadCountDoesNotChangeMatrix) {
    const Grid g = make_grid(2, 2.0, 21);
    const auto scope = make_scope_field(saturating(0.3, 0.9, 0.5), 2, 1.0, Frame::original);
    FormOptions one, three;
    three.threads = 3;
    const auto A = assemble_regional_form(g, scope, 0.4, one);
    const auto B = assemble_regional_form(g, scope, 0.4, three);
    ASSERT_EQ(A.matrix().nonZeros(), B.matrix().nonZeros());
    for (Eigen::Index k = 0; k < A.matrix().nonZeros(); ++k) {
        EXPECT_EQ(A.matrix().valuePtr()[k], B.matrix().valuePtr()[k]);
        EXPECT_EQ(A.matrix().innerIndexPtr()[k], B.matrix().innerIndexPtr()[k]);
    }
}

TEST(RegionalForm, RejectsBadAlpha) {
    const Grid g = make_grid(1, 1.0, 11);
    EXPECT_THROW(assemble_regional_form(g, constant_scope(1.0), 1.0), std::invalid_argument);
    EXPECT_THROW(assemble_full_form(g, 0.0, true), std::invalid_argument);
}

TEST(RegionalForm, ShellWeightScalesNearestNeighbours) {
    const Grid g = make_grid(1, 1.0, 11);
    FormOptions o = no_ghosts();
    o.shell_weight = 1.5;
    const auto A = assemble_regional_form(g, constant_scope(0.25), 0.4, no_ghosts());
    const auto B = assemble_regional_form(g, constant_scope(0.25), 0.4, o);
    EXPECT_DOUBLE_EQ(B.matrix().coeff(5, 6), 1.5 * A.matrix().coeff(5, 6));
    EXPECT_DOUBLE_EQ(B.matrix().coeff(5, 7), A.matrix().coeff(5, 7));
}

TEST(FullForm, ZeroFieldAndTailTerm) {
    const Grid g = make_grid(1, 3.0, 31);
    const double alpha = 0.4;
    const auto on = assemble_full_form(g, alpha, true);
    const auto off = assemble_full_form(g, alpha, false);
    EXPECT_EQ(quad_energy(on, Field::zeros(g)), 0.0);
    EXPECT_EQ(quad_energy(off, Field::zeros(g)), 0.0);
    const double R = full_form_tail_radius(g);
    EXPECT_DOUBLE_EQ(R, 6.0 + g.spacing());
    // Two rays, each integral 1/(2 alpha R^{2 alpha}), counted for both orderings.
    const double tail = g.spacing() * 2.0 / (alpha * std::pow(R, 2.0 * alpha));
    std::vector<double> v(g.size(), 0.0);
    v[7] = 1.7;
    const Field u(g, v);
    EXPECT_NEAR(quad_energy(on, u) - quad_energy(off, u), 1.7 * 1.7 * tail, 1e-14);
    const auto off2 = assemble_full_form(make_grid(2, 1.0, 5), alpha, false);
    const auto on2 = assemble_full_form(make_grid(2, 1.0, 5), alpha, true);
    const double R2 = full_form_tail_radius(on2.grid());
    EXPECT_NEAR(on2.matrix().coeff(3, 3) - off2.matrix().coeff(3, 3),
                0.25 * 2.0 * M_PI / (alpha * std::pow(R2, 2.0 * alpha)), 1e-14);
}

TEST(FullForm, MatchesDoubleLoopOracle) {
    std::mt19937_64 rng(15);
    const Grid g = make_grid(1, 2.0, 41);
    const auto A = assemble_full_form(g, 0.4, false);
    const double R = full_form_tail_radius(g);
    const Field u = oracle::random_field(g, rng);
    EXPECT_LE(oracle::rel_diff(quad_energy(A, u),
                               oracle::regional_double_loop(u, [R](const Point&) { return R; }, R, 0.4, true)),
              1e-12);
}

TEST(FullForm, DominatesRegional) {
    std::mt19937_64 rng(16);
    const Grid g = make_grid(1, 5.0, 101);
    const auto F = assemble_full_form(g, 0.4, true);
    const auto Foff = assemble_full_form(g, 0.4, false);
    const auto A = assemble_regional_form(g, make_scope_field(saturating(0.5, 3.0, 1.0), 1, 1.0, Frame::original), 0.4);
    for (int k = 0; k < 50; ++k) {
        const Field u = oracle::random_field(g, rng);
        EXPECT_GE(quad_energy(Foff, u), quad_energy(A, u));
        EXPECT_GE(quad_energy(F, u), quad_energy(Foff, u));
    }
}

TEST(FullForm, RegionalWithTailRadiusScopeAgrees) {
    std::mt19937_64 rng(17);
    for (int n : {1, 2}) {
        const Grid g = make_grid(n, 2.0, n == 1 ? 81 : 13);
        const auto F = assemble_full_form(g, 0.4, false);
        const auto A = assemble_regional_form(g, constant_scope(full_form_tail_radius(g)), 0.4);
        for (int k = 0; k < 5; ++k) {
            const Field u = oracle::random_field(g, rng);
            EXPECT_LE(oracle::rel_diff(quad_energy(F, u), quad_energy(A, u)), 1e-12);
        }
    }
}

TEST(ApplyForm, ZeroSymmetryAndDenseOracle) {
    std::mt19937_64 rng(18);
    const Grid g = make_grid(1, 5.0, 201);
    const auto scope = make_scope_field(saturating(0.4, 1.2, 1.0), 1, 1.0, Frame::original);
    const auto A = assemble_regional_form(g, scope, 0.4);
    const Field zero = apply_form(A, Field::zeros(g));
    for (double v : zero.values()) EXPECT_EQ(v, 0.0);

    const Field u = oracle::random_field(g, rng), w = oracle::random_field(g, rng);
    const double wAu = oracle::dot(w, apply_form(A, u)), uAw = oracle::dot(u, apply_form(A, w));
    EXPECT_LE(oracle::rel_diff(wAu, uAw), 1e-12);
    EXPECT_LE(oracle::rel_diff(oracle::dot(u, apply_form(A, u)), quad_energy(A, u)), 1e-12);

    const Eigen::MatrixXd D = oracle::regional_dense(g, scope.radius, scope.sup, 0.4, true);
    const Eigen::VectorXd ref = D * Eigen::Map<const Eigen::VectorXd>(u.values().data(), static_cast<Eigen::Index>(u.size()));
    const Field got = apply_form(A, u);
    double scale = ref.cwiseAbs().maxCoeff();
    for (std::size_t i = 0; i < u.size(); ++i) EXPECT_NEAR(got[i], ref[static_cast<Eigen::Index>(i)], 1e-12 * scale);
}

TEST(ApplyForm, DenseOracle2d) {
    std::mt19937_64 rng(19);
    const Grid g = make_grid(2, 1.5, 11);
    const auto scope = make_scope_field(saturating(0.35, 1.0, 0.7), 2, 1.0, Frame::original);
    const auto A = assemble_regional_form(g, scope, 0.7);
    const Eigen::MatrixXd D = oracle::regional_dense(g, scope.radius, scope.sup, 0.7, true);
    const Eigen::MatrixXd S(A.matrix());
    EXPECT_LE((S - D).cwiseAbs().maxCoeff(), 1e-12 * D.cwiseAbs().maxCoeff());
}

TEST(ApplyForm, GridMismatch) {
    const auto A = assemble_regional_form(make_grid(1, 1.0, 11), constant_scope(0.5), 0.4);
    EXPECT_ERROR_CONTAINS(apply_form(A, Field::zeros(make_grid(1, 1.0, 13))), "grid mismatch");
    EXPECT_ERROR_CONTAINS(quad_energy(A, Field::zeros(make_grid(1, 2.0, 11))), "grid mismatch");
}

TEST(QuadEnergy, QuadraticHomogeneity) {
    std::mt19937_64 rng(20);
    const Grid g = make_grid(1, 3.0, 61);
    const auto A = assemble_regional_form(g, constant_scope(0.8), 0.4);
    const Field u = oracle::random_field(g, rng);
    std::vector<double> v(u.values().begin(), u.values().end());
    for (double& x : v) x *= -2.5;
    EXPECT_LE(oracle::rel_diff(quad_energy(A, Field(g, v)), 6.25 * quad_energy(A, u)), 1e-13);
    EXPECT_EQ(quad_energy(A, Field::zeros(g)), 0.0);
}

TEST(QuadEnergy, TranslationInvariantForInteriorSupport) {
    const Grid g = make_grid(1, 10.0, 201);
    const auto A = assemble_regional_form(g, constant_scope(1.0), 0.4);
    const Field u = sample_profile(g, Profile::from_name("bump", {-2.0, 0}, 2.0, 1.0));
    const Field s = sample_profile(g, Profile::from_name("bump", {3.0, 0}, 2.0, 1.0));
    EXPECT_LE(oracle::rel_diff(quad_energy(A, u), quad_energy(A, s)), 1e-12);

}

TEST(NormEquivalence, ConstantFromDisplay) {
    EXPECT_DOUBLE_EQ(norm_equivalence_constant(1.0, 0.25, 1.0, 1), 17.0);
    EXPECT_DOUBLE_EQ(norm_equivalence_constant(2.0, 0.25, 1.0, 1), 8.5);
    EXPECT_DOUBLE_EQ(norm_equivalence_constant(100.0, 0.25, 1.0, 1), 1.0);
    EXPECT_DOUBLE_EQ(norm_equivalence_constant(1.0, 0.5, 1.0, 2), 1.0 + 8.0 * M_PI);
}

TEST(NormEquivalence, ConstantFieldHoldsWithSlack) {
    const Grid g = make_grid(1, 40.0, 401);
    const Field u(g, std::vector<double>(g.size(), 1.0));
    const Field Q(g, std::vector<double>(g.size(), 1.5));
    const auto A = assemble_regional_form(g, constant_scope(1.0), 0.25);
    const auto F = assemble_full_form(g, 0.25, true);
    const auto r = check_norm_equivalence(u, A, F, Q, 1.0, 0.25, 1.0);
    EXPECT_TRUE(r.holds);
    EXPECT_LT(r.lhs, 0.5 * r.rhs);
    EXPECT_DOUBLE_EQ(r.constant, 17.0);
    EXPECT_ERROR_CONTAINS(check_norm_equivalence(Field::zeros(g), A, F, Q, 1.0, 0.25, 1.0), "zero field");
}

TEST(NormEquivalence, RandomFieldsHold) {
    std::mt19937_64 rng(21);
    const Grid g = make_grid(1, 5.0, 101);
    const auto A = assemble_regional_form(g, constant_scope(1.0), 0.4);
    const auto F = assemble_full_form(g, 0.4, true);
    const Field Q(g, std::vector<double>(g.size(), 1.0));
    for (int k = 0; k < 100; ++k) EXPECT_TRUE(check_norm_equivalence(oracle::random_field(g, rng), A, F, Q, 1.0, 0.4, 1.0).holds);
}

TEST(FormDump, SortedCoordinateList) {
    const Grid g = make_grid(1, 1.0, 5);
    const auto A = assemble_regional_form(g, constant_scope(0.6), 0.4);
    const auto path = std::filesystem::temp_directory_path() / "nlrs_test_form.coo";
    write_form_coo(A, path);
    std::ifstream is(path);
    std::string line;
    long prev_i = -1, prev_j = -1;
    int count = 0;
    while (std::getline(is, line)) {
        std::istringstream ls(line);
        long i, j;
        double v;
        ls >> i >> j >> v;
        EXPECT_TRUE(i > prev_i || (i == prev_i && j > prev_j));
        EXPECT_DOUBLE_EQ(v, A.matrix().coeff(i, j));
        prev_i = i;
        prev_j = j;
        ++count;
    }
    EXPECT_EQ(count, A.matrix().nonZeros());
    std::filesystem::remove(path);
}
