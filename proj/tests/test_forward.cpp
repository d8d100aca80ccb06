#include "bihar/errors.hpp"
#include "bihar/experiments.hpp"
#include "bihar/forward.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace bihar;

namespace {

CVec boundary_values(const DomainMask& m, const CVec& f) {
    auto nodes = m.boundary_nodes();
    CVec out(static_cast<Eigen::Index>(nodes.size()));
    for (std::size_t i = 0; i < nodes.size(); ++i) out[static_cast<Eigen::Index>(i)] = f[static_cast<Eigen::Index>(nodes[i])];
    return out;
}

ScalarField bump(const Grid& g, double a, double w, Point c = {0, 0, 0}) {
    return ScalarField::sample(g, [=](const Point& x) {
        double s = 0.0;
        for (int k = 0; k < g.dim; ++k) s += (x[k] - c[k]) * (x[k] - c[k]) / (w * w);
        const double u = 1.0 - s;
        return u > 0 ? cplx(a * u * u * u * u) : cplx(0.0);
    });
}

}  // namespace

TEST(Operator, ZeroCoefficientsGiveLaplacianSquared) {
    const Grid g = Grid::cube(2, 0.0, 1.0, 10);
    const SpMat L = assemble_operator(CoefficientSet::zeros(g));
    const SpMat Lap = laplacian_matrix(g);
    const SpMat D = L - Lap * Lap;
    double m = 0.0;
    for (int k = 0; k < D.outerSize(); ++k)
        for (SpMat::InnerIterator it(D, k); it; ++it) m = std::max(m, std::abs(it.value()));
    EXPECT_EQ(m, 0.0);
}

// L e^{ix.xi} with constant A = a I: the discrete symbol is s^2 + a s with
// s = sum (2 - 2 cos(xi dx)) / dx^2.
TEST(Operator, ConstantIsotropicSymbol) {
    const Grid g = Grid::cube(2, 0.0, 1.0, 16);
    CoefficientSet c = CoefficientSet::zeros(g);
    const double a = 0.7;
    c.A.at(0, 0).setConstant(a);
    c.A.at(1, 1).setConstant(a);
    const Point xi{3.0, -5.0, 0.0};
    const ScalarField u = ScalarField::sample(g, [&](const Point& x) { return std::exp(cplx(0, xi[0] * x[0] + xi[1] * x[1])); });
    const CVec Lu = apply_operator(c, u.v);
    double s = 0.0;
    for (int k = 0; k < 2; ++k) s += (2 - 2 * std::cos(xi[k] * g.dx(k))) / (g.dx(k) * g.dx(k));
    const cplx want = s * s + a * s;
    for (std::size_t p = 0; p < g.size(); ++p) {
        auto i = g.unravel(p);
        if (i[0] < 2 || i[1] < 2 || i[0] > 13 || i[1] > 13) continue;
        EXPECT_NEAR(std::abs(Lu[static_cast<Eigen::Index>(p)] - want * u.v[static_cast<Eigen::Index>(p)]), 0.0, 1e-8 * std::abs(want));
    }
}

TEST(Navier, HarmonicCubicIsRecoveredExactly) {
    const Grid g = Grid::cube(2, -0.5, 0.5, 20);
    const DomainMask m = box_mask(g, 1);
    const ScalarField u = ScalarField::sample(g, [](const Point& x) { return cplx(x[0] * x[0] * x[0] - 3 * x[0] * x[1] * x[1]); });
    const ScalarField sol = solve_navier(CoefficientSet::zeros(g), m, navier_traces(m, u.v), ScalarField::zeros(g));
    double err = 0.0;
    for (std::size_t p : m.inside_nodes()) err = std::max(err, std::abs(sol.v[static_cast<Eigen::Index>(p)] - u.v[static_cast<Eigen::Index>(p)]));
    EXPECT_LE(err, 1e-10);
}

TEST(Navier, ZeroDataGivesZero) {
    const Grid g = Grid::cube(2, -0.5, 0.5, 16);
    const DomainMask m = box_mask(g, 1);
    CoefficientSet c = CoefficientSet::zeros(g);
    c.q = bump(g, 2.0, 0.3);
    const auto nb = static_cast<Eigen::Index>(m.boundary_nodes().size());
    const ScalarField sol = solve_navier(c, m, {CVec::Zero(nb), CVec::Zero(nb)}, ScalarField::zeros(g));
    EXPECT_EQ(sol.v.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Navier, SolveIsLinear) {
    const Grid g = Grid::cube(2, -0.5, 0.5, 16);
    const DomainMask m = box_mask(g, 1);
    CoefficientSet c = CoefficientSet::zeros(g);
    c.q = bump(g, 2.0, 0.3);
    c.B.c[0] = bump(g, 0.5, 0.3).v;
    const NavierSolver solver(c, m);
    const auto basis = sine_mode_basis(m, 2);
    const ScalarField rhs = bump(g, 1.0, 0.2);
    const cplx al(0.3, -1.2), be(2.0, 0.5);
    const NavierBoundaryData mix{al * basis[0].f0 + be * basis[3].f0, al * basis[0].f1 + be * basis[3].f1};
    ScalarField rhs2 = rhs;
    rhs2.v *= al;
    const auto s0 = solver.solve(basis[0], rhs);
    const auto s1 = solver.solve(basis[3], ScalarField::zeros(g));
    const auto s = solver.solve(mix, rhs2);
    EXPECT_LE((s.u.v - al * s0.u.v - be * s1.u.v).norm(), 1e-12 * s.u.v.norm());
}

TEST(Navier, CoefficientsOutsideDomainRejected) {
    const Grid g = Grid::cube(2, -0.5, 0.5, 16);
    const DomainMask m = box_mask(g, 2);
    CoefficientSet c = CoefficientSet::zeros(g);
    c.q.v[0] = 1.0;
    EXPECT_THROW(check_support(c, m), ExtentError);
}

TEST(Navier, ManufacturedOrder) {
    ForwardParams p;
    p.ns = {24, 48};
    p.symmetry = false;
    const ExperimentResult r = run_forward_order(p);
    ASSERT_EQ(r.checks.size(), 1u);
    EXPECT_TRUE(r.checks[0].passed) << r.checks[0].value;
}

TEST(Navier, ManufacturedOrder3D) {
    ForwardParams p;
    p.dim = 3;
    p.ns = {16, 28};
    p.symmetry = false;
    const ExperimentResult r = run_forward_order(p);
    ASSERT_EQ(r.checks.size(), 1u);
    EXPECT_GT(r.checks[0].value, 1.6);
    EXPECT_LT(r.checks[0].value, 2.4);
}

TEST(DNMap, GreenPairingSymmetricToDiscretisationOrder) {
    ForwardParams p;
    p.ns = {24, 48};
    p.order = false;
    const ExperimentResult r = run_forward_order(p);
    ASSERT_EQ(r.checks.size(), 1u);
    EXPECT_TRUE(r.checks[0].passed) << r.checks[0].value << " vs " << r.checks[0].hi;
}

TEST(DNMap, Deterministic) {
    const Grid g = Grid::cube(2, -0.5, 0.5, 16);
    const DomainMask m = box_mask(g, 1);
    CoefficientSet c = CoefficientSet::zeros(g);
    c.q = bump(g, 2.0, 0.3);
    const auto basis = sine_mode_basis(m, 2);
    EXPECT_EQ((dn_map(c, m, basis).m - dn_map(c, m, basis).m).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Adjoint, RealConstantCoefficientsAreSelfAdjoint) {
    const Grid g = Grid::cube(2, 0.0, 1.0, 12);
    CoefficientSet c = CoefficientSet::zeros(g);
    c.A.at(0, 0).setConstant(0.4);
    c.A.at(0, 1).setConstant(-0.2);
    c.q.v.setConstant(1.5);
    const CoefficientSet s = adjoint_coefficients(c);
    EXPECT_LE((s.A.at(0, 1) - c.A.at(0, 1)).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LE(s.B.c[0].cwiseAbs().maxCoeff() + s.B.c[1].cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((s.q.v - c.q.v).cwiseAbs().maxCoeff(), 1e-12);
}

// A = 0, B real: q# = q + sum D_j B_j = q - i div B
TEST(Adjoint, DivergenceTermAgainstClosedForm) {
    const Grid g = Grid::cube(2, -1.0, 1.0, 41);
    CoefficientSet c = CoefficientSet::zeros(g);
    c.B.c[0] = ScalarField::sample(g, [](const Point& x) { return cplx(std::sin(x[0]) * x[1]); }).v;
    c.B.c[1] = ScalarField::sample(g, [](const Point& x) { return cplx(x[0] * x[1] * x[1]); }).v;
    const CoefficientSet s = adjoint_coefficients(c);
    const ScalarField want = ScalarField::sample(g, [](const Point& x) {
        return cplx(0, -1) * (std::cos(x[0]) * x[1] + 2 * x[0] * x[1]);
    });
    EXPECT_LE((s.q.v - want.v).cwiseAbs().maxCoeff(), 5e-3);
}

// the discrete correction terms cancel exactly on the second application
TEST(Adjoint, TwiceIsIdentity) {
    for (int n : {21, 41}) {
        const Grid g = Grid::cube(2, -1.0, 1.0, n);
        CoefficientSet c = CoefficientSet::zeros(g);
        c.A.at(0, 1) = ScalarField::sample(g, [](const Point& x) { return cplx(std::sin(x[0] + x[1]), 0.3 * x[0]); }).v;
        c.B.c[1] = ScalarField::sample(g, [](const Point& x) { return cplx(x[0], std::cos(x[1])); }).v;
        c.q.v.setConstant(cplx(0.2, 1.0));
        const CoefficientSet cc = adjoint_coefficients(adjoint_coefficients(c));
        const double err = (cc.q.v - c.q.v).cwiseAbs().maxCoeff() + (cc.B.c[1] - c.B.c[1]).cwiseAbs().maxCoeff();
        EXPECT_LE(err, 1e-12);
    }
}

TEST(Extension, ExtendThenRestrictIsIdentity) {
    const Grid small = Grid::cube(2, -0.5, 0.5, 11);
    const Grid big = Grid::cube(2, -1.0, 1.0, 21);
    CoefficientSet c = CoefficientSet::zeros(small);
    c.q = bump(small, 1.0, 0.4);
    c.A.at(0, 1) = bump(small, 0.2, 0.3).v;
    const CoefficientSet e = extend_coefficients(c, big);
    EXPECT_EQ(e.q.v.size(), static_cast<Eigen::Index>(big.size()));
    const CoefficientSet r = restrict_coefficients(e, small);
    EXPECT_EQ((r.q.v - c.q.v).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ((r.A.at(0, 1) - c.A.at(0, 1)).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Extension, MisalignedGridRejected) {
    const Grid small = Grid::cube(2, -0.5, 0.5, 11);
    const Grid big = Grid::cube(2, -1.0, 1.0, 20);
    EXPECT_THROW(extend_coefficients(CoefficientSet::zeros(small), big), ExtentError);
}

TEST(Traces, NavierTracesSampleBoundary) {
    const Grid g = Grid::cube(2, 0.0, 1.0, 10);
    const DomainMask m = box_mask(g, 1);
    const ScalarField u = ScalarField::sample(g, [](const Point& x) { return cplx(x[0] * x[0] + x[1]); });
    const NavierBoundaryData d = navier_traces(m, u.v);
    EXPECT_EQ((d.f0 - boundary_values(m, u.v)).norm(), 0.0);
    EXPECT_NEAR(d.f1.cwiseAbs().maxCoeff(), 2.0, 1e-10);
}
