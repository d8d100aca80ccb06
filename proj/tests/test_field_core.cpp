#include "bihar/errors.hpp"
#include "bihar/fourier.hpp"
#include "bihar/reconstruct.hpp"
#include "bihar/stencil.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace bihar;

namespace {

double max_interior(const Grid& g, const CVec& v, int margin) {
    double m = 0.0;
    for (std::size_t p = 0; p < g.size(); ++p) {
        auto i = g.unravel(p);
        bool in = true;
        for (int a = 0; a < g.dim; ++a)
            if (i[a] < margin || i[a] >= g.n[a] - margin) in = false;
        if (in) m = std::max(m, std::abs(v[static_cast<Eigen::Index>(p)]));
    }
    return m;
}

// smooth and periodic on the grid's Fourier period
ScalarField periodic_field(const Grid& g) {
    const double P0 = g.period(0), P1 = g.period(1);
    return ScalarField::sample(g, [=](const Point& x) {
        const double t = 2 * std::numbers::pi * (x[0] - g.lo[0]) / P0, s = 2 * std::numbers::pi * (x[1] - g.lo[1]) / P1;
        return cplx(std::sin(t) * std::cos(2 * s), 0.5 * std::cos(t + s));
    });
}

}  // namespace

TEST(Grid, RejectsTooFewNodes) {
    Grid g = Grid::cube(2, 0.0, 1.0, 8);
    EXPECT_NO_THROW(g.validate());
    g.n[0] = 4;
    EXPECT_THROW(g.validate(), ShapeError);
    EXPECT_THROW(Grid::cube(4, 0.0, 1.0, 16).validate(), ShapeError);
}

TEST(Grid, IndexRoundTrip) {
    const Grid g = Grid::cube(3, -1.0, 1.0, 9);
    for (std::size_t p : {std::size_t{0}, std::size_t{17}, g.size() - 1}) EXPECT_EQ(g.index(g.unravel(p)), p);
    EXPECT_DOUBLE_EQ(g.point(g.size() - 1)[2], 1.0);
}

TEST(Stencil, DirectionalDerivativeOfLinearFieldIsExact) {
    const Grid g = Grid::cube(3, -0.5, 0.5, 12);
    const Point nu{0.3, -1.2, 0.7};
    const ScalarField f = ScalarField::sample(g, [&](const Point& x) { return cplx(nu[0] * x[0] + nu[1] * x[1] + nu[2] * x[2]); });
    const CPoint mu{cplx(0.5), cplx(0.25), cplx(-2.0)};
    const ScalarField d = directional_derivative(f, mu);
    const cplx want = mu[0] * nu[0] + mu[1] * nu[1] + mu[2] * nu[2];
    for (Eigen::Index i = 0; i < d.v.size(); ++i) EXPECT_NEAR(std::abs(d.v[i] - want), 0.0, 1e-12);
}

TEST(Stencil, PlaneWaveOrthogonalToComplexDirectionIsAnnihilated) {
    const Grid g = Grid::cube(3, -0.5, 0.5, 12);
    const double k = 3.0;
    const ScalarField f = ScalarField::sample(g, [&](const Point& x) { return std::exp(cplx(0, -k * x[2])); });
    const ScalarField d = directional_derivative(f, {cplx(1), cplx(0, 1), cplx(0)});
    EXPECT_LE(d.v.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Stencil, ZeroDirectionRejected) {
    const Grid g = Grid::cube(2, 0.0, 1.0, 8);
    EXPECT_THROW(directional_derivative(ScalarField::zeros(g), {cplx(0), cplx(0), cplx(0)}), ParameterError);
}

TEST(Stencil, LaplacianOfConstantVanishes) {
    const Grid g = Grid::cube(3, 0.0, 1.0, 10);
    ScalarField f = ScalarField::zeros(g);
    f.v.setConstant(2.5);
    EXPECT_LE(laplacian(f).v.cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Stencil, BilaplacianOfQuarticIs24) {
    const Grid g = Grid::cube(2, -1.0, 1.0, 16);
    const ScalarField f = ScalarField::sample(g, [](const Point& x) { return cplx(std::pow(x[0], 4)); });
    const ScalarField b = bilaplacian(f);
    CVec off = b.v;
    off.array() -= 24.0;
    EXPECT_LE(max_interior(g, off, 2), 1e-8);
}

TEST(Stencil, BilaplacianIsLaplacianTwice) {
    const Grid g = Grid::cube(3, -1.0, 1.0, 10);
    const ScalarField f = periodic_field(g);
    EXPECT_EQ((bilaplacian(f).v - laplacian(laplacian(f)).v).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Stencil, LaplacianConvergesToSpectralOracleAtSecondOrder) {
    double prev = 0.0;
    for (int n : {24, 48}) {
        Grid g = Grid::cube(2, 0.0, 1.0, n);
        const ScalarField f = periodic_field(g);
        const CVec spec = spectral_d1(g, spectral_d1(g, f.v, 0), 0) + spectral_d1(g, spectral_d1(g, f.v, 1), 1);
        const double err = max_interior(g, laplacian(f).v - spec, 1) / spec.cwiseAbs().maxCoeff();
        if (prev > 0.0) {
            const double order = std::log2(prev / err);
            EXPECT_GT(order, 1.7);
            EXPECT_LT(order, 2.3);
        }
        prev = err;
    }
}

TEST(Fourier, UnitMultiplierIsIdentity) {
    const Grid g = Grid::cube(3, -1.0, 1.0, 12);
    const ScalarField f = periodic_field(g);
    const CVec out = fourier_multiplier(g, f.v, [](const Point&) { return cplx(1.0); }, 1.0);
    EXPECT_LE((out - f.v).norm() / f.v.norm(), 1e-12);
}

TEST(Fourier, NonPeriodicGridRejected) {
    Grid g = Grid::cube(2, 0.0, 1.0, 8);
    g.periodic = false;
    EXPECT_THROW(fourier_multiplier(g, CVec::Zero(64), [](const Point&) { return cplx(1.0); }, 1.0), ValidationError);
}

TEST(Fourier, SingularSymbolReported) {
    const Grid g = Grid::cube(2, 0.0, 1.0, 8);
    EXPECT_THROW(fourier_multiplier(g, CVec::Ones(64), [](const Point& xi) { return cplx(1.0 / (xi[0] * 0.0)); }, 0.0),
                 SingularSymbolError);
}

TEST(Fourier, RieszPairMatchesMultiplier) {
    const Grid g = Grid::cube(3, -1.0, 1.0, 16);
    const ScalarField f = ScalarField::sample(g, [](const Point& x) { return cplx(std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / 0.1)); });
    const ScalarField rr = riesz(riesz(f, 0), 2);
    const CVec m = fourier_multiplier(g, f.v, [](const Point& xi) {
        return cplx(-xi[0] * xi[2] / (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]));
    }, 0.0);
    EXPECT_LE((rr.v - m).norm() / m.norm(), 1e-12);
}

// m = 1 / (i xi_1 - xi_2)^2 inverts (d_t + i d_s)^2 on mean-free fields; the
// check applies the operator back with spectral derivatives.
TEST(Fourier, InverseDbarSquaredSolvesItsEquation) {
    const Grid g = Grid::cube(2, 0.0, 1.0, 32);
    const ScalarField f = periodic_field(g);  // finitely many modes, mean free
    const CVec u = fourier_multiplier(g, f.v, [](const Point& xi) {
        const cplx s(-xi[1], xi[0]);
        return 1.0 / (s * s);
    }, 0.0);
    const CVec du = spectral_d1(g, u, 0) + cplx(0, 1) * spectral_d1(g, u, 1);
    const CVec d2u = spectral_d1(g, du, 0) + cplx(0, 1) * spectral_d1(g, du, 1);
    EXPECT_LE((d2u - f.v).norm() / f.v.norm(), 1e-10);
}

TEST(Fourier, SclNormAtOrderZeroIsL2AndIndependentOfH) {
    const Grid g = Grid::cube(3, -1.0, 1.0, 12);
    const ScalarField f = periodic_field(g);
    const double l2 = l2_norm(f);
    for (double h : {0.1, 0.5}) EXPECT_NEAR(scl_norm(f, 0.0, h), l2, 1e-12 * l2);
}

TEST(Fourier, SclNormOfSingleMode) {
    const Grid g = Grid::cube(2, 0.0, 1.0, 16);
    const double k = 2 * std::numbers::pi * 3 / g.period(0);
    const ScalarField f = ScalarField::sample(g, [&](const Point& x) { return std::exp(cplx(0, k * (x[0] - g.lo[0]))); });
    const double h = 0.2, s = 2.0;
    const double want = std::pow(1.0 + h * h * k * k, s / 2) * l2_norm(f);
    EXPECT_NEAR(scl_norm(f, s, h), want, 1e-10 * want);
}

// independent spectral sum of (1 + h^2 |xi|^2)^2 |f^|^2 via Parseval
TEST(Fourier, SclNormMatchesDirectSpectralSum) {
    const Grid g = Grid::cube(2, -1.0, 1.0, 20);
    const ScalarField f = ScalarField::sample(g, [](const Point& x) { return cplx(std::exp(-3 * x[0] * x[0]), x[1]); });
    const CVec F = fft(g, f.v);
    const double h = 0.3;
    double sum = 0.0;
    for (std::size_t p = 0; p < g.size(); ++p) {
        const Point xi = wavevector(g, p);
        const double w = 1 + h * h * (xi[0] * xi[0] + xi[1] * xi[1]);
        sum += w * w * std::norm(F[static_cast<Eigen::Index>(p)]);
    }
    const double want = std::sqrt(sum * g.cell_volume() / static_cast<double>(g.size()));
    EXPECT_NEAR(scl_norm(f, 2.0, h), want, 1e-10 * want);
}

TEST(Mask, BoxBoundaryIsFacesOnly) {
    const Grid g = Grid::cube(2, 0.0, 1.0, 12);
    const DomainMask m = box_mask(g, 1);
    // inside 8x8, boundary = 4 faces of 8 nodes
    EXPECT_EQ(m.inside_nodes().size(), 64u);
    EXPECT_EQ(m.boundary_nodes().size(), 32u);
    for (std::size_t p : m.boundary_nodes()) EXPECT_NEAR(std::hypot(m.normal[p][0], m.normal[p][1]), 1.0, 1e-15);
}

TEST(Mask, BallNormalsAreRadial) {
    const Grid g = Grid::cube(3, -1.0, 1.0, 16);
    const DomainMask m = ball_mask(g, {0, 0, 0}, 0.6);
    EXPECT_FALSE(m.boundary_nodes().empty());
    for (std::size_t p : m.boundary_nodes()) {
        const Point x = g.point(p);
        const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
        EXPECT_NEAR(m.normal[p][0] * x[0] + m.normal[p][1] * x[1] + m.normal[p][2] * x[2], r, 1e-12);
    }
}
