#include "bihar/reconstruct.hpp"

#include "bihar/errors.hpp"
#include "bihar/fourier.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

namespace bihar {

namespace {

constexpr cplx I1{0.0, 1.0};

double dot(const Point& a, const Point& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

// wavevector with the Nyquist components zeroed (the symbol of the spectral
// first derivative)
Point odd_symbol(const Grid& g, std::size_t bin) {
    Point xi = wavevector(g, bin);
    auto i = g.unravel(bin);
    for (int a = 0; a < g.dim; ++a)
        if (g.n[a] % 2 == 0 && i[a] == g.n[a] / 2) xi[a] = 0.0;
    return xi;
}

// continuous transform table (centred at the grid centre) back to nodes
CVec inverse_table(const Grid& g, const CVec& table) {
    CVec F(table.size());
    for (std::size_t n = 0; n < g.size(); ++n) {
        const auto k = static_cast<Eigen::Index>(n);
        if (table[k] == 0.0) {
            F[k] = 0.0;
            continue;
        }
        const Point xi = wavevector(g, n);
        double ph = 0.0;
        for (int a = 0; a < g.dim; ++a) ph += xi[a] * 0.5 * (g.hi[a] - g.lo[a]);
        F[k] = table[k] * std::exp(-I1 * ph) / g.cell_volume();
    }
    return ifft(g, F);
}

void require_3d(const Grid& g, const char* who) {
    if (g.dim != 3)
        throw ParameterError(std::string(who) + ": reconstruction needs a 3-D grid (no xi is orthogonal to both CGO directions in 2-D)");
}

}  // namespace

// ---- tensor decomposition and Riesz transforms ----

TensorDecomposition tensor_decompose(const SymMatrixField& S) {
    const Grid& g = S.grid;
    const int n = g.dim;
    std::array<CVec, 6> Sh;
    for (int j = 0; j < n; ++j)
        for (int k = j; k < n; ++k) Sh[SymMatrixField::slot(j, k)] = fft(g, S.at(j, k));
    const auto N = static_cast<Eigen::Index>(g.size());
    std::array<CVec, 3> Vh;
    for (auto& v : Vh) v = CVec::Zero(N);
    std::array<CVec, 6> Fh = Sh;
    CVec dh = CVec::Zero(N), ph = CVec::Zero(N);
    for (std::size_t b = 0; b < g.size(); ++b) {
        const auto m = static_cast<Eigen::Index>(b);
        const Point k = odd_symbol(g, b);
        const double k2 = dot(k, k);
        if (k2 > 0.0) {
            CPoint w{0, 0, 0};
            for (int j = 0; j < n; ++j)
                for (int l = 0; l < n; ++l) w[j] += Sh[SymMatrixField::slot(j, l)][m] * k[l];
            cplx kw = 0.0;
            for (int j = 0; j < n; ++j) kw += k[j] * w[j];
            for (int j = 0; j < n; ++j) Vh[j][m] = (-2.0 * I1 * w[j] + I1 * k[j] * kw / k2) / k2;
            for (int j = 0; j < n; ++j)
                for (int l = j; l < n; ++l)
                    Fh[SymMatrixField::slot(j, l)][m] -= 0.5 * I1 * (k[j] * Vh[l][m] + k[l] * Vh[j][m]);
        }
        cplx tr = 0.0;
        for (int j = 0; j < n; ++j) tr += Fh[SymMatrixField::slot(j, j)][m];
        dh[m] = tr / static_cast<double>(n - 1);
        if (k2 > 0.0) {
            cplx kv = 0.0;
            for (int j = 0; j < n; ++j) kv += k[j] * Vh[j][m];
            ph[m] = (dh[m] - I1 * kv) / k2;
        }
    }
    TensorDecomposition out{SymMatrixField::zeros(g), VectorField::zeros(g), ScalarField::zeros(g),
                            ScalarField::zeros(g)};
    for (int j = 0; j < n; ++j) {
        out.V.c[j] = ifft(g, Vh[j]);
        for (int k = j; k < n; ++k) out.F.at(j, k) = ifft(g, Fh[SymMatrixField::slot(j, k)]);
    }
    out.d_sharp.v = ifft(g, dh);
    out.p.v = ifft(g, ph);
    return out;
}

SymMatrixField symmetric_gradient(const VectorField& V) {
    const Grid& g = V.grid;
    SymMatrixField out = SymMatrixField::zeros(g);
    std::array<std::array<CVec, 3>, 3> D;
    for (int j = 0; j < g.dim; ++j)
        for (int k = 0; k < g.dim; ++k) D[j][k] = spectral_d1(g, V.c[k], j);
    for (int j = 0; j < g.dim; ++j)
        for (int k = j; k < g.dim; ++k) out.at(j, k) = 0.5 * (D[j][k] + D[k][j]);
    return out;
}

VectorField divergence(const SymMatrixField& F) {
    const Grid& g = F.grid;
    VectorField out = VectorField::zeros(g);
    for (int k = 0; k < g.dim; ++k)
        for (int j = 0; j < g.dim; ++j) out.c[k] += spectral_d1(g, F.at(j, k), j);
    return out;
}

Eigen::Matrix3cd projection_symbol(cplx d, const Point& xi, int dim) {
    Eigen::Matrix3cd m = Eigen::Matrix3cd::Zero();
    const double x2 = dot(xi, xi);
    for (int j = 0; j < dim; ++j)
        for (int k = 0; k < dim; ++k)
            m(j, k) = d * ((j == k ? 1.0 : 0.0) - (x2 > 0.0 ? xi[j] * xi[k] / x2 : 0.0));
    return m;
}

ScalarField riesz(const ScalarField& f, int j) {
    return fourier_multiplier(
        f, [j](const Point& xi) { return cplx(xi[j]) / (I1 * std::sqrt(dot(xi, xi))); }, 0.0);
}

SymMatrixField riesz_projection(const ScalarField& d) {
    const Grid& g = d.grid;
    SymMatrixField out = SymMatrixField::zeros(g);
    std::array<ScalarField, 3> R;
    for (int j = 0; j < g.dim; ++j) R[j] = riesz(d, j);
    for (int j = 0; j < g.dim; ++j)
        for (int k = j; k < g.dim; ++k) {
            out.at(j, k) = riesz(R[k], j).v;
            if (j == k) out.at(j, k) += d.v;
        }
    return out;
}

XiFrame frame_for(const Point& xi) {
    const double x = std::sqrt(dot(xi, xi));
    if (x == 0.0) return {xi, {1, 0, 0}, {0, 1, 0}};
    const Point u{xi[0] / x, xi[1] / x, xi[2] / x};
    int a = 0;
    for (int b = 1; b < 3; ++b)
        if (std::abs(xi[b]) < std::abs(xi[a])) a = b;
    Point m{0, 0, 0};
    m[a] = 1.0;
    const double c = m[a] * u[a];
    for (int b = 0; b < 3; ++b) m[b] -= c * u[b];
    const double mn = std::sqrt(dot(m, m));
    for (double& v : m) v /= mn;
    const Point m2{u[1] * m[2] - u[2] * m[1], u[2] * m[0] - u[0] * m[2], u[0] * m[1] - u[1] * m[0]};
    return {xi, m, m2};
}

std::vector<std::size_t> xi_bins(const Grid& g) {
    double cap = 1e300;
    for (int a = 0; a < g.dim; ++a) cap = std::min(cap, 0.5 * std::numbers::pi / g.dx(a));
    std::vector<std::size_t> out;
    for (std::size_t b = 0; b < g.size(); ++b) {
        const Point xi = wavevector(g, b);
        if (std::sqrt(dot(xi, xi)) <= cap) out.push_back(b);
    }
    return out;
}

// ---- recovery ----

SecondOrderResult recover_second_order(const MomentTable& t, const RecoveryOptions& o) {
    const Grid& g = t.grid();
    require_3d(g, "recover_second_order");
    const auto N = static_cast<Eigen::Index>(g.size());
    CVec ph = CVec::Zero(N);
    SecondOrderResult r;
    for (std::size_t b : xi_bins(g)) {
        const XiFrame f = frame_for(wavevector(g, b));
        for (int s : {1, -1}) {
            const double e = std::abs(t.m2(b, f, s, AmplitudeChoice::plane_wave, AmplitudeChoice::one));
            r.eigen_violation = std::max(r.eigen_violation, e / t.scale());
        }
        ph[static_cast<Eigen::Index>(b)] =
            -0.5 * t.m2(b, f, 1, AmplitudeChoice::linear_plane_wave, AmplitudeChoice::linear);
    }
    r.eigen_ok = r.eigen_violation <= o.consistency_tol;
    if (!r.eigen_ok && o.strict)
        throw InconsistencyError("second order: eigen-structure violation " + std::to_string(r.eigen_violation) +
                                 " exceeds tolerance; the data do not come from d I + Hess p");
    r.p = {g, inverse_table(g, ph)};
    r.d_sharp = ScalarField::zeros(g);
    r.dA = SymMatrixField::zeros(g);
    return r;
}

FirstOrderResult recover_first_order(const MomentTable& t, const SecondOrderResult& s, const RecoveryOptions& o) {
    const Grid& g = t.grid();
    require_3d(g, "recover_first_order");
    require_same_grid(g, s.p.grid, "recover_first_order");
    const auto N = static_cast<Eigen::Index>(g.size());
    const CVec pft = fft(g, s.p.v);
    std::array<CVec, 3> Bh;
    for (auto& v : Bh) v = CVec::Zero(N);
    CVec Phih = CVec::Zero(N);
    FirstOrderResult r;
    const double vol = g.cell_volume();
    for (std::size_t b : xi_bins(g)) {
        const auto m = static_cast<Eigen::Index>(b);
        const Point xi = wavevector(g, b);
        const XiFrame f = frame_for(xi);
        const double x2 = dot(xi, xi);
        // p^ in the centred convention
        double ph = 0.0;
        for (int a = 0; a < 3; ++a) ph += xi[a] * 0.5 * (g.hi[a] - g.lo[a]);
        const cplx p_hat = pft[m] * std::exp(I1 * ph) * vol;

        const cplx zp = I1 * t.m1(b, f, 1, AmplitudeChoice::plane_wave, AmplitudeChoice::one);
        const cplx zm = I1 * t.m1(b, f, -1, AmplitudeChoice::plane_wave, AmplitudeChoice::one);
        const cplx b1 = 0.5 * (zp + zm);          // mu1 . dB^
        const cplx b2 = (zp - zm) / (2.0 * I1);   // mu2 . dB^
        r.curl_violation = std::max(r.curl_violation, std::max(std::abs(b1), std::abs(b2)) / t.scale());

        const cplx mphi = t.m1(b, f, 1, AmplitudeChoice::plane_wave, AmplitudeChoice::linear, -1.0);
        const cplx phi = I1 * (mphi + 2.0 * x2 * p_hat);
        Phih[m] = phi;
        for (int j = 0; j < 3; ++j) Bh[j][m] = b1 * f.mu1[j] + b2 * f.mu2[j] + I1 * xi[j] * phi;
    }
    r.curl_ok = r.curl_violation <= o.consistency_tol;
    if (!r.curl_ok && o.strict)
        throw InconsistencyError("first order: curl test violation " + std::to_string(r.curl_violation) +
                                 " exceeds tolerance; dB is not a gradient");
    r.dB = VectorField::zeros(g);
    for (int j = 0; j < 3; ++j) r.dB.c[j] = inverse_table(g, Bh[j]);
    r.Phi = {g, inverse_table(g, Phih)};
    for (int j = 0; j < 3; ++j)
        for (int k = j + 1; k < 3; ++k) {
            CVec c = spectral_d1(g, r.dB.c[k], j) - spectral_d1(g, r.dB.c[j], k);
            r.curl_field = std::max(r.curl_field, c.cwiseAbs().maxCoeff());
        }
    return r;
}

ScalarField recover_zeroth_order(const MomentTable& t, SecondOrderResult& s, const FirstOrderResult& f,
                                 const RecoveryOptions& o) {
    const Grid& g = t.grid();
    require_3d(g, "recover_zeroth_order");
    const auto N = static_cast<Eigen::Index>(g.size());
    CoefficientDelta only_b = CoefficientDelta::zeros(g);
    only_b.dB = f.dB;
    const MomentTable tb(only_b);
    const CVec pft = fft(g, s.p.v);
    CVec dh = CVec::Zero(N), qh = CVec::Zero(N);
    const double vol = g.cell_volume();
    for (std::size_t b : xi_bins(g)) {
        const auto m = static_cast<Eigen::Index>(b);
        const Point xi = wavevector(g, b);
        const XiFrame fr = frame_for(xi);
        const double x2 = dot(xi, xi);
        double ph = 0.0;
        for (int a = 0; a < 3; ++a) ph += xi[a] * 0.5 * (g.hi[a] - g.lo[a]);
        const cplx shift = std::exp(I1 * ph) * vol;
        const cplx p_hat = pft[m] * shift;

        const cplx m1 = t.m1(b, fr, 1, AmplitudeChoice::linear_plane_wave, AmplitudeChoice::one);
        const cplx bterm = tb.m1(b, fr, 1, AmplitudeChoice::linear_plane_wave, AmplitudeChoice::one);
        const cplx d_hat = -0.5 * (m1 - bterm - 2.0 * x2 * p_hat);
        dh[m] = d_hat;

        // tb.m0 = -xi . dB^ for the recovered dB
        const cplx xb = -tb.m0(b, fr);
        qh[m] = t.m0(b, fr) - x2 * d_hat + x2 * x2 * p_hat + xb;
    }
    s.d_sharp = {g, inverse_table(g, dh)};
    // dA = d_sharp I + Hess p
    s.dA = SymMatrixField::zeros(g);
    for (int j = 0; j < 3; ++j)
        for (int k = j; k < 3; ++k) {
            CVec hp = spectral_d1(g, spectral_d1(g, s.p.v, k), j);
            s.dA.at(j, k) = hp;
            if (j == k) s.dA.at(j, k) += s.d_sharp.v;
        }
    const double dn = l2_norm(s.d_sharp), pn = l2_norm(s.p);
    s.p_norm = dn > 0.0 ? pn / dn : pn;
    s.p_ok = s.p_norm <= o.consistency_tol;
    return {g, inverse_table(g, qh)};
}

double relative_l2(const CVec& got, const CVec& want) {
    const double w = want.norm();
    const double e = (got - want).norm();
    return w > 0.0 ? e / w : e;
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

CVec stack(const Grid& g, const VectorField& v) {
    const auto N = static_cast<Eigen::Index>(g.size());
    CVec out(N * g.dim);
    for (int j = 0; j < g.dim; ++j) out.segment(j * N, N) = v.c[j];
    return out;
}

template <class F>
auto run_stage(const char* stage, F&& f) {
    try {
        return f();
    } catch (const InconsistencyError& e) {
        throw InconsistencyError(std::string("stage ") + stage + ": " + e.what());
    } catch (const NumericalError& e) {
        throw NumericalError(std::string("stage ") + stage + ": " + e.what());
    }
}

}  // namespace

ReconstructionReport full_pipeline(const CoefficientDelta& truth, const ScalarField& d_sharp_truth,
                                   const ScalarField& p_truth, PipelineMode mode, const PipelineOptions& o) {
    const Grid& g = truth.grid();
    require_3d(g, "full_pipeline");
    require_same_grid(g, d_sharp_truth.grid, "full_pipeline");
    require_same_grid(g, p_truth.grid, "full_pipeline");
    ReconstructionReport rep;
    auto t0 = std::chrono::steady_clock::now();

    if (mode == PipelineMode::boundary) {
        rep.mode = "boundary";
        CoefficientSet L = CoefficientSet::zeros(g);
        L.A = truth.dA;
        L.B = truth.dB;
        L.q = truth.dq;
        const CoefficientSet R = CoefficientSet::zeros(g);
        CGOParams p;
        p.mu1 = {1, 0, 0};
        p.mu2 = {0, 1, 0};
        p.h = o.h;
        p.cut_inner = 0.6;
        p.cut_outer = 0.95;
        double worst = 0.0;
        for (int k = 0; k <= o.boundary_xi_max; ++k) {
            p.xi = {0, 0, 2.0 * std::numbers::pi * k / g.period(2)};
            BoundaryMoment bm = run_stage("boundary_moment", [&] {
                return moment_boundary(L, R, p, AmplitudeChoice::plane_wave, AmplitudeChoice::one);
            });
            const double scale = std::abs(bm.oracle) > 0.0 ? std::abs(bm.oracle) : 1.0;
            worst = std::max(worst, std::abs(bm.value - bm.oracle) / scale);
            rep.boundary.emplace_back(p.xi, bm);
        }
        rep.errors.push_back({"boundary_moment", worst, worst <= o.stage_tol});
        rep.timings["boundary"] = seconds_since(t0);
        return rep;
    }

    rep.mode = "oracle";
    MomentTable table(truth);
    rep.timings["moments"] = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    rep.second = run_stage("second_order", [&] { return recover_second_order(table, o.recovery); });
    rep.timings["second_order"] = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    rep.first = run_stage("first_order", [&] { return recover_first_order(table, rep.second, o.recovery); });
    rep.timings["first_order"] = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    rep.dq = run_stage("zeroth_order",
                       [&] { return recover_zeroth_order(table, rep.second, rep.first, o.recovery); });
    rep.timings["zeroth_order"] = seconds_since(t0);

    auto add = [&](const char* name, double e) { rep.errors.push_back({name, e, e <= o.stage_tol}); };
    add("d_sharp", relative_l2(rep.second.d_sharp.v, d_sharp_truth.v));
    add("p", relative_l2(rep.second.p.v, p_truth.v));
    add("dB", relative_l2(stack(g, rep.first.dB), stack(g, truth.dB)));
    add("dq", relative_l2(rep.dq.v, truth.dq.v));
    return rep;
}

}  // namespace bihar
