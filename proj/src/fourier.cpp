#include "bihar/fourier.hpp"

#include "bihar/errors.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

namespace bihar {
namespace {

// FFTW's planner is not thread safe; execution of a finished plan is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

CVec transform(const Grid& g, const CVec& in, int sign) {
    if (static_cast<std::size_t>(in.size()) != g.size())
        throw ShapeError("fft: field size does not match grid");
    CVec out(in.size());
    CVec work = in;
    int dims[3] = {g.n[0], g.n[1], g.n[2]};
    auto* src = reinterpret_cast<fftw_complex*>(work.data());
    auto* dst = reinterpret_cast<fftw_complex*>(out.data());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan = fftw_plan_dft(g.dim, dims, src, dst, sign, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    return out;
}

}  // namespace

std::vector<double> wavenumbers(const Grid& g, int axis) {
    const int n = g.n[axis];
    std::vector<double> k(n);
    const double base = 2.0 * std::numbers::pi / g.period(axis);
    for (int i = 0; i < n; ++i) k[i] = base * (i < (n + 1) / 2 ? i : i - n);
    return k;
}

Point wavevector(const Grid& g, std::size_t node) {
    auto i = g.unravel(node);
    Point xi{0, 0, 0};
    for (int a = 0; a < g.dim; ++a) {
        const int n = g.n[a];
        int k = i[a] < (n + 1) / 2 ? i[a] : i[a] - n;
        xi[a] = 2.0 * std::numbers::pi * k / g.period(a);
    }
    return xi;
}

CVec fft(const Grid& g, const CVec& f) { return transform(g, f, FFTW_FORWARD); }

CVec ifft(const Grid& g, const CVec& F) {
    CVec out = transform(g, F, FFTW_BACKWARD);
    out /= static_cast<double>(g.size());
    return out;
}

CVec fourier_multiplier(const Grid& g, const CVec& f, const Symbol& m, cplx m0) {
    if (!g.periodic) throw ValidationError("fourier_multiplier: grid is not flagged periodic");
    CVec F = fft(g, f);
    for (std::size_t p = 0; p < g.size(); ++p) {
        cplx val;
        if (p == 0) {
            val = m0;
        } else {
            val = m(wavevector(g, p));
            if (!std::isfinite(val.real()) || !std::isfinite(val.imag()))
                throw SingularSymbolError("fourier_multiplier: symbol is not finite at a nonzero frequency");
        }
        F[p] *= val;
    }
    return ifft(g, F);
}

ScalarField fourier_multiplier(const ScalarField& f, const Symbol& m, cplx m0) {
    return {f.grid, fourier_multiplier(f.grid, f.v, m, m0)};
}

double scl_norm(const ScalarField& f, double s, double h, const Point& shift) {
    if (!(h > 0)) throw ParameterError("scl_norm: h must be positive");
    const Grid& g = f.grid;
    CVec F = fft(g, f.v);
    double acc = 0.0;
    for (std::size_t p = 0; p < g.size(); ++p) {
        Point xi = wavevector(g, p);
        double k2 = 0.0;
        for (int a = 0; a < g.dim; ++a) k2 += (xi[a] + shift[a]) * (xi[a] + shift[a]);
        acc += std::pow(1.0 + h * h * k2, s) * std::norm(F[p]);
    }
    // Parseval: sum |f|^2 = sum |F|^2 / N
    return std::sqrt(acc / static_cast<double>(g.size()) * g.cell_volume());
}

CVec spectral_d1(const Grid& g, const CVec& f, int axis) {
    CVec F = fft(g, f);
    const int n = g.n[axis];
    for (std::size_t p = 0; p < g.size(); ++p) {
        int i = g.unravel(p)[axis];
        if (n % 2 == 0 && i == n / 2) {
            F[p] = 0.0;
            continue;
        }
        F[p] *= cplx(0.0, wavevector(g, p)[axis]);
    }
    return ifft(g, F);
}

}  // namespace bihar
