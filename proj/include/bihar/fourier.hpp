#pragma once

#include "bihar/grid.hpp"

#include <functional>
#include <vector>

namespace bihar {

// Angular wavenumbers 2*pi*k/(n*dx) in FFT order (k = 0..n/2-1, -n/2..-1).
std::vector<double> wavenumbers(const Grid& g, int axis);
// Wavenumber vector of the DFT bin stored at `node` (same layout as fields).
Point wavevector(const Grid& g, std::size_t node);

// Unnormalised forward DFT and its normalised inverse over the used axes.
CVec fft(const Grid& g, const CVec& f);
CVec ifft(const Grid& g, const CVec& F);

using Symbol = std::function<cplx(const Point& xi)>;

// ifft(m(xi) * fft(f)).  The symbol is never evaluated at xi = 0; `m0` is used
// there instead.  A non-finite value anywhere else raises SingularSymbolError.
// Throws ValidationError if the grid is not flagged periodic.
CVec fourier_multiplier(const Grid& g, const CVec& f, const Symbol& m, cplx m0);
ScalarField fourier_multiplier(const ScalarField& f, const Symbol& m, cplx m0);

// Semiclassical norm || <hD>^s f ||_{L^2} with <hxi> = sqrt(1 + h^2|xi|^2),
// evaluated through Parseval.  `shift` offsets every wavevector (used for
// Bloch-periodic fields f = e^{i shift.x} * periodic).
double scl_norm(const ScalarField& f, double s, double h, const Point& shift = {0, 0, 0});

// Spectral partial derivative (symbol i*xi_a, Nyquist bin set to 0); used as a
// test oracle and by the Fourier-side tensor algebra.
CVec spectral_d1(const Grid& g, const CVec& f, int axis);

}  // namespace bihar
