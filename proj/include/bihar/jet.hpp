#pragma once

#include <array>
#include <complex>

namespace bihar {

// Truncated Taylor series c[0] + c[1] s + ... + c[N] s^N in one variable.
// Used for exact normal derivatives of closed-form fields at boundary points.
template <int N>
struct Jet {
    std::array<std::complex<double>, N + 1> c{};

    static Jet constant(std::complex<double> v) {
        Jet j;
        j.c[0] = v;
        return j;
    }
    static Jet variable(std::complex<double> x0, std::complex<double> slope) {
        Jet j;
        j.c[0] = x0;
        if constexpr (N >= 1) j.c[1] = slope;
        return j;
    }

    // m-th derivative at s = 0
    std::complex<double> derivative(int m) const {
        double f = 1.0;
        for (int i = 2; i <= m; ++i) f *= i;
        return c[m] * f;
    }

    friend Jet operator+(Jet a, const Jet& b) {
        for (int i = 0; i <= N; ++i) a.c[i] += b.c[i];
        return a;
    }
    friend Jet operator-(Jet a, const Jet& b) {
        for (int i = 0; i <= N; ++i) a.c[i] -= b.c[i];
        return a;
    }
    friend Jet operator*(const Jet& a, const Jet& b) {
        Jet r;
        for (int i = 0; i <= N; ++i)
            for (int j = 0; i + j <= N; ++j) r.c[i + j] += a.c[i] * b.c[j];
        return r;
    }
    friend Jet operator*(std::complex<double> s, Jet a) {
        for (auto& v : a.c) v *= s;
        return a;
    }
};

template <int N>
Jet<N> exp(const Jet<N>& f) {
    // y' = f' y, coefficient recurrence
    Jet<N> y;
    y.c[0] = std::exp(f.c[0]);
    for (int k = 1; k <= N; ++k) {
        std::complex<double> acc = 0.0;
        for (int j = 1; j <= k; ++j) acc += double(j) * f.c[j] * y.c[k - j];
        y.c[k] = acc / double(k);
    }
    return y;
}

}  // namespace bihar
