#pragma once

#include <complex>
#include <memory>
#include <vector>

namespace mkdv {

// Uniform periodic grid on [-L/2, L/2) with its wavenumber table.
struct PeriodicGrid {
    double length = 0.0;  // L
    int n = 0;            // number of points, even
    double dx = 0.0;      // L / n
    std::vector<double> x;

    // k_m = 2*pi*m/L for m in [-n/2, n/2).
    double wavenumber(int m) const;
};

using GridPtr = std::shared_ptr<const PeriodicGrid>;

// Rejects non-positive L, odd or too-small N.
GridPtr make_grid(double length, int n);

// Real-valued sampled function on a grid; the carrier for every field in the
// project (solutions, profiles, cutoffs, perturbations).
struct Field {
    GridPtr grid;
    std::vector<double> v;

    Field() = default;
    explicit Field(GridPtr g);

    int size() const { return static_cast<int>(v.size()); }
};

template <class Fn>
Field sample(const GridPtr& g, Fn f) {
    Field out(g);
    for (int i = 0; i < out.size(); ++i) out.v[i] = f(g->x[i]);
    return out;
}

// Half-spectrum (n/2+1 modes) of a real field, unnormalized DFT coefficients.
struct Spectrum {
    GridPtr grid;
    std::vector<std::complex<double>> c;
};

Spectrum to_spectrum(const Field& f);
Field to_field(const Spectrum& s);  // divides by n

// Fourier-multiplier derivative (ik)^order, Nyquist mode zeroed.
Field spectral_derivative(const Field& f, int order);

// dx * sum of values (the trapezoid rule on a periodic grid).
double integrate(const Field& f);

// Discrete H^s norm via the multiplier (1+k^2)^(s/2); s = 0 is the L2 norm.
double sobolev_norm(const Field& f, double s);

double max_abs(const Field& f);

// Pointwise arithmetic. Mixing grids is a programming error and throws.
Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);
Field operator*(const Field& a, const Field& b);
Field operator*(double s, const Field& a);
Field& operator+=(Field& a, const Field& b);
Field& operator-=(Field& a, const Field& b);

double inner_product(const Field& a, const Field& b);  // integrate(a*b)

void require_same_grid(const Field& a, const Field& b);
void require_finite(const Field& f, const char* what);

}  // namespace mkdv
