#include "mkdv/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "mkdv/fft.hpp"

namespace mkdv {

double PeriodicGrid::wavenumber(int m) const {
    return 2.0 * M_PI * m / length;
}

GridPtr make_grid(double length, int n) {
    if (!(length > 0.0)) throw std::invalid_argument("grid length must be positive");
    if (n < 8 || n % 2 != 0) throw std::invalid_argument("grid size must be even and >= 8");
    auto g = std::make_shared<PeriodicGrid>();
    g->length = length;
    g->n = n;
    g->dx = length / n;
    g->x.resize(n);
    for (int i = 0; i < n; ++i) g->x[i] = -0.5 * length + i * g->dx;
    return g;
}

Field::Field(GridPtr g) : grid(std::move(g)), v(grid->n, 0.0) {}

void require_same_grid(const Field& a, const Field& b) {
    if (!a.grid || !b.grid) throw std::invalid_argument("field without a grid");
    if (a.grid->n != b.grid->n || a.grid->length != b.grid->length)
        throw std::invalid_argument("fields live on different grids");
}

void require_finite(const Field& f, const char* what) {
    for (double x : f.v)
        if (!std::isfinite(x)) throw std::runtime_error(std::string("non-finite values in ") + what);
}

Spectrum to_spectrum(const Field& f) {
    Spectrum s;
    s.grid = f.grid;
    s.c.resize(f.grid->n / 2 + 1);
    fft::forward(f.grid->n, f.v.data(), s.c.data());
    return s;
}

Field to_field(const Spectrum& s) {
    Field f(s.grid);
    fft::inverse(s.grid->n, s.c.data(), f.v.data());
    const double scale = 1.0 / s.grid->n;
    for (double& x : f.v) x *= scale;
    return f;
}

Field spectral_derivative(const Field& f, int order) {
    if (order < 1 || order > 6) throw std::invalid_argument("derivative order must be in 1..6");
    require_finite(f, "spectral_derivative input");
    Spectrum s = to_spectrum(f);
    const int half = f.grid->n / 2;
    for (int m = 0; m < half; ++m) {
        std::complex<double> ik(0.0, f.grid->wavenumber(m));
        std::complex<double> mult = 1.0;
        for (int p = 0; p < order; ++p) mult *= ik;
        s.c[m] *= mult;
    }
    s.c[half] = 0.0;  // odd-order derivative of the Nyquist mode is ill-defined
    return to_field(s);
}

double integrate(const Field& f) {
    require_finite(f, "integrate input");
    double acc = 0.0;
    for (double x : f.v) acc += x;
    return acc * f.grid->dx;
}

double sobolev_norm(const Field& f, double s) {
    if (s < 0.0) throw std::invalid_argument("sobolev_norm order must be >= 0");
    require_finite(f, "sobolev_norm input");
    Spectrum sp = to_spectrum(f);
    const int n = f.grid->n;
    const int half = n / 2;
    double acc = 0.0;
    for (int m = 0; m <= half; ++m) {
        const double k = f.grid->wavenumber(m);
        const double w = (m == 0 || m == half) ? 1.0 : 2.0;
        acc += w * std::pow(1.0 + k * k, s) * std::norm(sp.c[m]);
    }
    return std::sqrt(acc * f.grid->dx / n);
}

double max_abs(const Field& f) {
    double m = 0.0;
    for (double x : f.v) m = std::max(m, std::fabs(x));
    return m;
}

Field operator+(const Field& a, const Field& b) {
    require_same_grid(a, b);
    Field out = a;
    for (int i = 0; i < out.size(); ++i) out.v[i] += b.v[i];
    return out;
}

Field operator-(const Field& a, const Field& b) {
    require_same_grid(a, b);
    Field out = a;
    for (int i = 0; i < out.size(); ++i) out.v[i] -= b.v[i];
    return out;
}

Field operator*(const Field& a, const Field& b) {
    require_same_grid(a, b);
    Field out = a;
    for (int i = 0; i < out.size(); ++i) out.v[i] *= b.v[i];
    return out;
}

Field operator*(double s, const Field& a) {
    Field out = a;
    for (double& x : out.v) x *= s;
    return out;
}

Field& operator+=(Field& a, const Field& b) {
    require_same_grid(a, b);
    for (int i = 0; i < a.size(); ++i) a.v[i] += b.v[i];
    return a;
}

Field& operator-=(Field& a, const Field& b) {
    require_same_grid(a, b);
    for (int i = 0; i < a.size(); ++i) a.v[i] -= b.v[i];
    return a;
}

double inner_product(const Field& a, const Field& b) {
    require_same_grid(a, b);
    double acc = 0.0;
    for (int i = 0; i < a.size(); ++i) acc += a.v[i] * b.v[i];
    return acc * a.grid->dx;
}

}  // namespace mkdv
