#include "mkdv/solver.hpp"

#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>

#include "mkdv/fft.hpp"

namespace mkdv {

namespace {

using cx = std::complex<double>;

double max_wavenumber(const PeriodicGrid& grid) {
    return grid.wavenumber(grid.n / 2);
}

std::vector<cx> forward_spectrum(const Field& u) {
    std::vector<cx> s(u.grid->n / 2 + 1);
    fft::forward(u.grid->n, u.v.data(), s.data());
    s[u.grid->n / 2] = 0.0;
    return s;
}

Field inverse_spectrum(const GridPtr& grid, const std::vector<cx>& s) {
    Field u(grid);
    fft::inverse(grid->n, s.data(), u.v.data());
    const double scale = 1.0 / grid->n;
    for (double& x : u.v) x *= scale;
    return u;
}

// Spectrum of the dealiased cube, same (unnormalized) scaling as the input
// spectrum. Aliases of the triple product fall outside the retained band on
// the doubled grid, so truncation plus Nyquist zeroing removes them all.
std::vector<cx> cube_spectrum(const GridPtr& grid, const std::vector<cx>& s, bool dealias) {
    const int n = grid->n;
    if (!dealias) {
        Field u = inverse_spectrum(grid, s);
        for (double& x : u.v) x = x * x * x;
        return forward_spectrum(u);
    }
    const int n2 = 2 * n;
    std::vector<cx> padded(n2 / 2 + 1, 0.0);
    for (int m = 0; m < n / 2; ++m) padded[m] = s[m];
    std::vector<double> fine(n2);
    fft::inverse(n2, padded.data(), fine.data());
    const double scale = 1.0 / n;  // interpolation keeps the coarse-grid normalization
    for (double& x : fine) {
        x *= scale;
        x = x * x * x;
    }
    std::vector<cx> fine_hat(n2 / 2 + 1);
    fft::forward(n2, fine.data(), fine_hat.data());
    std::vector<cx> out(n / 2 + 1, 0.0);
    for (int m = 0; m < n / 2; ++m) out[m] = 0.5 * fine_hat[m];
    return out;
}

// ik * (u^3)-hat with the overall minus sign of the flux: N(u) = -(u^3)_x.
std::vector<cx> nonlinear(const GridPtr& grid, const std::vector<cx>& s, bool dealias) {
    std::vector<cx> cube = cube_spectrum(grid, s, dealias);
    for (int m = 0; m < grid->n / 2; ++m) cube[m] *= cx(0.0, -grid->wavenumber(m));
    cube[grid->n / 2] = 0.0;
    return cube;
}

struct EtdCoefficients {
    std::vector<cx> e_full, e_half, q, f1, f2, f3;
};

// phi-functions by contour averaging over the unit circle around each h*L_m
// (exact by the mean value property, trapezoid rule converges beyond double
// precision at 32 points).
EtdCoefficients etd_coefficients(const PeriodicGrid& grid, double h) {
    const int half = grid.n / 2;
    const int points = 32;
    EtdCoefficients c;
    c.e_full.resize(half + 1);
    c.e_half.resize(half + 1);
    c.q.assign(half + 1, 0.0);
    c.f1.assign(half + 1, 0.0);
    c.f2.assign(half + 1, 0.0);
    c.f3.assign(half + 1, 0.0);
    for (int m = 0; m <= half; ++m) {
        const double k = grid.wavenumber(m);
        const cx hl = h * cx(0.0, k * k * k);  // dispersion relation of -u_xxx
        c.e_full[m] = std::exp(hl);
        c.e_half[m] = std::exp(0.5 * hl);
        cx q = 0.0, f1 = 0.0, f2 = 0.0, f3 = 0.0;
        for (int p = 0; p < points; ++p) {
            // full unit circle: the multipliers are complex for imaginary L
            const cx z = hl + std::exp(cx(0.0, 2.0 * M_PI * (p + 0.5) / points));
            const cx ez = std::exp(z);
            const cx z3 = z * z * z;
            q += (std::exp(0.5 * z) - 1.0) / z;
            f1 += (-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z3;
            f2 += (2.0 + z + ez * (-2.0 + z)) / z3;
            f3 += (-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z3;
        }
        const double invp = 1.0 / points;
        c.q[m] = h * q * invp;
        c.f1[m] = h * f1 * invp;
        c.f2[m] = h * f2 * invp;
        c.f3[m] = h * f3 * invp;
    }
    return c;
}

std::vector<cx> etdrk4_step(const GridPtr& grid, const std::vector<cx>& u,
                            const EtdCoefficients& c, bool dealias) {
    const int sz = static_cast<int>(u.size());
    const std::vector<cx> nu = nonlinear(grid, u, dealias);
    std::vector<cx> a(sz), b(sz), cc(sz), out(sz);
    for (int m = 0; m < sz; ++m) a[m] = c.e_half[m] * u[m] + c.q[m] * nu[m];
    const std::vector<cx> na = nonlinear(grid, a, dealias);
    for (int m = 0; m < sz; ++m) b[m] = c.e_half[m] * u[m] + c.q[m] * na[m];
    const std::vector<cx> nb = nonlinear(grid, b, dealias);
    for (int m = 0; m < sz; ++m) cc[m] = c.e_half[m] * a[m] + c.q[m] * (2.0 * nb[m] - nu[m]);
    const std::vector<cx> nc = nonlinear(grid, cc, dealias);
    for (int m = 0; m < sz; ++m)
        out[m] = c.e_full[m] * u[m] + c.f1[m] * nu[m] + 2.0 * c.f2[m] * (na[m] + nb[m]) +
                 c.f3[m] * nc[m];
    return out;
}

std::vector<cx> ifrk4_step(const GridPtr& grid, const std::vector<cx>& u, double h,
                           const EtdCoefficients& c, bool dealias) {
    const int sz = static_cast<int>(u.size());
    std::vector<cx> a(sz), b(sz), cc(sz), d(sz), tmp(sz), out(sz);
    const std::vector<cx> nu = nonlinear(grid, u, dealias);
    for (int m = 0; m < sz; ++m) a[m] = h * nu[m];
    for (int m = 0; m < sz; ++m) tmp[m] = c.e_half[m] * (u[m] + 0.5 * a[m]);
    const std::vector<cx> n1 = nonlinear(grid, tmp, dealias);
    for (int m = 0; m < sz; ++m) b[m] = h * n1[m];
    for (int m = 0; m < sz; ++m) tmp[m] = c.e_half[m] * u[m] + 0.5 * b[m];
    const std::vector<cx> n2 = nonlinear(grid, tmp, dealias);
    for (int m = 0; m < sz; ++m) cc[m] = h * n2[m];
    for (int m = 0; m < sz; ++m) tmp[m] = c.e_full[m] * u[m] + c.e_half[m] * cc[m];
    const std::vector<cx> n3 = nonlinear(grid, tmp, dealias);
    for (int m = 0; m < sz; ++m) d[m] = h * n3[m];
    for (int m = 0; m < sz; ++m)
        out[m] = c.e_full[m] * u[m] +
                 (c.e_full[m] * a[m] + 2.0 * c.e_half[m] * (b[m] + cc[m]) + d[m]) / 6.0;
    return out;
}

double signed_step(const SolverConfig& cfg) {
    return cfg.direction == Direction::forward ? cfg.dt : -cfg.dt;
}

}  // namespace

void validate_solver_config(const SolverConfig& cfg, const PeriodicGrid& grid) {
    if (!(cfg.dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (cfg.sample_stride < 1) throw std::invalid_argument("sample_stride must be >= 1");
    const double kmax = max_wavenumber(grid);
    // The dispersion is integrated exactly; the budget guards the nonlinear
    // substeps, which see rotation angles of order dt*k^3.
    if (cfg.dt * kmax * kmax * kmax > 4000.0)
        throw std::invalid_argument("dt too large for this grid (dt * kmax^3 > 4000)");
}

Field step(const Field& u, const SolverConfig& cfg) {
    validate_solver_config(cfg, *u.grid);
    const double h = signed_step(cfg);
    const EtdCoefficients c = etd_coefficients(*u.grid, h);
    std::vector<cx> s = forward_spectrum(u);
    s = cfg.scheme == Scheme::ETDRK4 ? etdrk4_step(u.grid, s, c, cfg.dealias)
                                     : ifrk4_step(u.grid, s, h, c, cfg.dealias);
    Field out = inverse_spectrum(u.grid, s);
    require_finite(out, "solver step output");
    return out;
}

Trajectory integrate_flow(const Field& u0, double t0, double t1, const SolverConfig& cfg,
                          const std::vector<Observer>& observers) {
    validate_solver_config(cfg, *u0.grid);
    const double span = t1 - t0;
    if (cfg.direction == Direction::forward ? span < 0.0 : span > 0.0)
        throw std::invalid_argument("integration span inconsistent with direction");

    Trajectory traj;
    auto record = [&](double t, const Field& u) {
        traj.times.push_back(t);
        traj.samples.push_back(u);
        traj.conserved_series.push_back(conserved(u));
        for (const Observer& obs : observers) obs(t, u);
    };

    Field u = u0;
    record(t0, u);
    if (span == 0.0) return traj;

    const double h = signed_step(cfg);
    const double h2_initial = sobolev_norm(u, 2.0);
    const EtdCoefficients coeff = etd_coefficients(*u0.grid, h);
    std::vector<cx> s = forward_spectrum(u);

    const long total_steps = static_cast<long>(std::ceil(std::fabs(span) / cfg.dt - 1e-12));
    double t = t0;
    for (long n = 0; n < total_steps; ++n) {
        const double remaining = t1 - t;
        const bool partial = std::fabs(remaining) < cfg.dt * (1.0 + 1e-12);
        if (partial && std::fabs(remaining) < 1e-15) break;
        if (partial) {
            const EtdCoefficients last = etd_coefficients(*u0.grid, remaining);
            s = cfg.scheme == Scheme::ETDRK4 ? etdrk4_step(u0.grid, s, last, cfg.dealias)
                                             : ifrk4_step(u0.grid, s, remaining, last, cfg.dealias);
            t = t1;
        } else {
            s = cfg.scheme == Scheme::ETDRK4 ? etdrk4_step(u0.grid, s, coeff, cfg.dealias)
                                             : ifrk4_step(u0.grid, s, h, coeff, cfg.dealias);
            t += h;
        }

        const bool sample_now = partial || ((n + 1) % cfg.sample_stride == 0) || n + 1 == total_steps;
        if (sample_now) {
            u = inverse_spectrum(u0.grid, s);
            for (double x : u.v)
                if (!std::isfinite(x)) {
                    std::ostringstream msg;
                    msg << "solver produced NaN/Inf at step " << n + 1 << " (t = " << t << ")";
                    throw std::runtime_error(msg.str());
                }
            const double h2 = sobolev_norm(u, 2.0);
            if (h2 > 1e3 * std::max(h2_initial, 1e-300)) {
                std::ostringstream msg;
                msg << "H2 blow-up at step " << n + 1 << " (t = " << t << "): " << h2;
                throw std::runtime_error(msg.str());
            }
            record(t, u);
        }
        if (partial) break;
    }
    return traj;
}

double pde_residual(const ProfileObject& obj, double t, const GridPtr& grid) {
    const Field u = eval_profile(obj, t, grid, 0);
    const Field ut = eval_profile_time_derivative(obj, t, grid);
    Field flux = spectral_derivative(u, 2);
    for (int i = 0; i < flux.size(); ++i) flux.v[i] += u.v[i] * u.v[i] * u.v[i];
    const Field flux_x = spectral_derivative(flux, 1);
    double worst = 0.0;
    for (int i = 0; i < u.size(); ++i)
        worst = std::max(worst, std::fabs(ut.v[i] + flux_x.v[i]));
    return worst;
}

Field dealiased_cube(const Field& u) {
    const std::vector<cx> s = forward_spectrum(u);
    return inverse_spectrum(u.grid, cube_spectrum(u.grid, s, true));
}

}  // namespace mkdv
