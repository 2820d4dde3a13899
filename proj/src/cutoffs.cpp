#include "mkdv/cutoffs.hpp"

#include <cmath>
#include <stdexcept>

namespace mkdv {

double psi_eval(double x, int order) {
    if (order < 0 || order > 3) throw std::invalid_argument("psi order must be in 0..3");
    if (x <= -1.0) return order == 0 ? 0.0 : 0.0;
    if (x >= 1.0) return order == 0 ? 1.0 : 0.0;
    const double x2 = x * x;
    const double d = x2 * x2 + 6.0 * x2 + 1.0;  // ((1+x)^4 + (1-x)^4)/2
    const double up = 1.0 + x, um = 1.0 - x;
    switch (order) {
        case 0: {
            const double u4 = up * up * up * up;
            return u4 / (2.0 * d);
        }
        case 1:
            return 2.0 * up * up * up * um * um * um / (d * d);
        case 2:
            return 4.0 * x * up * up * um * um * (x2 * x2 - 10.0 * x2 - 15.0) / (d * d * d);
        case 3: {
            const double x4 = x2 * x2;
            const double poly = x4 * x4 * x2 - 25.0 * x4 * x4 + 10.0 * x4 * x2 +
                                110.0 * x4 + 165.0 * x2 - 5.0;
            return 12.0 * up * um * poly / (d * d * d * d);
        }
    }
    return 0.0;
}

double default_delta(const ProfileSet& ps) {
    return std::min(1.0, ps.tau / 4.0) / 2.0;
}

PhiWeights phi_weights(const ProfileSet& ps, double t, const GridPtr& grid, double delta,
                       const std::optional<std::vector<double>>& shifts) {
    const int count = ps.size();
    if (count == 0) throw std::invalid_argument("empty profile set");
    if (!(t > 0.0)) throw std::invalid_argument("phi weights require t > 0");
    if (!(delta > 0.0) || !(delta < std::min(1.0, ps.tau / 4.0)))
        throw std::invalid_argument("delta must lie in (0, min(1, tau/4))");
    if (shifts && static_cast<int>(shifts->size()) != count - 1)
        throw std::invalid_argument("one shift per transition expected");

    PhiWeights w;
    w.t = t;
    w.delta = delta;
    w.phi.assign(count, Field(grid));
    w.phi1.assign(count, Field(grid));
    w.phi2.assign(count, Field(grid));

    if (count == 1) {
        for (double& v : w.phi[0].v) v = 1.0;
        return w;
    }

    // steps[j] = psi-family at the transition between objects j and j+1.
    std::vector<Field> step(count - 1, Field(grid)), step1(count - 1, Field(grid)),
        step2(count - 1, Field(grid));
    for (int j = 0; j + 1 < count; ++j) {
        const double sig = 0.5 * (ps.velocities[j] + ps.velocities[j + 1]);
        const double shift = shifts ? (*shifts)[j] : 0.0;
        for (int i = 0; i < grid->n; ++i) {
            const double arg = (grid->x[i] - sig * t - shift) / (delta * t);
            step[j].v[i] = psi_eval(arg, 0);
            step1[j].v[i] = psi_eval(arg, 1);
            step2[j].v[i] = psi_eval(arg, 2);
        }
    }
    for (int i = 0; i < grid->n; ++i) {
        w.phi[0].v[i] = 1.0 - step[0].v[i];
        w.phi1[0].v[i] = -step1[0].v[i];
        w.phi2[0].v[i] = -step2[0].v[i];
        w.phi[count - 1].v[i] = step[count - 2].v[i];
        w.phi1[count - 1].v[i] = step1[count - 2].v[i];
        w.phi2[count - 1].v[i] = step2[count - 2].v[i];
        for (int j = 1; j + 1 < count; ++j) {
            w.phi[j].v[i] = step[j - 1].v[i] - step[j].v[i];
            w.phi1[j].v[i] = step1[j - 1].v[i] - step1[j].v[i];
            w.phi2[j].v[i] = step2[j - 1].v[i] - step2[j].v[i];
        }
    }
    return w;
}

double arctan_step(double x, double sigma, int order) {
    if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
    if (order < 0 || order > 3) throw std::invalid_argument("step order must be in 0..3");
    const double rs = std::sqrt(sigma);
    const double a = 0.5 * rs * x;
    switch (order) {
        case 0: return (2.0 / M_PI) * std::atan(std::exp(-a));
        case 1: return -rs / (2.0 * M_PI * std::cosh(a));
        case 2: return sigma / (4.0 * M_PI) * std::tanh(a) / std::cosh(a);
        case 3: {
            const double sech = 1.0 / std::cosh(a), th = std::tanh(a);
            return sigma * rs / (8.0 * M_PI) * sech * (sech * sech - th * th);
        }
    }
    return 0.0;
}

double default_sigma(const ProfileSet& ps) {
    const double b2 = ps.beta_min * ps.beta_min;
    if (ps.size() < 2) return b2 / 4.0;
    const double m2 = 0.5 * (ps.velocities[0] + ps.velocities[1]);
    return std::min(m2, b2) / 4.0;
}

double min_velocity_midpoint_gap(const ProfileSet& ps) {
    if (ps.size() < 2) return 0.0;
    double tau0 = std::numeric_limits<double>::infinity();
    for (int j = 0; j + 1 < ps.size(); ++j) {
        const double m = 0.5 * (ps.velocities[j] + ps.velocities[j + 1]);
        for (double v : ps.velocities) tau0 = std::min(tau0, std::fabs(v - m));
    }
    return tau0;
}

PhiSteps step_weights(const ProfileSet& ps, double t, const GridPtr& grid, double sigma) {
    const int count = ps.size();
    if (count == 0) throw std::invalid_argument("empty profile set");

    PhiSteps steps;
    steps.t = t;
    steps.sigma = sigma;
    steps.Phi.assign(count + 1, Field(grid));
    for (int j = 1; j < count; ++j) {
        const double m = 0.5 * (ps.velocities[j - 1] + ps.velocities[j]);
        steps.midpoints.push_back(m);
        for (int i = 0; i < grid->n; ++i)
            steps.Phi[j].v[i] = arctan_step(grid->x[i] - m * t, sigma, 0);
    }
    for (double& v : steps.Phi[count].v) v = 1.0;

    steps.chi.assign(count, Field(grid));
    for (int j = 0; j < count; ++j) steps.chi[j] = steps.Phi[j + 1] - steps.Phi[j];
    return steps;
}

}  // namespace mkdv
