#include "mkdv/experiments.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <random>
#include <stdexcept>
#include <thread>

#include "mkdv/cutoffs.hpp"
#include "mkdv/functionals.hpp"
#include "mkdv/modulation.hpp"
#include "mkdv/quadforms.hpp"

namespace mkdv {

namespace {

using nlohmann::ordered_json;

class Stopwatch {
  public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

  private:
    std::chrono::steady_clock::time_point start_;
};

// Runs fn(0..count-1) on up to `threads` workers; results keep index order.
template <typename R>
std::vector<R> parallel_map(int threads, int count, const std::function<R(int)>& fn) {
    std::vector<R> results(count);
    if (count == 0) return results;
    threads = std::max(1, std::min(threads, count));
    if (threads == 1) {
        for (int i = 0; i < count; ++i) results[i] = fn(i);
        return results;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= count) return;
            try {
                results[i] = fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
    if (error) std::rethrow_exception(error);
    return results;
}

double get_or(const ordered_json& j, const char* key, double fallback) {
    return j.contains(key) && !j[key].is_null() ? j[key].get<double>() : fallback;
}

}  // namespace

RunConfig parse_run_config(const ordered_json& j) {
    RunConfig cfg;
    cfg.raw = j;
    if (!j.contains("schema") || j["schema"].get<int>() != 1)
        throw std::invalid_argument("config schema must be 1");
    cfg.experiment = j.value("experiment", std::string());

    if (j.contains("grid")) {
        cfg.grid_length = get_or(j["grid"], "length", cfg.grid_length);
        cfg.grid_n = static_cast<int>(get_or(j["grid"], "n", cfg.grid_n));
    }
    if (j.contains("profiles")) {
        for (const auto& p : j["profiles"]) {
            const std::string type = p.at("type").get<std::string>();
            if (type == "soliton") {
                SolitonParams s;
                s.c = get_or(p, "c", 1.0);
                s.kappa = static_cast<int>(get_or(p, "kappa", 1.0));
                s.x0 = get_or(p, "x0", 0.0);
                cfg.profiles.emplace_back(s);
            } else if (type == "breather") {
                BreatherParams b;
                b.alpha = get_or(p, "alpha", 1.0);
                b.beta = get_or(p, "beta", 1.0);
                b.x1 = get_or(p, "x1", 0.0);
                b.x2 = get_or(p, "x2", 0.0);
                cfg.profiles.emplace_back(b);
            } else {
                throw std::invalid_argument("unknown profile type: " + type);
            }
        }
    }
    if (j.contains("solver")) {
        const auto& s = j["solver"];
        cfg.solver.dt = get_or(s, "dt", cfg.solver.dt);
        cfg.solver.sample_stride =
            static_cast<int>(get_or(s, "sample_stride", cfg.solver.sample_stride));
        cfg.solver.dealias = s.value("dealias", true);
        const std::string scheme = s.value("scheme", std::string("ETDRK4"));
        if (scheme == "ETDRK4")
            cfg.solver.scheme = Scheme::ETDRK4;
        else if (scheme == "IFRK4")
            cfg.solver.scheme = Scheme::IFRK4;
        else
            throw std::invalid_argument("unknown scheme: " + scheme);
    }
    cfg.t0 = get_or(j, "t0", cfg.t0);
    if (j.contains("horizons")) cfg.horizons = j["horizons"].get<std::vector<double>>();
    if (j.contains("delta") && !j["delta"].is_null()) cfg.delta = j["delta"].get<double>();
    if (j.contains("sigma") && !j["sigma"].is_null()) cfg.sigma = j["sigma"].get<double>();
    cfg.tail_radius = get_or(j, "tail_radius", cfg.tail_radius);
    cfg.noise_amplitude = get_or(j, "noise_amplitude", cfg.noise_amplitude);
    cfg.omega2 = get_or(j, "omega2", cfg.omega2);
    cfg.omega6 = get_or(j, "omega6", cfg.omega6);
    cfg.t_end = get_or(j, "t_end", cfg.t_end);
    cfg.seed = static_cast<std::uint64_t>(get_or(j, "seed", 0.0));
    cfg.threads = static_cast<int>(get_or(j, "threads", 1.0));
    cfg.box_check_override = j.value("box_check_override", false);
    cfg.corrupt_soliton_scale = j.value("corrupt_soliton_scale", false);
    cfg.snapshot_path = j.value("snapshot", std::string());
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    ordered_json j;
    in >> j;
    return parse_run_config(j);
}

ProfileSet profile_set_from(const RunConfig& cfg) {
    return make_profile_set(cfg.profiles);
}

void check_box_size(const RunConfig& cfg, const ProfileSet& ps, double horizon) {
    if (cfg.box_check_override) return;
    double vmax = 0.0;
    for (double v : ps.velocities) vmax = std::max(vmax, std::fabs(v));
    const double need = vmax * horizon + 40.0 / ps.beta_min;
    if (cfg.grid_length / 2.0 + 1e-9 < need)
        throw std::invalid_argument("box too small: need half-length >= " + std::to_string(need));
}

ExpFit fit_exponential_rate(const std::vector<double>& times, const std::vector<double>& norms) {
    if (times.size() != norms.size()) throw std::invalid_argument("mismatched fit inputs");
    if (times.size() < 4) throw std::invalid_argument("need at least 4 samples to fit");
    const int n = static_cast<int>(times.size());
    double st = 0.0, sy = 0.0;
    for (int i = 0; i < n; ++i) {
        if (!(norms[i] > 0.0)) throw std::invalid_argument("norms must be positive for rate fit");
        st += times[i];
        sy += std::log(norms[i]);
    }
    const double mt = st / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (int i = 0; i < n; ++i) {
        const double dt = times[i] - mt, dy = std::log(norms[i]) - my;
        sxx += dt * dt;
        sxy += dt * dy;
        syy += dy * dy;
    }
    ExpFit fit;
    const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
    fit.rate = -slope;
    fit.amplitude = std::exp(my - slope * mt);
    fit.r2 = (sxx > 0.0 && syy > 0.0) ? (sxy * sxy) / (sxx * syy) : 1.0;
    return fit;
}

Field random_smooth_field(const GridPtr& grid, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Spectrum s;
    s.grid = grid;
    s.c.assign(grid->n / 2 + 1, 0.0);
    for (int m = 1; m < grid->n / 2; ++m) {
        const double k = grid->wavenumber(m);
        s.c[m] = std::complex<double>(gauss(rng), gauss(rng)) / (1.0 + k * k * k * k);
    }
    Field f = to_field(s);
    const double nrm = sobolev_norm(f, 2.0);
    if (nrm > 0.0)
        for (double& x : f.v) x /= nrm;
    return f;
}

// ---------------------------------------------------------------------------
// verify-identities

RunReport verify_identities(const RunConfig& cfg) {
    Stopwatch clock;
    RunReport rep;
    rep.experiment = "verify-identities";
    rep.config_echo = cfg.raw;
    const GridPtr grid = make_grid(cfg.grid_length, cfg.grid_n);

    // Ground state and Taylor combinations.
    const TaylorIdentityReport taylor = soliton_taylor_identities(grid);
    rep.add_abs_item("ground_state_mass", taylor.ground_state.mass - kGroundStateMass, 1e-9);
    rep.add_abs_item("ground_state_energy", taylor.ground_state.energy - kGroundStateEnergy, 1e-9);
    rep.add_abs_item("ground_state_second_energy",
                     taylor.ground_state.second_energy - kGroundStateSecondEnergy, 1e-9);
    rep.add_abs_item("taylor_combination_a", taylor.combo_first, 1e-9);
    rep.add_abs_item("taylor_combination_b", taylor.combo_second, 1e-9);
    for (size_t i = 0; i < taylor.scales.size(); ++i) {
        const double rel = (taylor.r_measured[i] - taylor.r_expected[i]) / taylor.r_expected[i];
        rep.add_abs_item("scale_invariant_c" + std::to_string(taylor.scales[i]), rel, 1e-8);
    }

    // Elliptic and flow residuals for the exact solutions.
    for (double c : {1.0, 2.0}) {
        rep.add_abs_item("soliton_elliptic_residual_c" + std::to_string(c),
                         soliton_elliptic_residual(c, grid), 1e-8);
        rep.add_abs_item("soliton_flow_residual_c" + std::to_string(c),
                         pde_residual(SolitonParams{c, 1, 0.0}, 0.7, grid), 1e-8);
        rep.add_abs_item("wronskian_c" + std::to_string(c), wronskian_deviation(c, grid), 1e-8);
    }
    if (cfg.corrupt_soliton_scale) {
        // Negative control: the ground state tested against the wrong scale.
        const Field q = eval_soliton({1.0, 1, 0.0}, 0.0, grid);
        rep.add_abs_item("soliton_elliptic_residual_corrupted",
                         max_abs(elliptic_residual_field(q, {0.0, std::sqrt(1.2)})), 1e-8);
    }
    // Breathers carry slowly decaying harmonics and wide tails: a larger box
    // with the doubled mode count keeps 4th derivatives clean.
    const GridPtr wide = make_grid(192.0, 4096);
    const std::vector<BreatherParams> breathers = {{1.0, 1.0, 0.0, 0.0}, {2.0, 0.7, 0.0, 0.0}};
    for (const BreatherParams& b : breathers) {
        double worst_ell = 0.0, worst_flow = 0.0;
        for (double t : {0.0, 0.3, 0.7}) {
            worst_ell = std::max(worst_ell, breather_elliptic_residual(b, t, wide));
            worst_flow = std::max(worst_flow, pde_residual(b, t, wide));
        }
        const std::string tag = std::to_string(b.alpha) + "_" + std::to_string(b.beta);
        rep.add_abs_item("breather_elliptic_residual_" + tag, worst_ell, 1e-6);
        rep.add_abs_item("breather_flow_residual_" + tag, worst_flow, 1e-6);
    }

    // Breather translation-derivative orthogonality.
    {
        const BreatherParams b{1.0, 1.0, 0.0, 0.0};
        const Field bv = eval_breather(b, 0.4, grid);
        const Field b1 = eval_breather(b, 0.4, grid, 0, 0, BreatherPart::d_x1);
        const Field b2 = eval_breather(b, 0.4, grid, 0, 0, BreatherPart::d_x2);
        const double l2sq = inner_product(bv, bv);
        const double worst =
            std::max(std::fabs(inner_product(bv, b1)), std::fabs(inner_product(bv, b2)));
        rep.add_abs_item("breather_orthogonality", worst / l2sq, 1e-9);
    }

    // First-order soliton identity 1/2 d/dx (Q_x^2 - c Q^2 + Q^4/2) == 0.
    {
        const Field q = eval_soliton({1.0, 1, 0.0}, 0.0, grid);
        const Field qx = spectral_derivative(q, 1);
        Field expr(grid);
        for (int i = 0; i < q.size(); ++i)
            expr.v[i] = qx.v[i] * qx.v[i] - q.v[i] * q.v[i] + 0.5 * std::pow(q.v[i], 4);
        rep.add_abs_item("soliton_first_order_identity",
                         0.5 * max_abs(spectral_derivative(expr, 1)), 1e-9);
    }

    // Transition cutoff scans.
    {
        const int scan = 100000;
        double c_lower = 0.0, c_upper = 0.0, c_second = 0.0, min_d1 = 0.0;
        for (int i = 1; i < scan; ++i) {
            const double x = -1.0 + 2.0 * i / scan;
            const double p = psi_eval(x, 0), d1 = psi_eval(x, 1), d2 = psi_eval(x, 2);
            min_d1 = std::min(min_d1, d1);
            if (p > 0.0) c_lower = std::max(c_lower, std::pow(d1, 4.0 / 3.0) / p);
            if (p < 1.0) c_upper = std::max(c_upper, std::pow(d1, 4.0 / 3.0) / (1.0 - p));
            if (d1 > 1e-300) c_second = std::max(c_second, std::pow(std::fabs(d2), 1.5) / d1);
        }
        const double c_all = std::max({c_lower, c_upper, c_second});
        rep.add_item("transition_cutoff_constant", c_all, 100.0, std::isfinite(c_all) && c_all < 100.0);
        rep.add_item("transition_cutoff_monotone", min_d1, 0.0, min_d1 >= 0.0);
        const double ends = std::fabs(psi_eval(-1.0, 0)) + std::fabs(psi_eval(1.0, 0) - 1.0) +
                            std::fabs(psi_eval(0.0, 0) - 0.5);
        rep.add_abs_item("transition_cutoff_endpoints", ends, 1e-15);
    }

    // Arctan step scans.
    {
        const double sigma = 0.25, rs = std::sqrt(sigma);
        double sym = 0.0, second = 0.0, dmax = -1e300, decay_c = 0.0;
        for (int i = 0; i <= 4000; ++i) {
            const double x = -20.0 + 0.01 * i;
            sym = std::max(sym,
                           std::fabs(arctan_step(x, sigma, 0) + arctan_step(-x, sigma, 0) - 1.0));
            const double d1 = arctan_step(x, sigma, 1), d2 = arctan_step(x, sigma, 2);
            second = std::max(second, std::fabs(d2) - 0.5 * rs * std::fabs(d1));
            dmax = std::max(dmax, d1);
            decay_c = std::max(decay_c, std::fabs(d1) * std::exp(0.5 * rs * std::fabs(x)));
        }
        rep.add_abs_item("step_cutoff_symmetry", sym, 1e-12);
        rep.add_abs_item("step_cutoff_second_derivative", std::max(second, 0.0), 1e-15);
        rep.add_item("step_cutoff_strictly_decreasing", dmax, 0.0, dmax < 0.0);
        rep.add_item("step_cutoff_decay_constant", decay_c, 10.0, decay_c < 10.0);
    }

    // Partition of unity and weight bounds for a moving two-object family.
    {
        const ProfileSet pair = make_profile_set(
            {SolitonParams{1.0, 1, 0.0}, SolitonParams{2.0, 1, 0.0}});
        const double t = 10.0;
        const PhiWeights w = phi_weights(pair, t, grid, default_delta(pair));
        Field total(grid);
        for (const Field& f : w.phi) total += f;
        double dev = 0.0, ratio = 0.0;
        for (int i = 0; i < grid->n; ++i) {
            dev = std::max(dev, std::fabs(total.v[i] - 1.0));
            for (int j = 0; j < w.size(); ++j)
                if (w.phi[j].v[i] > 1e-250)
                    ratio = std::max(ratio, std::fabs(w.phi1[j].v[i]) /
                                                std::pow(w.phi[j].v[i], 0.75));
        }
        rep.add_abs_item("phi_partition_of_unity", dev, 1e-12);
        rep.add_item("phi_derivative_bound", ratio, 100.0, ratio < 100.0);

        // Cross products decay like exp(-beta tau t / 2).
        double c_ref = 0.0;
        for (int m = 0; m <= 2; ++m)
            for (int n = 0; n <= 2; ++n) {
                const Field a = eval_profile(pair.objects[0], 5.0, grid, m);
                const Field b = eval_profile(pair.objects[1], 5.0, grid, n);
                c_ref = std::max(c_ref, std::fabs(inner_product(a, b)));
            }
        c_ref *= std::exp(pair.beta_min * pair.tau * 5.0 / 2.0);
        double worst = 0.0;
        for (double t2 : {10.0, 15.0})
            for (int m = 0; m <= 2; ++m)
                for (int n = 0; n <= 2; ++n) {
                    const Field a = eval_profile(pair.objects[0], t2, grid, m);
                    const Field b = eval_profile(pair.objects[1], t2, grid, n);
                    const double bound =
                        2.0 * c_ref * std::exp(-pair.beta_min * pair.tau * t2 / 2.0);
                    worst = std::max(worst, std::fabs(inner_product(a, b)) / bound);
                }
        rep.add_item("cross_product_decay", worst, 1.0, worst <= 1.0);

        // Decay envelopes |d^n P_j| <= C exp(-beta |x - v t|) near each object.
        double c_env = 0.0;
        for (int j = 0; j < pair.size(); ++j) {
            const AbPair ab = ab_params(pair.objects[j]);
            for (int n = 0; n <= 2; ++n) {
                const Field f = eval_profile(pair.objects[j], 3.0, grid, n);
                for (int i = 0; i < grid->n; ++i) {
                    const double r = std::fabs(grid->x[i] - pair.velocities[j] * 3.0);
                    if (r < 30.0 / ab.b)
                        c_env = std::max(c_env, std::fabs(f.v[i]) * std::exp(ab.b * r));
                }
            }
        }
        rep.add_item("decay_envelope_constant", c_env, 1e3, c_env < 1e3);
    }

    rep.wall_clock_s = clock.seconds();
    return rep;
}

// ---------------------------------------------------------------------------
// conservation-drift

RunReport conservation_drift(const RunConfig& cfg) {
    Stopwatch clock;
    RunReport rep;
    rep.experiment = "conservation-drift";
    rep.config_echo = cfg.raw;
    const ProfileSet ps = profile_set_from(cfg);
    const GridPtr grid = make_grid(cfg.grid_length, cfg.grid_n);
    check_box_size(cfg, ps, cfg.t_end);

    const Field u0 = eval_profile_sum(ps, 0.0, grid);
    const Trajectory traj = integrate_flow(u0, 0.0, cfg.t_end, cfg.solver);

    const ConservedTriple ref = traj.conserved_series.front();
    double dm = 0.0, de = 0.0, df = 0.0;
    CsvTable table;
    table.header = {"t", "mass", "energy", "second_energy"};
    for (size_t i = 0; i < traj.times.size(); ++i) {
        const ConservedTriple& c = traj.conserved_series[i];
        dm = std::max(dm, std::fabs(c.mass - ref.mass) / std::fabs(ref.mass));
        de = std::max(de, std::fabs(c.energy - ref.energy) / std::fabs(ref.energy));
        df = std::max(df, std::fabs(c.second_energy - ref.second_energy) /
                              std::fabs(ref.second_energy));
        table.rows.push_back({traj.times[i], c.mass, c.energy, c.second_energy});
    }
    rep.add_abs_item("mass_drift", dm, 1e-7);
    rep.add_abs_item("energy_drift", de, 1e-7);
    rep.add_abs_item("second_energy_drift", df, 1e-7);
    rep.series.emplace_back("conserved", std::move(table));
    rep.wall_clock_s = clock.seconds();
    return rep;
}

// ---------------------------------------------------------------------------
// backward construction (shared by build-multibreather and hs-decay-scan)

namespace {

struct BackwardRun {
    double horizon = 0.0;
    std::vector<double> times;  // ascending
    std::vector<std::vector<double>> dist;  // [sample][s]
    std::vector<ConservedTriple> cons;
    Field at_t0;
};

BackwardRun backward_construct(const ProfileSet& ps, const GridPtr& grid, SolverConfig solver,
                               double t0, double horizon, int smax) {
    solver.direction = Direction::backward;
    BackwardRun run;
    run.horizon = horizon;
    const Field start = eval_profile_sum(ps, horizon, grid);
    Observer measure = [&](double t, const Field& u) {
        const Field diff = u - eval_profile_sum(ps, t, grid);
        std::vector<double> d(smax + 1);
        for (int s = 0; s <= smax; ++s) d[s] = sobolev_norm(diff, s);
        run.times.push_back(t);
        run.dist.push_back(std::move(d));
        run.cons.push_back(conserved(u));
    };
    const Trajectory traj = integrate_flow(start, horizon, t0, solver, {measure});
    run.at_t0 = traj.samples.back();

    // Backward integration records descending times.
    std::vector<size_t> order(run.times.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return run.times[a] < run.times[b]; });
    BackwardRun sorted;
    sorted.horizon = horizon;
    sorted.at_t0 = run.at_t0;
    for (size_t i : order) {
        sorted.times.push_back(run.times[i]);
        sorted.dist.push_back(run.dist[i]);
        sorted.cons.push_back(run.cons[i]);
    }
    return sorted;
}

struct MaskedFit {
    ExpFit fit;
    double floor = 0.0;
    int points = 0;
};

// Plateau level = smallest positive distance; the fit uses samples at least
// 10x above it.
MaskedFit fit_above_floor(const std::vector<double>& times, const std::vector<double>& dists) {
    MaskedFit out;
    double floor = std::numeric_limits<double>::infinity();
    for (double d : dists)
        if (d > 0.0) floor = std::min(floor, d);
    if (!std::isfinite(floor)) return out;
    out.floor = floor;
    std::vector<double> t, d;
    for (size_t i = 0; i < times.size(); ++i)
        if (dists[i] >= 10.0 * floor) {
            t.push_back(times[i]);
            d.push_back(dists[i]);
        }
    if (t.size() < 4) {
        t.clear();
        d.clear();
        for (size_t i = 0; i < times.size(); ++i)
            if (dists[i] > 0.0) {
                t.push_back(times[i]);
                d.push_back(dists[i]);
            }
    }
    if (t.size() >= 4) {
        out.fit = fit_exponential_rate(t, d);
        out.points = static_cast<int>(t.size());
    }
    return out;
}

double tail_mass(const Field& u, double radius) {
    double acc = 0.0;
    for (int i = 0; i < u.size(); ++i)
        if (std::fabs(u.grid->x[i]) > radius) acc += u.v[i] * u.v[i];
    return acc * u.grid->dx;
}

CsvTable backward_series(const BackwardRun& run, int smax) {
    CsvTable table;
    table.header = {"t", "mass", "energy", "second_energy"};
    for (int s = 0; s <= smax; ++s) table.header.push_back("dist_H" + std::to_string(s));
    for (size_t i = 0; i < run.times.size(); ++i) {
        std::vector<double> row = {run.times[i], run.cons[i].mass, run.cons[i].energy,
                                   run.cons[i].second_energy};
        for (int s = 0; s <= smax; ++s) row.push_back(run.dist[i][s]);
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::string horizon_tag(double horizon) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", horizon);
    std::string tag(buf);
    for (char& c : tag)
        if (c == '.') c = 'p';
    return tag;
}

}  // namespace

RunReport build_multibreather(const RunConfig& cfg) {
    Stopwatch clock;
    RunReport rep;
    rep.experiment = "build-multibreather";
    rep.config_echo = cfg.raw;
    const ProfileSet ps = profile_set_from(cfg);
    const GridPtr grid = make_grid(cfg.grid_length, cfg.grid_n);
    if (cfg.horizons.empty()) throw std::invalid_argument("no horizons configured");
    check_box_size(cfg, ps, *std::max_element(cfg.horizons.begin(), cfg.horizons.end()));

    const int count = static_cast<int>(cfg.horizons.size());
    std::function<BackwardRun(int)> task = [&](int i) {
        return backward_construct(ps, grid, cfg.solver, cfg.t0, cfg.horizons[i], 2);
    };
    const std::vector<BackwardRun> runs = parallel_map<BackwardRun>(cfg.threads, count, task);

    auto fits = nlohmann::ordered_json::array();
    double worst_floor = 0.0;

    if (ps.size() == 1) {
        // An exact single profile: the construction reproduces it to roundoff.
        double worst = 0.0;
        for (const BackwardRun& run : runs)
            for (const auto& d : run.dist) worst = std::max(worst, d[2]);
        rep.add_abs_item("single_profile_roundoff", worst, 1e-8);
    } else {
        std::vector<double> sup_ratios;
        for (int i = 0; i < count; ++i) {
            const BackwardRun& run = runs[i];
            std::vector<double> d2(run.dist.size());
            for (size_t s = 0; s < run.dist.size(); ++s) d2[s] = run.dist[s][2];
            const MaskedFit mf = fit_above_floor(run.times, d2);
            worst_floor = std::max(worst_floor, mf.floor);

            double sup = 0.0;
            for (size_t s = 0; s < run.times.size(); ++s)
                sup = std::max(sup, std::exp(ps.theta * run.times[s]) * d2[s]);
            sup_ratios.push_back(sup);

            const std::string tag = horizon_tag(run.horizon);
            rep.add_item("theta_hat_T" + tag, mf.fit.rate, 0.0, mf.fit.rate > 0.0);
            rep.add_item("fit_r2_T" + tag, mf.fit.r2, 0.95, mf.fit.r2 >= 0.95);
            fits.push_back({{"horizon", run.horizon},
                            {"amplitude", mf.fit.amplitude},
                            {"theta_hat", mf.fit.rate},
                            {"r2", mf.fit.r2},
                            {"points", mf.points},
                            {"noise_floor", mf.floor},
                            {"sup_exp_theta_dist", sup},
                            {"tail_mass_t0", tail_mass(runs[i].at_t0, cfg.tail_radius)}});
        }
        double ratio = 0.0;
        for (double s : sup_ratios) ratio = std::max(ratio, s / sup_ratios.front());
        rep.add_item("sup_exp_theta_bounded", ratio, 2.0, ratio <= 2.0);

        std::vector<double> cauchy;
        for (int i = 0; i + 1 < count; ++i)
            cauchy.push_back(sobolev_norm(runs[i + 1].at_t0 - runs[i].at_t0, 0.0));
        bool decreasing = true;
        for (size_t i = 0; i + 1 < cauchy.size(); ++i)
            if (!(cauchy[i + 1] < cauchy[i])) decreasing = false;
        rep.add_item("cauchy_differences_decreasing",
                     cauchy.empty() ? 0.0 : cauchy.back(), 0.0, decreasing);
        rep.fitted["cauchy_l2"] = cauchy;
    }
    rep.fitted["per_horizon"] = fits;
    rep.fitted["theta_paper"] = ps.theta;
    rep.noise_floor = worst_floor;
    for (int i = 0; i < count; ++i)
        rep.series.emplace_back("series_T" + horizon_tag(runs[i].horizon),
                                backward_series(runs[i], 2));
    rep.wall_clock_s = clock.seconds();
    return rep;
}

RunReport hs_decay_scan(const RunConfig& cfg) {
    Stopwatch clock;
    RunReport rep;
    rep.experiment = "hs-decay-scan";
    rep.config_echo = cfg.raw;
    const ProfileSet ps = profile_set_from(cfg);
    const GridPtr grid = make_grid(cfg.grid_length, cfg.grid_n);
    if (cfg.horizons.empty()) throw std::invalid_argument("no horizons configured");
    check_box_size(cfg, ps, *std::max_element(cfg.horizons.begin(), cfg.horizons.end()));

    const int smax = 4;
    const int count = static_cast<int>(cfg.horizons.size());
    std::function<BackwardRun(int)> task = [&](int i) {
        return backward_construct(ps, grid, cfg.solver, cfg.t0, cfg.horizons[i], smax);
    };
    const std::vector<BackwardRun> runs = parallel_map<BackwardRun>(cfg.threads, count, task);

    auto fits = nlohmann::ordered_json::array();
    for (int i = 0; i < count; ++i) {
        const BackwardRun& run = runs[i];
        const std::string tag = horizon_tag(run.horizon);
        std::vector<double> rates(smax + 1, 0.0);
        for (int s = 0; s <= smax; ++s) {
            std::vector<double> d(run.dist.size());
            for (size_t m = 0; m < run.dist.size(); ++m) d[m] = run.dist[m][s];
            const MaskedFit mf = fit_above_floor(run.times, d);
            rates[s] = mf.fit.rate;
            fits.push_back({{"horizon", run.horizon},
                            {"s", s},
                            {"theta_hat", mf.fit.rate},
                            {"r2", mf.fit.r2},
                            {"noise_floor", mf.floor}});
        }
        if (ps.size() > 1 && rates[2] > 0.0) {
            const double rel = std::fabs(rates[3] / rates[2] - 1.0);
            rep.add_item("rate_agreement_s3_s2_T" + tag, rel, 0.3, rel <= 0.3);
        }
        double mono = 0.0;
        for (const auto& d : run.dist) mono = std::max(mono, d[0] - d[2] * (1.0 + 1e-12));
        rep.add_abs_item("norm_monotone_in_s_T" + tag, std::max(mono, 0.0), 1e-14);
        rep.series.emplace_back("hs_series_T" + tag, backward_series(run, smax));
    }
    if (ps.size() == 1) {
        double worst = 0.0;
        for (const BackwardRun& run : runs)
            for (const auto& d : run.dist) worst = std::max(worst, d[smax]);
        rep.add_abs_item("single_profile_roundoff", worst, 1e-7);
    }
    rep.fitted["per_horizon_s"] = fits;
    rep.wall_clock_s = clock.seconds();
    return rep;
}

// ---------------------------------------------------------------------------
// coercivity-scan

RunReport coercivity_scan(const RunConfig& cfg) {
    Stopwatch clock;
    RunReport rep;
    rep.experiment = "coercivity-scan";
    rep.config_echo = cfg.raw;
    const GridPtr grid = make_grid(cfg.grid_length, cfg.grid_n);

    CsvTable table;
    table.header = {"kind",        "param1",          "param2",         "unconstrained_min",
                    "constrained_min", "negative_count", "near_zero_count", "kernel_residual_1",
                    "kernel_residual_2"};

    for (size_t idx = 0; idx < cfg.profiles.size(); ++idx) {
        const ProfileObject& obj = cfg.profiles[idx];
        const AbPair ab = ab_params(obj);
        const Field background = eval_profile(obj, 0.0, grid);
        const SymmetricOperator op = assemble_operator(background, ab);
        const OperatorSpectrum spectrum = operator_spectrum(op);
        const std::vector<Field> kernel = kernel_basis(obj, 0.0, grid);

        const bool is_soliton = std::holds_alternative<SolitonParams>(obj);
        std::vector<Field> constraints;
        if (is_soliton) {
            constraints = {background, spectral_derivative(background, 1)};
        } else {
            constraints = kernel;
            constraints.push_back(background);
        }
        const double unconstrained = constrained_min_eigenvalue(op, {});
        const double constrained = constrained_min_eigenvalue(op, constraints);
        const double kres1 = operator_kernel_residual(op, kernel[0]);
        const double kres2 = operator_kernel_residual(op, kernel[1]);

        const std::string tag = std::to_string(idx);
        rep.add_item("near_zero_count_" + tag, spectrum.near_zero_count, 2.0,
                     spectrum.near_zero_count == 2);
        rep.add_item("negative_count_" + tag, spectrum.negative_count,
                     is_soliton ? 0.0 : 1.0,
                     spectrum.negative_count == (is_soliton ? 0 : 1));
        rep.add_item("constrained_min_positive_" + tag, constrained, 0.0, constrained > 0.0);
        rep.add_abs_item("kernel_residual_a_" + tag, kres1, 1e-5);
        rep.add_abs_item("kernel_residual_b_" + tag, kres2, 1e-5);

        // Near-zero eigenvectors should lie in the span of the kernel basis.
        double min_corr = 1.0;
        for (int m = 0; m < spectrum.eigenvalues.size(); ++m)
            if (std::fabs(spectrum.eigenvalues(m)) <= 1e-6) {
                Field vec(grid);
                for (int i = 0; i < grid->n; ++i) vec.v[i] = spectrum.eigenvectors(i, m);
                min_corr = std::min(min_corr, subspace_correlation(vec, kernel));
            }
        rep.add_item("kernel_correlation_" + tag, min_corr, 0.999, min_corr > 0.999);

        double p1 = 0.0, p2 = 0.0;
        if (is_soliton) {
            p1 = std::get<SolitonParams>(obj).c;
        } else {
            p1 = std::get<BreatherParams>(obj).alpha;
            p2 = std::get<BreatherParams>(obj).beta;
        }
        table.rows.push_back({is_soliton ? 0.0 : 1.0, p1, p2, unconstrained, constrained,
                              static_cast<double>(spectrum.negative_count),
                              static_cast<double>(spectrum.near_zero_count), kres1, kres2});
    }
    rep.series.emplace_back("coercivity", std::move(table));
    rep.wall_clock_s = clock.seconds();
    return rep;
}

// ---------------------------------------------------------------------------
// monotonicity

RunReport monotonicity_run(const RunConfig& cfg) {
    Stopwatch clock;
    RunReport rep;
    rep.experiment = "monotonicity";
    rep.config_echo = cfg.raw;
    const ProfileSet ps = profile_set_from(cfg);
    for (double v : ps.velocities)
        if (!(v > 0.0))
            throw std::invalid_argument("monotonicity requires all-positive velocities");
    const GridPtr grid = make_grid(cfg.grid_length, cfg.grid_n);
    check_box_size(cfg, ps, cfg.t_end);

    const double sigma = cfg.sigma.value_or(default_sigma(ps));
    const double m2 = ps.size() > 1 ? 0.5 * (ps.velocities[0] + ps.velocities[1])
                                    : ps.velocities[0];
    if (!(sigma > 0.0) || sigma > m2)
        throw std::invalid_argument("sigma must lie in (0, m_2]");
    const double tau0 = ps.size() > 1 ? min_velocity_midpoint_gap(ps) : ps.velocities[0];
    const double varpi = std::sqrt(sigma) * tau0 / 4.0;

    Field u0 = eval_profile_sum(ps, 0.0, grid);
    {
        Field noise = random_smooth_field(grid, cfg.seed);
        for (int i = 0; i < u0.size(); ++i) u0.v[i] += cfg.noise_amplitude * noise.v[i];
    }
    const Trajectory traj = integrate_flow(u0, 0.0, cfg.t_end, cfg.solver);
    const int samples = static_cast<int>(traj.times.size());
    const int count = ps.size();

    // Localized values against the step weights at each sample time.
    std::vector<std::vector<double>> mass(count), energy(count), second(count);
    for (int i = 0; i < samples; ++i) {
        const PhiSteps steps = step_weights(ps, traj.times[i], grid, sigma);
        std::vector<Field> monitored(steps.Phi.begin() + 1, steps.Phi.end());
        const LocalizedSeries loc =
            localized_conserved(traj.samples[i], monitored, LocalizedVariant::step);
        for (int j = 0; j < count; ++j) {
            mass[j].push_back(loc.mass[j]);
            energy[j].push_back(loc.energy[j]);
            second[j].push_back(loc.second_energy[j]);
        }
    }

    // Finite-difference derivative lower bounds with C fitted on the first
    // interval: D_i >= -10 C exp(-2 varpi t).
    auto check_quantity = [&](const std::string& name, const std::vector<double>& q) {
        double worst_margin = std::numeric_limits<double>::infinity();
        double c_fit = 0.0;
        for (int i = 0; i + 1 < samples; ++i) {
            const double dt = traj.times[i + 1] - traj.times[i];
            const double tm = 0.5 * (traj.times[i + 1] + traj.times[i]);
            const double deriv = (q[i + 1] - q[i]) / dt;
            if (i == 0) c_fit = std::max(std::fabs(deriv), 1e-12) / std::exp(-2.0 * varpi * tm);
            const double bound = -10.0 * c_fit * std::exp(-2.0 * varpi * tm);
            worst_margin = std::min(worst_margin, deriv - bound);
        }
        rep.add_item(name, worst_margin, 0.0, worst_margin >= 0.0);
    };
    for (int j = 0; j < count; ++j) {
        const std::string tag = std::to_string(j + 1);
        std::vector<double> e_comb(samples), f_comb(samples);
        for (int i = 0; i < samples; ++i) {
            e_comb[i] = energy[j][i] + cfg.omega2 * mass[j][i];
            f_comb[i] = second[j][i] + cfg.omega6 * mass[j][i];
        }
        check_quantity("mass_monotone_j" + tag, mass[j]);
        check_quantity("energy_monotone_j" + tag, e_comb);
        check_quantity("second_energy_monotone_j" + tag, f_comb);
    }

    // Level version: sum_{i<j} M[P_i] - M_j(t) stays above -C exp(-2 varpi t)
    // (reported, not gated).
    {
        auto levels = nlohmann::ordered_json::array();
        for (int j = 0; j < count; ++j) {
            double profile_sum = 0.0;
            for (int i = 0; i <= j; ++i)
                profile_sum += conserved(eval_profile(ps.objects[i], 0.0, grid)).mass;
            double worst = std::numeric_limits<double>::infinity();
            for (int i = 0; i < samples; ++i)
                worst = std::min(worst, (profile_sum - mass[j][i]) *
                                            std::exp(2.0 * varpi * traj.times[i]));
            levels.push_back({{"j", j + 1}, {"min_scaled_defect", worst}});
        }
        rep.fitted["mass_level_defects"] = levels;
    }

    // Time-derivative identity for the localized second energy with a frozen
    // weight, validated by a 4th-order finite difference.
    {
        int mid = samples / 2;
        mid = std::max(2, std::min(samples - 3, mid));
        const double t_star = traj.times[mid];
        const double m_ref = ps.size() > 1 ? 0.5 * (ps.velocities[0] + ps.velocities[1])
                                           : ps.velocities[0];
        Field f(grid), f1(grid), f2(grid), f3(grid);
        for (int i = 0; i < grid->n; ++i) {
            const double arg = grid->x[i] - m_ref * t_star;
            f.v[i] = arctan_step(arg, sigma, 0);
            f1.v[i] = arctan_step(arg, sigma, 1);
            f2.v[i] = arctan_step(arg, sigma, 2);
            f3.v[i] = arctan_step(arg, sigma, 3);
        }
        auto second_energy_against = [&](const Field& u, const Field& w) {
            const LocalizedSeries loc = localized_conserved(u, {w}, LocalizedVariant::step);
            return loc.second_energy[0];
        };
        // 4th-order stencil from short dedicated integrations around t_star;
        // the spacing is a few solver steps so the truncation error stays far
        // below the 1e-4 gate.
        const double h = 5.0 * cfg.solver.dt;
        SolverConfig fine = cfg.solver;
        fine.sample_stride = 1 << 20;
        auto shifted = [&](double offset) {
            if (offset == 0.0) return traj.samples[mid];
            SolverConfig dir = fine;
            dir.direction = offset > 0.0 ? Direction::forward : Direction::backward;
            return integrate_flow(traj.samples[mid], t_star, t_star + offset, dir).samples.back();
        };
        const double gm2 = second_energy_against(shifted(-2.0 * h), f);
        const double gm1 = second_energy_against(shifted(-h), f);
        const double gp1 = second_energy_against(shifted(h), f);
        const double gp2 = second_energy_against(shifted(2.0 * h), f);
        const double fd = (-gp2 + 8.0 * gp1 - 8.0 * gm1 + gm2) / (12.0 * h);

        const Field& u = traj.samples[mid];
        const Field ux = spectral_derivative(u, 1);
        const Field uxx = spectral_derivative(u, 2);
        const Field uxxx = spectral_derivative(u, 3);
        Field d1(grid), d2(grid), d3(grid);
        for (int i = 0; i < grid->n; ++i) {
            const double a = u.v[i], ax = ux.v[i], axx = uxx.v[i], axxx = uxxx.v[i];
            d1.v[i] = (-1.5 * axxx * axxx + 9.0 * axx * axx * a * a +
                       15.0 * ax * ax * a * axx + 9.0 / 16.0 * std::pow(a, 8) +
                       0.25 * std::pow(ax, 4) + 1.5 * axx * std::pow(a, 5) -
                       45.0 / 4.0 * std::pow(a, 4) * ax * ax) *
                      f1.v[i];
            d2.v[i] = 5.0 * a * a * ax * axx * f2.v[i];
            d3.v[i] = 0.5 * axx * axx * f3.v[i];
        }
        const double rhs = integrate(d1) + integrate(d2) + integrate(d3);
        const double scale = std::max(std::fabs(rhs), std::fabs(fd));
        const double rel = scale > 0.0 ? std::fabs(fd - rhs) / scale : 0.0;
        rep.add_abs_item("localized_second_energy_derivative_identity", rel, 1e-4);
        rep.fitted["derivative_identity"] = {{"t_star", t_star}, {"fd", fd}, {"rhs", rhs}};

        // Constant weight: the same finite difference on the conserved value.
        Field ones(grid);
        for (double& x : ones.v) x = 1.0;
        const double c_m2 = second_energy_against(shifted(-2.0 * h), ones);
        const double c_m1 = second_energy_against(shifted(-h), ones);
        const double c_p1 = second_energy_against(shifted(h), ones);
        const double c_p2 = second_energy_against(shifted(2.0 * h), ones);
        const double fd_const = (-c_p2 + 8.0 * c_p1 - 8.0 * c_m1 + c_m2) / (12.0 * h);
        rep.add_abs_item("constant_weight_derivative", fd_const, 1e-6);
    }

    CsvTable table;
    table.header = {"t"};
    for (int j = 1; j <= count; ++j) {
        table.header.push_back("mass_j" + std::to_string(j));
        table.header.push_back("energy_j" + std::to_string(j));
        table.header.push_back("second_energy_j" + std::to_string(j));
    }
    for (int i = 0; i < samples; ++i) {
        std::vector<double> row = {traj.times[i]};
        for (int j = 0; j < count; ++j) {
            row.push_back(mass[j][i]);
            row.push_back(energy[j][i]);
            row.push_back(second[j][i]);
        }
        table.rows.push_back(std::move(row));
    }
    rep.series.emplace_back("localized", std::move(table));
    rep.fitted["sigma"] = sigma;
    rep.fitted["varpi"] = varpi;
    rep.wall_clock_s = clock.seconds();
    return rep;
}

// ---------------------------------------------------------------------------
// modulation-recovery

RunReport modulation_recovery(const RunConfig& cfg) {
    Stopwatch clock;
    RunReport rep;
    rep.experiment = "modulation-recovery";
    rep.config_echo = cfg.raw;
    if (cfg.snapshot_path.empty()) throw std::invalid_argument("snapshot path required");
    const Snapshot snap = read_snapshot(cfg.snapshot_path);
    const ProfileSet ps = profile_set_from(cfg);

    std::vector<Field> phi;
    if (ps.size() > 1 && snap.t > 0.0) {
        const PhiWeights w =
            phi_weights(ps, snap.t, snap.u.grid, cfg.delta.value_or(default_delta(ps)));
        phi = w.phi;
    } else {
        phi = global_weights(ps, snap.u.grid);
    }
    const ModulationResult res = modulate(snap.u, ps, snap.t, phi);

    double worst = 0.0;
    for (double r : res.residuals) worst = std::max(worst, std::fabs(r));
    rep.add_item("converged", res.iterations, 50.0, res.converged);
    rep.add_abs_item("max_orthogonality_residual", worst, 1e-11);
    auto params = nlohmann::ordered_json::array();
    for (int j = 0; j < ps.size(); ++j) {
        const bool is_soliton = std::holds_alternative<SolitonParams>(ps.objects[j]);
        params.push_back({{"type", is_soliton ? "soliton" : "breather"},
                          {is_soliton ? "x0_shift" : "x1_shift", res.params[j][0]},
                          {is_soliton ? "c_shift" : "x2_shift", res.params[j][1]}});
    }
    rep.fitted["params"] = params;
    rep.fitted["iterations"] = res.iterations;
    rep.fitted["residuals"] = res.residuals;
    rep.wall_clock_s = clock.seconds();
    return rep;
}

RunReport run_experiment(const RunConfig& cfg) {
    if (cfg.experiment == "verify-identities") return verify_identities(cfg);
    if (cfg.experiment == "conservation-drift") return conservation_drift(cfg);
    if (cfg.experiment == "build-multibreather") return build_multibreather(cfg);
    if (cfg.experiment == "hs-decay-scan") return hs_decay_scan(cfg);
    if (cfg.experiment == "coercivity-scan") return coercivity_scan(cfg);
    if (cfg.experiment == "monotonicity") return monotonicity_run(cfg);
    if (cfg.experiment == "modulation-recovery") return modulation_recovery(cfg);
    throw std::invalid_argument("unknown experiment: " + cfg.experiment);
}

}  // namespace mkdv
