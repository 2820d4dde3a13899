#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mkdv/profiles.hpp"
#include "mkdv/report.hpp"
#include "mkdv/solver.hpp"

namespace mkdv {

// Parsed run configuration (JSON, schema 1). See README for the layout.
struct RunConfig {
    std::string experiment;
    double grid_length = 120.0;
    int grid_n = 2048;
    std::vector<ProfileObject> profiles;
    SolverConfig solver;
    double t0 = 2.0;
    std::vector<double> horizons = {5.0, 7.5, 10.0};  // T_n, increasing
    std::optional<double> delta;   // phi transition width
    std::optional<double> sigma;   // arctan step slope
    double tail_radius = 40.0;     // R for the tail-mass diagnostic
    double noise_amplitude = 1e-3;
    double omega2 = 0.1;
    double omega6 = 0.1;
    double t_end = 6.0;  // forward horizon (drift / monotonicity)
    std::uint64_t seed = 0;
    int threads = 1;
    bool box_check_override = false;
    bool corrupt_soliton_scale = false;  // negative control in verify-identities
    std::string snapshot_path;
    nlohmann::ordered_json raw = nlohmann::ordered_json::object();
};

RunConfig parse_run_config(const nlohmann::ordered_json& j);
RunConfig load_run_config(const std::string& path);

// Half box length must cover max |v_j| * horizon plus 40/beta_min of decay
// room; throws unless box_check_override is set.
void check_box_size(const RunConfig& cfg, const ProfileSet& ps, double horizon);

ProfileSet profile_set_from(const RunConfig& cfg);

// Least squares of log(norm) against t: norm ~ amplitude * exp(-rate * t).
struct ExpFit {
    double amplitude = 0.0;
    double rate = 0.0;
    double r2 = 0.0;
};
ExpFit fit_exponential_rate(const std::vector<double>& times, const std::vector<double>& norms);

// Deterministic smooth random field with unit H2 norm.
Field random_smooth_field(const GridPtr& grid, std::uint64_t seed);

RunReport verify_identities(const RunConfig& cfg);
RunReport conservation_drift(const RunConfig& cfg);
RunReport build_multibreather(const RunConfig& cfg);
RunReport hs_decay_scan(const RunConfig& cfg);
RunReport coercivity_scan(const RunConfig& cfg);
RunReport monotonicity_run(const RunConfig& cfg);
RunReport modulation_recovery(const RunConfig& cfg);

// Dispatch on cfg.experiment.
RunReport run_experiment(const RunConfig& cfg);

}  // namespace mkdv
