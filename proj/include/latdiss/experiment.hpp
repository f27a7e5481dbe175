#ifndef LATDISS_EXPERIMENT_HPP
#define LATDISS_EXPERIMENT_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "latdiss/dissipation.hpp"
#include "latdiss/gaussian.hpp"
#include "latdiss/lattice.hpp"

namespace latdiss {

inline constexpr const char* kToolVersion = "0.1.0";

/// One reproducible dataset run. All computations are deterministic, so
/// the run directory is named by a hash of the canonical config text.
struct ExperimentConfig {
    std::string experiment;  // dissipation-spectrum | gamma-sweep | ring-analytics |
                             // eigenmode-correlations | lightcone
    ModelSpec model;
    std::vector<double> gammas;
    double nbar = 1.0;
    std::optional<Complex> m;  // empty: pure squeezing |m|^2 = nbar(nbar+1)
    std::vector<double> times;
    std::string output_dir = "runs";
    int workers = 1;
    std::optional<double> jeff;  // override for the effective DOS rate

    void validate() const;
    Complex bath_m() const;
    BathSpec bath(double gamma) const;
};

/// Parses the plain key-value config format (one `key = value` per
/// line, `#` comments, comma-separated lists).
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Applies a single `key=value` override on top of a parsed config.
void apply_override(ExperimentConfig& cfg, const std::string& keyval);

/// Canonical serialization used for hashing and manifest round-trips.
std::string canonical_config_text(const ExperimentConfig& cfg);

/// FNV-1a 64-bit hash of the canonical config text, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

/// One (Gamma, mode) record of a coupling sweep.
struct SweepRow {
    double gamma = 0.0;
    int mode = 0;
    double energy = 0.0;
    double spacing = 0.0;
    double weight = 0.0;
    double remainder = 0.0;
    double gamma_exact = 0.0;
    double gamma_approx = 0.0;
    double dnu = 0.0;
    Regime regime = Regime::Perturbative;
    bool ok = true;
    std::string error;
};

/// Exact + approximate spectra per Gamma; the EigenSystem is shared and
/// Gamma values are distributed over a bounded worker pool. Per-Gamma
/// failures are recorded in the rows and the sweep continues. Rows come
/// back ordered by (Gamma list position, mode).
std::vector<SweepRow> sweep_gamma(const EigenSystem& es, const std::vector<double>& gammas,
                                  int workers);

struct RunResult {
    std::filesystem::path run_dir;
    std::filesystem::path manifest_path;
};

/// Executes the configured experiment: writes the CSV datasets plus a
/// manifest.json recording inputs, tool version and wall time.
RunResult run_experiment(const ExperimentConfig& cfg);

} // namespace latdiss

#endif
