#include "latdiss/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace latdiss {

namespace {

using nlohmann::json;

std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string join17(const std::vector<double>& xs) {
    std::string out;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        if (k) out += ", ";
        out += fmt17(xs[k]);
    }
    return out;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: cannot parse number for '" + key + "': '" + v + "'");
    }
}

int parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const int x = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: cannot parse integer for '" + key + "': '" + v + "'");
    }
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
    std::vector<double> xs;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) xs.push_back(parse_double(key, item));
    }
    return xs;
}

// Accepts "re", "re+imi" or "re-imi".
Complex parse_complex(const std::string& key, const std::string& v) {
    const char* s = v.c_str();
    char* end = nullptr;
    const double re = std::strtod(s, &end);
    if (end == s) throw ConfigError("config: cannot parse complex for '" + key + "': '" + v + "'");
    while (*end == ' ') ++end;
    if (*end == '\0') return Complex(re, 0.0);
    const char* s2 = end;
    char* end2 = nullptr;
    const double im = std::strtod(s2, &end2);
    if (end2 == s2 || *end2 != 'i' || *(end2 + 1) != '\0')
        throw ConfigError("config: cannot parse complex for '" + key + "': '" + v + "'");
    return Complex(re, im);
}

void set_key(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "experiment") cfg.experiment = value;
    else if (key == "kind") cfg.model.kind = value;
    else if (key == "n") cfg.model.n = parse_int(key, value);
    else if (key == "nx") cfg.model.nx = parse_int(key, value);
    else if (key == "ny") cfg.model.ny = parse_int(key, value);
    else if (key == "j") cfg.model.j = parse_double(key, value);
    else if (key == "flux") cfg.model.flux = parse_double(key, value);
    else if (key == "v") cfg.model.v = parse_double(key, value);
    else if (key == "drain") cfg.model.drain_override = parse_int(key, value);
    else if (key == "gammas") cfg.gammas = parse_list(key, value);
    else if (key == "nbar") cfg.nbar = parse_double(key, value);
    else if (key == "m") cfg.m = parse_complex(key, value);
    else if (key == "times") cfg.times = parse_list(key, value);
    else if (key == "out") cfg.output_dir = value;
    else if (key == "workers") cfg.workers = parse_int(key, value);
    else if (key == "jeff") cfg.jeff = parse_double(key, value);
    else throw ConfigError("config: unknown key '" + key + "'");
}

const char* kKnownExperiments[] = {"dissipation-spectrum", "gamma-sweep", "ring-analytics",
                                   "eigenmode-correlations", "lightcone"};

} // namespace

void ExperimentConfig::validate() const {
    bool known = false;
    for (const char* e : kKnownExperiments) known = known || experiment == e;
    if (!known) throw ConfigError("config: unrecognized experiment '" + experiment + "'");
    for (double g : gammas)
        if (g < 0.0) throw ConfigError("config: gamma values must be >= 0");
    if (workers < 1) throw ConfigError("config: workers must be >= 1");
    if (nbar < 0.0) throw ConfigError("config: nbar must be >= 0");
}

Complex ExperimentConfig::bath_m() const {
    if (m) return *m;
    return Complex(std::sqrt(nbar * (nbar + 1.0)), 0.0);
}

BathSpec ExperimentConfig::bath(double gamma) const {
    BathSpec b;
    b.nbar = nbar;
    b.m = bath_m();
    b.gamma = gamma;
    b.validate();
    return b;
}

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        set_key(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_config_text(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError(std::string(e.what()) + " [" + path + "]");
    }
}

void apply_override(ExperimentConfig& cfg, const std::string& keyval) {
    const auto eq = keyval.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override: expected key=value, got '" + keyval + "'");
    set_key(cfg, trim(keyval.substr(0, eq)), trim(keyval.substr(eq + 1)));
}

std::string canonical_config_text(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out << "experiment = " << cfg.experiment << "\n";
    out << "kind = " << cfg.model.kind << "\n";
    out << "n = " << cfg.model.n << "\n";
    out << "nx = " << cfg.model.nx << "\n";
    out << "ny = " << cfg.model.ny << "\n";
    out << "j = " << fmt17(cfg.model.j) << "\n";
    out << "flux = " << fmt17(cfg.model.flux) << "\n";
    out << "v = " << fmt17(cfg.model.v) << "\n";
    out << "drain = " << cfg.model.drain_override << "\n";
    out << "gammas = " << join17(cfg.gammas) << "\n";
    out << "nbar = " << fmt17(cfg.nbar) << "\n";
    const Complex mm = cfg.bath_m();
    out << "m = " << fmt17(mm.real());
    if (mm.imag() != 0.0) out << (mm.imag() > 0 ? "+" : "") << fmt17(mm.imag()) << "i";
    out << "\n";
    out << "times = " << join17(cfg.times) << "\n";
    out << "workers = " << cfg.workers << "\n";
    if (cfg.jeff) out << "jeff = " << fmt17(*cfg.jeff) << "\n";
    return out.str();
}

std::string config_hash(const ExperimentConfig& cfg) {
    const std::string text = canonical_config_text(cfg);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<SweepRow> sweep_gamma(const EigenSystem& es, const std::vector<double>& gammas,
                                  int workers) {
    if (gammas.empty()) throw std::invalid_argument("sweep_gamma: gamma list is empty");
    const int m = es.n_modes();
    const RealVector r = remainders(es);

    std::vector<std::vector<SweepRow>> slots(gammas.size());
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        while (true) {
            const std::size_t k = next.fetch_add(1);
            if (k >= gammas.size()) return;
            const double g = gammas[k];
            std::vector<SweepRow> rows(m);
            try {
                const Matrix a = dynamical_matrix(es, g);
                const DynamicalSpectrum ds = exact_dynamical_spectrum(a, es, g);
                const ApproxSpectrum ap = approx_dissipation_spectrum(es, r, g);
                for (int i = 0; i < m; ++i) {
                    SweepRow& row = rows[i];
                    row.gamma = g;
                    row.mode = i;
                    row.energy = es.energies(i);
                    row.spacing = es.spacing(i);
                    row.weight = es.drain_weight(i);
                    row.remainder = r(i);
                    row.gamma_exact = ds.gamma(i);
                    row.gamma_approx = ap.gamma_approx(i);
                    row.dnu = ds.dnu(i);
                    row.regime = ap.regime[i];
                }
            } catch (const std::exception& e) {
                for (int i = 0; i < m; ++i) {
                    rows[i].gamma = g;
                    rows[i].mode = i;
                    rows[i].ok = false;
                    rows[i].error = e.what();
                }
            }
            slots[k] = std::move(rows);
        }
    };

    const int nthreads = std::min<std::size_t>(std::max(workers, 1), gammas.size());
    std::vector<std::thread> pool;
    for (int k = 0; k + 1 < nthreads; ++k) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();

    std::vector<SweepRow> rows;
    rows.reserve(gammas.size() * m);
    for (auto& s : slots)
        for (auto& row : s) rows.push_back(std::move(row));
    return rows;
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    out << text;
}

std::string spectrum_csv(const EigenSystem& es, const RealVector& r, const DynamicalSpectrum& ds,
                         const ApproxSpectrum& ap) {
    std::string csv = "i,energy,spacing,drain_weight,remainder,gamma_exact,gamma_approx,dnu,regime\n";
    for (int i = 0; i < es.n_modes(); ++i) {
        csv += std::to_string(i) + ',' + fmt17(es.energies(i)) + ',' + fmt17(es.spacing(i)) + ',' +
               fmt17(es.drain_weight(i)) + ',' + fmt17(r(i)) + ',' + fmt17(ds.gamma(i)) + ',' +
               fmt17(ap.gamma_approx(i)) + ',' + fmt17(ds.dnu(i)) + ',' +
               regime_name(ap.regime[i]) + '\n';
    }
    return csv;
}

std::string correlator_csv(const GaussianState& exact, const GaussianState& formula) {
    std::string csv =
        "i,j,re_normal,im_normal,re_anomalous,im_anomalous,"
        "re_normal_formula,im_normal_formula,re_anomalous_formula,im_anomalous_formula\n";
    const int m = exact.n_modes();
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            csv += std::to_string(i) + ',' + std::to_string(j) + ',' +
                   fmt17(exact.normal(i, j).real()) + ',' + fmt17(exact.normal(i, j).imag()) +
                   ',' + fmt17(exact.anomalous(i, j).real()) + ',' +
                   fmt17(exact.anomalous(i, j).imag()) + ',' +
                   fmt17(formula.normal(i, j).real()) + ',' + fmt17(formula.normal(i, j).imag()) +
                   ',' + fmt17(formula.anomalous(i, j).real()) + ',' +
                   fmt17(formula.anomalous(i, j).imag()) + '\n';
    return csv;
}

std::string site_csv(const GaussianState& site) {
    std::string csv = "m,n,re_normal,im_normal,re_anomalous,im_anomalous\n";
    const int n = site.n_modes();
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            csv += std::to_string(a) + ',' + std::to_string(b) + ',' +
                   fmt17(site.normal(a, b).real()) + ',' + fmt17(site.normal(a, b).imag()) + ',' +
                   fmt17(site.anomalous(a, b).real()) + ',' + fmt17(site.anomalous(a, b).imag()) +
                   '\n';
    return csv;
}

} // namespace

RunResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();

    LatticeModel model;
    try {
        model = build_model(cfg.model);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: invalid model spec: ") + e.what());
    }

    const std::string hash = config_hash(cfg);
    const std::filesystem::path dir =
        std::filesystem::path(cfg.output_dir) / (cfg.experiment + "-" + hash);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output dir '" + dir.string() + "': " + ec.message());

    const EigenSystem es = diagonalize_coupled(model);
    json manifest;
    manifest["tool_version"] = kToolVersion;
    manifest["experiment"] = cfg.experiment;
    manifest["hash"] = hash;
    manifest["config"] = canonical_config_text(cfg);
    manifest["model"] = {{"label", model.label},        {"n_sites", model.n_sites},
                         {"drain", model.drain},        {"hop_scale", model.hop_scale},
                         {"site_indexing", "row-major"}, {"modes_retained", es.n_modes()},
                         {"modes_dropped", es.n_dropped()}};
    manifest["bath"] = {{"nbar", cfg.nbar},
                        {"m_re", cfg.bath_m().real()},
                        {"m_im", cfg.bath_m().imag()}};
    manifest["float_format"] = "printf %.17g, IEEE-754 binary64";
    json outputs = json::array();

    auto emit = [&](const std::string& name, const std::string& text) {
        write_text(dir / name, text);
        outputs.push_back(name);
    };

    if (cfg.experiment == "dissipation-spectrum") {
        if (cfg.gammas.empty()) throw ConfigError("config: dissipation-spectrum needs gammas");
        const RealVector r = remainders(es);
        for (std::size_t k = 0; k < cfg.gammas.size(); ++k) {
            const double g = cfg.gammas[k];
            const DynamicalSpectrum ds = exact_dynamical_spectrum(dynamical_matrix(es, g), es, g);
            const ApproxSpectrum ap = approx_dissipation_spectrum(es, r, g);
            emit("spectrum-" + std::to_string(k) + ".csv", spectrum_csv(es, r, ds, ap));
        }
        manifest["gammas"] = cfg.gammas;
    } else if (cfg.experiment == "gamma-sweep") {
        if (cfg.gammas.empty()) throw ConfigError("config: gamma-sweep needs gammas");
        const auto rows = sweep_gamma(es, cfg.gammas, cfg.workers);
        std::string csv =
            "gamma,i,energy,spacing,drain_weight,remainder,gamma_exact,gamma_approx,"
            "ratio_exact,ratio_approx,regime,status\n";
        for (const auto& row : rows) {
            const double gbar = row.weight * row.gamma;
            csv += fmt17(row.gamma) + ',' + std::to_string(row.mode) + ',';
            if (row.ok) {
                csv += fmt17(row.energy) + ',' + fmt17(row.spacing) + ',' + fmt17(row.weight) +
                       ',' + fmt17(row.remainder) + ',' + fmt17(row.gamma_exact) + ',' +
                       fmt17(row.gamma_approx) + ',' +
                       fmt17(gbar > 0 ? row.gamma_exact / gbar : 0.0) + ',' +
                       fmt17(gbar > 0 ? row.gamma_approx / gbar : 0.0) + ',' +
                       regime_name(row.regime) + ",ok\n";
            } else {
                std::string msg = row.error;
                for (char& c : msg)
                    if (c == ',' || c == '\n') c = ';';
                csv += ",,,,,,,,,error: " + msg + "\n";
            }
        }
        emit("sweep.csv", csv);
        manifest["gammas"] = cfg.gammas;
    } else if (cfg.experiment == "ring-analytics") {
        if (cfg.model.kind != "ring")
            throw ConfigError("config: ring-analytics requires kind = ring");
        if (cfg.gammas.empty()) throw ConfigError("config: ring-analytics needs gammas");
        json per_gamma = json::array();
        for (std::size_t k = 0; k < cfg.gammas.size(); ++k) {
            const double g = cfg.gammas[k];
            const RingAnalytics ra = ring_analytics(model.n_sites, model.hop_scale, g);
            const DynamicalSpectrum ds = exact_dynamical_spectrum(dynamical_matrix(es, g), es, g);
            std::string csv = "i,energy,gamma_exact,gamma_analytic,macroscopic\n";
            for (int i = 0; i < es.n_modes(); ++i)
                csv += fmt17(ra.mode_index(i)) + ',' + fmt17(es.energies(i)) + ',' +
                       fmt17(ds.gamma(i)) + ',' + fmt17(ra.gamma_of_mode(i)) + ',' +
                       (ds.macroscopic[i] ? "1" : "0") + '\n';
            emit("ring-" + std::to_string(k) + ".csv", csv);
            json entry = {{"gamma", g}};
            if (ra.k_c) entry["k_c"] = *ra.k_c;
            if (ra.gamma_macroscopic) entry["gamma_macroscopic_analytic"] = *ra.gamma_macroscopic;
            entry["gamma_max_exact"] = ds.gamma.maxCoeff();
            per_gamma.push_back(entry);
        }
        manifest["ring"] = per_gamma;
        manifest["gammas"] = cfg.gammas;
    } else if (cfg.experiment == "eigenmode-correlations") {
        if (cfg.gammas.empty() || cfg.times.empty())
            throw ConfigError("config: eigenmode-correlations needs gammas and times");
        const double g = cfg.gammas.front();
        const BathSpec bath = cfg.bath(g);
        const double jeff = cfg.jeff ? *cfg.jeff : default_jeff(es);
        const DynamicalSpectrum ds = exact_dynamical_spectrum(dynamical_matrix(es, g), es, g);
        const TrajectoryRecord traj = sample_trajectory(
            ds, bath, GaussianState::vacuum(es.n_modes()), cfg.times, model.label);
        for (std::size_t k = 0; k < cfg.times.size(); ++k) {
            const GaussianState formula =
                intermediate_correlations(es, bath, jeff, cfg.times[k]);
            emit("bb-" + std::to_string(k) + ".csv", correlator_csv(traj.states[k], formula));
        }
        manifest["gammas"] = {g};
        manifest["times"] = cfg.times;
        manifest["jeff"] = jeff;
        manifest["basis"] = "eigenmode";
    } else if (cfg.experiment == "lightcone") {
        if (cfg.gammas.empty() || cfg.times.empty())
            throw ConfigError("config: lightcone needs gammas and times");
        const double g = cfg.gammas.front();
        const BathSpec bath = cfg.bath(g);
        const DynamicalSpectrum ds = exact_dynamical_spectrum(dynamical_matrix(es, g), es, g);
        const double speed = 2.0 * model.hop_scale;
        const TrajectoryRecord traj = sample_trajectory(
            ds, bath, GaussianState::vacuum(es.n_modes()), cfg.times, model.label);
        std::string summary = "t,inside_max,outside_max,front_position\n";
        for (std::size_t k = 0; k < cfg.times.size(); ++k) {
            const double t = cfg.times[k];
            const GaussianState site = to_site_basis(traj.states[k], es);
            emit("sites-" + std::to_string(k) + ".csv", site_csv(site));
            const LightConeProfile prof = light_cone_profile(site, model, speed, t);
            summary += fmt17(t) + ',' + fmt17(prof.inside_max) + ',' + fmt17(prof.outside_max) +
                       ',' + fmt17(prof.front_position) + '\n';
        }
        emit("lightcone.csv", summary);
        manifest["gammas"] = {g};
        manifest["times"] = cfg.times;
        manifest["speed"] = speed;
        manifest["basis"] = "site";
    }

    const auto t1 = std::chrono::steady_clock::now();
    manifest["outputs"] = outputs;
    manifest["wall_time_s"] = std::chrono::duration<double>(t1 - t0).count();
    const std::filesystem::path mpath = dir / "manifest.json";
    write_text(mpath, manifest.dump(2) + "\n");
    return {dir, mpath};
}

} // namespace latdiss
