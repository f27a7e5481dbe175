#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "latdiss/experiment.hpp"

using namespace latdiss;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kChainConfig =
    "# end-drain chain\n"
    "experiment = dissipation-spectrum\n"
    "kind = chain\n"
    "n = 25\n"
    "j = 1\n"
    "gammas = 0.5, 2, 4\n"
    "nbar = 1\n"
    "workers = 1\n";

fs::path temp_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("latdiss-test-" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("config parsing") {
    const ExperimentConfig cfg = parse_config_text(kChainConfig);
    CHECK(cfg.experiment == "dissipation-spectrum");
    CHECK(cfg.model.kind == "chain");
    CHECK(cfg.model.n == 25);
    REQUIRE(cfg.gammas.size() == 3);
    CHECK(cfg.gammas[1] == 2.0);
    CHECK_NOTHROW(cfg.validate());

    CHECK_THROWS_AS(parse_config_text("frobnicate = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("n = twenty\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("just a line\n"), ConfigError);

    ExperimentConfig bad = parse_config_text(kChainConfig);
    bad.experiment = "teleport";
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    // complex bath strength
    const ExperimentConfig cm = parse_config_text("experiment = lightcone\nm = 1.25-0.5i\n");
    REQUIRE(cm.m.has_value());
    CHECK(cm.m->real() == doctest::Approx(1.25));
    CHECK(cm.m->imag() == doctest::Approx(-0.5));

    // default bath is pure squeezing
    const ExperimentConfig cfg2 = parse_config_text("experiment = lightcone\nnbar = 1\n");
    CHECK(std::norm(cfg2.bath_m()) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("overrides and hashing") {
    ExperimentConfig cfg = parse_config_text(kChainConfig);
    const std::string h0 = config_hash(cfg);
    CHECK(h0.size() == 16);
    CHECK(config_hash(cfg) == h0);

    apply_override(cfg, "n=31");
    CHECK(cfg.model.n == 31);
    CHECK(config_hash(cfg) != h0);
    CHECK_THROWS_AS(apply_override(cfg, "nonsense"), ConfigError);

    // canonical text round-trips through the parser
    const ExperimentConfig back = parse_config_text(canonical_config_text(cfg));
    CHECK(canonical_config_text(back) == canonical_config_text(cfg));
}

TEST_CASE("gamma sweep rows and worker determinism") {
    const EigenSystem es = diagonalize_coupled(build_chain(8, 1.0));
    const std::vector<double> gammas{0.0, 0.5, 1.0, 2.0, 4.0, 8.0};
    const auto rows1 = sweep_gamma(es, gammas, 1);
    const auto rows4 = sweep_gamma(es, gammas, 4);
    REQUIRE(rows1.size() == gammas.size() * 8);
    REQUIRE(rows4.size() == rows1.size());
    for (std::size_t k = 0; k < rows1.size(); ++k) {
        CHECK(rows1[k].ok);
        CHECK(rows1[k].gamma == rows4[k].gamma);
        CHECK(rows1[k].mode == rows4[k].mode);
        CHECK(rows1[k].gamma_exact == rows4[k].gamma_exact);
        CHECK(rows1[k].gamma_approx == rows4[k].gamma_approx);
        CHECK(rows1[k].dnu == rows4[k].dnu);
    }
    // Gamma = 0 rows are exactly zero
    for (int i = 0; i < 8; ++i) {
        CHECK(rows1[i].gamma_exact == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(rows1[i].gamma_approx == 0.0);
    }
}

TEST_CASE("experiment run is reproducible") {
    ExperimentConfig cfg = parse_config_text(kChainConfig);
    const fs::path out = temp_dir("repro");
    cfg.output_dir = out.string();

    const RunResult r1 = run_experiment(cfg);
    CHECK(fs::exists(r1.manifest_path));
    const std::string csv0 = slurp(r1.run_dir / "spectrum-0.csv");
    CHECK(csv0.rfind("i,energy,spacing,drain_weight,remainder,gamma_exact,gamma_approx,dnu,regime",
                     0) == 0);

    const RunResult r2 = run_experiment(cfg);
    CHECK(r1.run_dir == r2.run_dir);
    for (int k = 0; k < 3; ++k) {
        const std::string name = "spectrum-" + std::to_string(k) + ".csv";
        CHECK(slurp(r1.run_dir / name) == slurp(r2.run_dir / name));
    }

    // the manifest's embedded config replays to identical bytes
    const auto manifest = nlohmann::json::parse(slurp(r1.manifest_path));
    ExperimentConfig replay = parse_config_text(manifest["config"].get<std::string>());
    replay.experiment = manifest["experiment"].get<std::string>();
    replay.output_dir = (out / "replay").string();
    const RunResult r3 = run_experiment(replay);
    for (int k = 0; k < 3; ++k) {
        const std::string name = "spectrum-" + std::to_string(k) + ".csv";
        CHECK(slurp(r1.run_dir / name) == slurp(r3.run_dir / name));
    }
    fs::remove_all(out);
}

TEST_CASE("lightcone and correlation experiments emit their datasets") {
    const fs::path out = temp_dir("cone");
    ExperimentConfig cfg;
    cfg.experiment = "lightcone";
    cfg.model.kind = "ring";
    cfg.model.n = 16;
    cfg.model.j = 1.0;
    cfg.model.flux = M_PI / 2;
    cfg.gammas = {1.0};
    cfg.times = {1.0, 3.0};
    cfg.output_dir = out.string();
    const RunResult r = run_experiment(cfg);
    CHECK(fs::exists(r.run_dir / "sites-0.csv"));
    CHECK(fs::exists(r.run_dir / "sites-1.csv"));
    CHECK(fs::exists(r.run_dir / "lightcone.csv"));

    cfg.experiment = "eigenmode-correlations";
    const RunResult r2 = run_experiment(cfg);
    CHECK(fs::exists(r2.run_dir / "bb-0.csv"));
    const auto manifest = nlohmann::json::parse(slurp(r2.manifest_path));
    CHECK(manifest.contains("jeff"));
    fs::remove_all(out);
}

TEST_CASE("invalid model spec is a config error") {
    ExperimentConfig cfg = parse_config_text(kChainConfig);
    cfg.model.kind = "moebius";
    const fs::path out = temp_dir("bad");
    cfg.output_dir = out.string();
    CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
    fs::remove_all(out);
}
