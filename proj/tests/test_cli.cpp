#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "khs/experiment.hpp"
#include "khs/snapshot.hpp"
#include "test_helpers.hpp"

using namespace khs;

namespace {
ExperimentConfig from_text(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::filesystem::path fresh_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}
}  // namespace

TEST_CASE("config: experiment presets and overrides") {
    const auto fig1 = from_text("experiment=fig1\n");
    CHECK(fig1.solver == "exact");
    CHECK(fig1.dt == doctest::Approx(0.02));
    CHECK(fig1.t_final == doctest::Approx(10.0));
    CHECK(fig1.snapshot_times.size() == 4);
    CHECK(fig1.snapshot_times[1] == doctest::Approx(2.4));
    CHECK(fig1.alpha[0] == doctest::Approx(0.95));
    CHECK(fig1.beta == doctest::Approx(1e5));
    CHECK(fig1.lq == doctest::Approx(20.0 / std::sqrt(1e5)));

    const auto fig2 = from_text("experiment=fig2\n");
    CHECK(fig2.t_final == doctest::Approx(5e5));

    const auto stat = from_text("experiment=stationarity\n");
    CHECK(stat.alpha[0] == 0.0);

    const auto custom = from_text("experiment=custom\nalpha=0.95,0,0\ndt=0.5\n# comment\n");
    CHECK(custom.dt == doctest::Approx(0.5));
    CHECK(custom.alpha[0] == doctest::Approx(0.95));
    CHECK(custom.alpha[2] == 0.0);
}

TEST_CASE("config: rejection paths") {
    CHECK_THROWS_WITH_AS(from_text("experiment=fig1\ndt=-1\n"),
                         doctest::Contains("dt must be positive"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(from_text("experiment=fig1\nfrobnicate=3\n"),
                         doctest::Contains("unknown key 'frobnicate'"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(from_text("dt=0.1\n"), doctest::Contains("experiment"),
                         std::invalid_argument);
    CHECK_THROWS(from_text("experiment=warpdrive\n"));
    CHECK_THROWS(from_text("experiment=fig1\nalpha=1,2\n"));
    CHECK_THROWS(from_text("experiment=fig1\nbeta=text\n"));
    CHECK_THROWS(from_text("experiment=fig1\ndt=0.1\ndt=0.2\n"));
    CHECK_THROWS(from_text("experiment=fig1\nsolver=leapfrog\n"));
}

TEST_CASE("observables csv: format and round trip") {
    const auto dir = fresh_dir("khs_csv_test");
    std::vector<ObservableRow> series(1);
    series[0].t = 0.25;
    series[0].norm = 1.0;
    series[0].energy = 1e-5;
    series[0].purity = 0.875;
    series[0].n_z = 0.5;
    series[0].rho_min = -1e-12;
    series[0].rho_integral = 1.0;
    const auto path = (dir / "single.csv").string();
    emit_observables(series, path);

    const std::string text = slurp(path);
    // two lines: header + row, LF endings, no trailing delimiter
    CHECK(std::count(text.begin(), text.end(), '\n') == 2);
    CHECK(text.find("t,norm,energy,purity,n_x,n_y,n_z,rho_min,rho_integral\n") == 0);
    CHECK(text.find("\r") == std::string::npos);
    CHECK(text.find(",\n") == std::string::npos);
    CHECK(text.find("2.50000000000000e-01") != std::string::npos);

    // parse and re-emit reproduces the bytes
    const auto parsed = parse_observables(path);
    REQUIRE(parsed.size() == 1);
    emit_observables(parsed, (dir / "roundtrip.csv").string());
    CHECK(slurp(dir / "roundtrip.csv") == text);

    CHECK_THROWS(emit_observables({}, (dir / "empty.csv").string()));
}

TEST_CASE("fig1 run: initial row facts and determinism") {
    const auto dir1 = fresh_dir("khs_fig1_a");
    const auto dir2 = fresh_dir("khs_fig1_b");
    auto cfg = from_text("experiment=fig1\nt_final=0.1\nsnapshot_times=0\n");
    cfg.output_dir = dir1.string();
    std::ostringstream sink;
    REQUIRE(run_experiment(cfg, true, &sink) == 0);
    cfg.output_dir = dir2.string();
    REQUIRE(run_experiment(cfg, true, &sink) == 0);

    // identical configuration gives byte-identical observables
    CHECK(slurp(dir1 / "observables.csv") == slurp(dir2 / "observables.csv"));

    const auto rows = parse_observables((dir1 / "observables.csv").string());
    REQUIRE(rows.size() >= 2);
    CHECK(rows[0].purity == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(rows[0].n_z == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(rows[0].rho_integral == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(rows[0].energy - 1e-5) < 1e-8);

    // provenance comment present
    const std::string text = slurp(dir1 / "observables.csv");
    CHECK(text.rfind("# koopman-hybrid-sim v", 0) == 0);
    CHECK(text.find("config-hash=") != std::string::npos);

    // snapshot pair exists and restores
    const auto snap = read_snapshot((dir1 / "snapshot_000").string());
    CHECK(snap.field.n == 2);
    CHECK(snap.time == 0.0);
    CHECK(snap.field.grid().nq == 256);
}

TEST_CASE("stationarity run exits cleanly with a bounded deviation column") {
    const auto dir = fresh_dir("khs_stat");
    auto cfg = from_text("experiment=stationarity\nt_final=0.2\n");
    cfg.output_dir = dir.string();
    std::ostringstream sink;
    CHECK(run_experiment(cfg, true, &sink) == 0);
    const std::string text = slurp(dir / "stationarity.csv");
    CHECK(text.find("deviation_l2") != std::string::npos);
    std::istringstream in(text);
    std::string line;
    double worst = 0.0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line[0] == 't') continue;
        double t, d2, di;
        REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf", &t, &d2, &di) == 3);
        worst = std::max(worst, d2);
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("snapshot io round trip") {
    const auto dir = fresh_dir("khs_snap");
    const auto g = make_grid(32, 16, 1.0, 2.0);
    HybridField y(g, 2);
    std::mt19937_64 rng(5);
    y.comp[0] = khs::test::random_band_limited(g, rng, 2);
    y.comp[1] = khs::test::random_band_limited(g, rng, 2);
    write_snapshot((dir / "state").string(), y, 1.25);
    const auto back = read_snapshot((dir / "state").string());
    CHECK(back.time == 1.25);
    CHECK(back.field.grid() == g);
    for (int c = 0; c < 2; ++c)
        for (std::size_t i = 0; i < g.size(); ++i)
            CHECK(back.field.comp[c].v[i] == y.comp[c].v[i]);
}

TEST_CASE("verify battery passes on the reference model") {
    auto cfg = from_text("experiment=fig1\n");
    std::ostringstream log;
    CHECK(verify_model(cfg, log) == 0);
    CHECK(log.str().find("FAIL") == std::string::npos);
    CHECK(log.str().find("momentum map identity") != std::string::npos);
}

TEST_CASE("custom run with the rk4 solver conserves its invariants") {
    const auto dir = fresh_dir("khs_custom");
    // gentle, fully resolved configuration: moderate beta keeps the cfl box
    // reasonable for a handful of steps
    auto cfg = from_text(
        "experiment=custom\nsolver=rk4\nbeta=1e5\nnq=128\nnp=128\n"
        "lq=0.025\nlp=0.025\ndt=5e-4\nt_final=5e-3\nsample_every=2\n");
    cfg.output_dir = dir.string();
    std::ostringstream sink;
    CHECK(run_experiment(cfg, true, &sink) == 0);
    const auto rows = parse_observables((dir / "observables.csv").string());
    REQUIRE(rows.size() >= 2);
    CHECK(rows[0].norm == doctest::Approx(1.0).epsilon(1e-12));
    for (const auto& r : rows) CHECK(std::abs(r.norm - 1.0) < 1e-8);
}
