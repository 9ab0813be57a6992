#include "khs/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include "khs/exact.hpp"
#include "khs/meanfield.hpp"
#include "khs/snapshot.hpp"
#include "khs/svg.hpp"
#include "khs/version.hpp"

namespace khs {

namespace {
constexpr double kPi = std::numbers::pi;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.14e", v);
    return buf;
}

ExactModelParams params_from(const ExperimentConfig& cfg) {
    ExactModelParams pr;
    pr.m = cfg.m;
    pr.omega = cfg.omega;
    pr.alpha = cfg.alpha;
    pr.beta = cfg.beta;
    pr.hbar = cfg.hbar;
    pr.validate();
    return pr;
}

struct RhoScan {
    double min = 0.0;
    double integral = 0.0;
};

template <class DensityFn>
RhoScan scan_density(const PhaseSpaceGrid& g, DensityFn&& rho) {
    std::vector<double> vals(g.size());
    for (int i = 0; i < g.nq; ++i) {
        const double q = g.q(i);
        for (int j = 0; j < g.np; ++j) vals[g.idx(i, j)] = rho(q, g.p(j));
    }
    RhoScan out;
    out.min = vals[0];
    for (double v : vals) out.min = std::min(out.min, v);
    out.integral = pairwise_sum(vals.data(), vals.size()) * g.cell_area();
    return out;
}

void warn_boundary(const ScalarField& f, std::ostream* log) {
    if (!log) return;
    const double ring = boundary_ring_max(f);
    const double peak = max_abs(f);
    if (ring > 1e-10 * peak)
        *log << "warning: field magnitude on the boundary ring is " << ring / peak
             << " of the peak; spectral accuracy assumes decayed tails\n";
}

struct BreachGuard {
    double norm0 = -1.0;
    double energy0 = 0.0;
    std::string message;

    bool check(double t, double norm, double energy, double rho_psd_min) {
        if (norm0 < 0.0) {
            norm0 = norm;
            energy0 = energy;
        }
        std::ostringstream os;
        if (std::abs(norm - norm0) > 1e-4) {
            os << "invariant breach: norm drifted to " << norm << " at t=" << t;
        } else if (std::abs(energy - energy0) > 1e-2 * std::max(1e-12, std::abs(energy0))) {
            os << "invariant breach: energy drifted from " << energy0 << " to " << energy
               << " at t=" << t;
        } else if (rho_psd_min < -1e-6) {
            os << "invariant breach: quantum density eigenvalue " << rho_psd_min
               << " at t=" << t;
        } else {
            return true;
        }
        message = os.str();
        return false;
    }
};

int run_fig1_like(const ExperimentConfig& cfg, bool stationarity, bool quiet,
                  std::ostream* log) {
    const auto pr = params_from(cfg);
    if (cfg.gauge != "harmonic")
        throw std::invalid_argument("exact solver runs in the harmonic gauge");
    const auto g = make_grid(cfg.nq, cfg.np, cfg.lq, cfg.lp);
    ExactThermalObservables obs(pr, 512);
    const auto& sol = obs.solution();
    const std::filesystem::path dir(cfg.output_dir);
    std::filesystem::create_directories(dir);

    {
        // the thermal amplitude has 1/s tails; surface the decay warning once
        HybridField probe = sol.sample(g, 0.0);
        warn_boundary(probe.comp[0], log);
    }

    const double dt_sample = cfg.dt * cfg.sample_every;
    const int nrows = static_cast<int>(std::floor(cfg.t_final / dt_sample + 1e-9)) + 1;
    std::vector<ObservableRow> rows;
    std::vector<double> dev_l2, dev_linf;
    BreachGuard guard;
    HybridField y0 = sol.sample(g, 0.0);

    for (int k = 0; k < nrows; ++k) {
        ObservableRow r;
        r.t = k * dt_sample;
        r.norm = std::sqrt(obs.norm_squared(r.t));
        r.energy = obs.energy(r.t);
        const DensityMatrix rho = obs.quantum_density(r.t);
        r.purity = purity(rho);
        const auto n = bloch_vector(rho);
        r.n_x = n[0];
        r.n_y = n[1];
        r.n_z = n[2];
        const auto scan = scan_density(
            g, [&](double q, double p) { return sol.classical_density(q, p, r.t); });
        r.rho_min = scan.min;
        r.rho_integral = scan.integral;
        rows.push_back(r);
        if (!guard.check(r.t, r.norm, r.energy, rho.min_eigenvalue())) break;

        if (stationarity) {
            const HybridField yt = sol.sample(g, r.t);
            dev_l2.push_back(l2_distance(yt, y0));
            double linf = 0.0;
            for (int c = 0; c < 2; ++c) linf = std::max(linf, max_abs_diff(yt.comp[c], y0.comp[c]));
            dev_linf.push_back(linf);
        }
    }

    emit_observables(rows, (dir / "observables.csv").string(), provenance_line(cfg));

    if (stationarity) {
        std::ofstream out(dir / "stationarity.csv");
        out << "# " << provenance_line(cfg) << "\n";
        out << "t,deviation_l2,deviation_linf\n";
        for (std::size_t k = 0; k < dev_l2.size(); ++k)
            out << fmt(rows[k].t) << ',' << fmt(dev_l2[k]) << ',' << fmt(dev_linf[k]) << "\n";
        const double worst = *std::max_element(dev_l2.begin(), dev_l2.end());
        if (worst > 1e-6) {
            if (log) *log << "stationarity violated: max deviation " << worst << "\n";
            return 2;
        }
    }

    if (cfg.emit_snapshots) {
        for (std::size_t s = 0; s < cfg.snapshot_times.size(); ++s) {
            const double t = cfg.snapshot_times[s];
            const HybridField yt = sol.sample(g, t);
            char name[64];
            std::snprintf(name, sizeof name, "snapshot_%03zu", s);
            write_snapshot((dir / name).string(), yt, t);
            ScalarField rho(g);
            for (int i = 0; i < g.nq; ++i)
                for (int j = 0; j < g.np; ++j)
                    rho.v[g.idx(i, j)] = sol.classical_density(g.q(i), g.p(j), t);
            char title[64];
            std::snprintf(title, sizeof title, "classical density, t = %.3f", t);
            write_heatmap_svg((dir / (std::string(name) + "_rho.svg")).string(), rho, title);
        }
    }

    std::vector<double> ts, ny, nz, pur;
    for (const auto& r : rows) {
        ts.push_back(r.t);
        ny.push_back(r.n_y);
        nz.push_back(r.n_z);
        pur.push_back(r.purity);
    }
    write_trajectory_svg((dir / "bloch_yz.svg").string(), ny, nz, "bloch vector (n_y, n_z)");
    write_series_svg((dir / "purity.svg").string(), ts, pur, "purity vs time");

    if (!guard.message.empty()) {
        if (log) *log << guard.message << "\n";
        return 2;
    }
    if (!quiet && log)
        *log << "wrote " << rows.size() << " rows to " << (dir / "observables.csv").string()
             << "\n";
    return 0;
}

int run_fig2(const ExperimentConfig& cfg, bool quiet, std::ostream* log) {
    const auto pr = params_from(cfg);
    const auto g = make_grid(cfg.nq, cfg.np, cfg.lq, cfg.lp);
    const auto ag = AgExactSolution::thermal(pr);
    const std::filesystem::path dir(cfg.output_dir);
    std::filesystem::create_directories(dir);

    const double dt_sample = cfg.dt * cfg.sample_every;
    const int nrows = static_cast<int>(std::floor(cfg.t_final / dt_sample + 1e-9)) + 1;
    std::vector<ObservableRow> rows;
    BreachGuard guard;
    for (int k = 0; k < nrows; ++k) {
        ObservableRow r;
        r.t = k * dt_sample;
        const DensityMatrix rho = ag.quantum_marginal(r.t);
        r.norm = std::sqrt(rho.rho.trace().real());
        r.energy = ag.total_energy(r.t);
        r.purity = purity(rho);
        const auto n = bloch_vector(rho);
        r.n_x = n[0];
        r.n_y = n[1];
        r.n_z = n[2];
        const auto scan = scan_density(
            g, [&](double q, double p) { return ag.classical_density(q, p, r.t); });
        r.rho_min = scan.min;
        r.rho_integral = scan.integral;
        rows.push_back(r);
        // the comparison marginal may lose purity but must stay PSD-safe
        if (!guard.check(r.t, r.norm, r.energy, rho.min_eigenvalue())) break;
    }
    emit_observables(rows, (dir / "observables.csv").string(), provenance_line(cfg));

    std::vector<double> ts, ny, nz, pur;
    for (const auto& r : rows) {
        ts.push_back(r.t);
        ny.push_back(r.n_y);
        nz.push_back(r.n_z);
        pur.push_back(r.purity);
    }
    write_trajectory_svg((dir / "bloch_yz.svg").string(), ny, nz, "bloch vector (n_y, n_z)");
    write_series_svg((dir / "purity.svg").string(), ts, pur, "purity vs time");
    if (!guard.message.empty()) {
        if (log) *log << guard.message << "\n";
        return 2;
    }
    if (!quiet && log)
        *log << "wrote " << rows.size() << " rows to " << (dir / "observables.csv").string()
             << "\n";
    return 0;
}

HybridExactSolution convergence_reference(const ExactModelParams& pr) {
    const double sd = 1.0 / std::sqrt(pr.beta);
    std::array<ClosedFormField, 2> branch{
        scaled_gaussian(pr.m, pr.lambda() > 0 ? pr.omega_plus() : pr.omega, 25 * sd, 0.0,
                        1.5 * sd),
        scaled_gaussian(pr.m, pr.lambda() > 0 ? pr.omega_minus() : pr.omega, -18 * sd,
                        10 * sd, 1.5 * sd)};
    return HybridExactSolution::from_branch_data(pr, branch);
}

int run_convergence(const ExperimentConfig& cfg, bool quiet, std::ostream* log) {
    const auto pr = params_from(cfg);
    // domain sized to hold the displaced branch packets for all time
    const double l = 56.0 / std::sqrt(pr.beta);
    const auto g = make_grid(cfg.nq, cfg.np, l, l);
    SpectralWorkspace ws(g);
    const auto gauge = GaugePotential::from_name(cfg.gauge);
    const auto hh =
        HybridHamiltonian::spin_oscillator(pr.m, pr.omega, pr.alpha, half_q_squared());
    const auto sol = convergence_reference(pr);
    HybridField y0 = sol.sample(g, 0.0);
    const HybridField ref = sol.sample(g, cfg.t_final);
    const double nrm = ref.norm();

    const std::filesystem::path dir(cfg.output_dir);
    std::filesystem::create_directories(dir);
    std::ofstream out(dir / "convergence.csv");
    out << "# " << provenance_line(cfg) << "\n";
    out << "dt,l2_error\n";
    HybridOperator op(hh, gauge, ws, pr.hbar);
    std::vector<double> errs;
    for (const double dt : {2.0 * cfg.dt, cfg.dt}) {
        HybridField y = y0;
        const int steps = static_cast<int>(std::round(cfg.t_final / dt));
        for (int s = 0; s < steps; ++s) y = step_rk4_hybrid(op, y, dt);
        errs.push_back(l2_distance(y, ref) / nrm);
        out << fmt(dt) << ',' << fmt(errs.back()) << "\n";
    }
    out << "# halving ratio = " << fmt(errs[0] / errs[1]) << "\n";
    if (!quiet && log)
        *log << "convergence: err(" << 2 * cfg.dt << ") = " << errs[0] << ", err(" << cfg.dt
             << ") = " << errs[1] << ", ratio = " << errs[0] / errs[1] << "\n";
    return 0;
}

int run_custom(const ExperimentConfig& cfg, bool quiet, std::ostream* log) {
    const auto pr = params_from(cfg);
    const auto g = make_grid(cfg.nq, cfg.np, cfg.lq, cfg.lp);
    SpectralWorkspace ws(g);
    const auto gauge = GaugePotential::from_name(cfg.gauge);
    const auto hh =
        HybridHamiltonian::spin_oscillator(pr.m, pr.omega, pr.alpha, half_q_squared());
    const std::filesystem::path dir(cfg.output_dir);
    std::filesystem::create_directories(dir);

    HybridField y = thermal_initial_state(pr, g);
    normalize(y);
    warn_boundary(y.comp[0], log);
    const HybridField y0 = y;

    const bool exact_path = (cfg.solver == "exact");
    const bool branch_path = (cfg.solver == "branch" || cfg.solver == "characteristics");
    if (cfg.solver == "characteristics" && pr.lambda() > 0.0)
        throw std::invalid_argument(
            "characteristics solver needs alpha = 0; use solver=branch for coupled runs");

    ExactThermalObservables obs(pr, 512);
    std::unique_ptr<HybridOperator> op;
    if (cfg.solver == "rk4") op = std::make_unique<HybridOperator>(hh, gauge, ws, pr.hbar);

    const double dt_sample = cfg.dt * cfg.sample_every;
    const int nrows = static_cast<int>(std::floor(cfg.t_final / dt_sample + 1e-9)) + 1;
    std::vector<ObservableRow> rows;
    BreachGuard guard;
    for (int k = 0; k < nrows; ++k) {
        const double t = k * dt_sample;
        if (k > 0) {
            if (exact_path) {
                // rescale the closed form exactly as the initial normalization did
                HybridField s = obs.solution().sample(g, t);
                const double s0 = 1.0 / obs.solution().sample(g, 0.0).norm();
                for (auto& c : s.comp) scale(c, s0);
                y = s;
            } else if (branch_path) {
                if (pr.lambda() > 0.0)
                    y = branch_propagate(hh, gauge, ws, y0, t, pr.hbar);
                else {
                    for (int c = 0; c < y.n; ++c)
                        y.comp[c] = propagate_characteristics(harmonic_term(pr.m, pr.omega),
                                                              gauge, y0.comp[c], t);
                }
            } else {
                for (int s = 0; s < cfg.sample_every; ++s) y = step_rk4_hybrid(*op, y, cfg.dt);
            }
        }
        ObservableRow r;
        r.t = t;
        r.norm = y.norm();
        r.energy = hybrid_expectation(hh, y, gauge, ws, pr.hbar);
        const DensityMatrix rho = quantum_density(y);
        r.purity = purity(rho);
        const auto n = bloch_vector(rho);
        r.n_x = n[0];
        r.n_y = n[1];
        r.n_z = n[2];
        const ScalarField cd = classical_density(y, gauge, ws, pr.hbar);
        double mn = cd.v[0].real();
        for (const auto& z : cd.v) mn = std::min(mn, z.real());
        r.rho_min = mn;
        r.rho_integral = integrate(cd).real();
        rows.push_back(r);
        if (!guard.check(r.t, r.norm, r.energy, rho.min_eigenvalue())) break;
    }
    emit_observables(rows, (dir / "observables.csv").string(), provenance_line(cfg));
    if (cfg.emit_snapshots) {
        for (std::size_t s = 0; s < cfg.snapshot_times.size(); ++s) {
            // custom runs snapshot the final state only when times are listed
            char name[64];
            std::snprintf(name, sizeof name, "snapshot_%03zu", s);
            write_snapshot((dir / name).string(), y, rows.back().t);
        }
    }
    if (!guard.message.empty()) {
        if (log) *log << guard.message << "\n";
        return 2;
    }
    if (!quiet && log)
        *log << "wrote " << rows.size() << " rows to " << (dir / "observables.csv").string()
             << "\n";
    return 0;
}

}  // namespace

std::string provenance_line(const ExperimentConfig& cfg) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "koopman-hybrid-sim v%s config-hash=%016llx", kVersion,
                  static_cast<unsigned long long>(config_hash(cfg)));
    return buf;
}

void emit_observables(const std::vector<ObservableRow>& series, const std::string& path,
                      const std::string& provenance) {
    if (series.empty()) throw std::invalid_argument("emit_observables: empty series");
    std::ofstream out(path, std::ios::binary);  // binary: LF endings everywhere
    if (!out) throw std::runtime_error("emit_observables: cannot open " + path);
    if (!provenance.empty()) out << "# " << provenance << "\n";
    out << "t,norm,energy,purity,n_x,n_y,n_z,rho_min,rho_integral\n";
    for (const auto& r : series) {
        out << fmt(r.t) << ',' << fmt(r.norm) << ',' << fmt(r.energy) << ',' << fmt(r.purity)
            << ',' << fmt(r.n_x) << ',' << fmt(r.n_y) << ',' << fmt(r.n_z) << ','
            << fmt(r.rho_min) << ',' << fmt(r.rho_integral) << "\n";
    }
}

std::vector<ObservableRow> parse_observables(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("parse_observables: cannot open " + path);
    std::vector<ObservableRow> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line[0] == 't') continue;
        ObservableRow r;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf", &r.t, &r.norm,
                        &r.energy, &r.purity, &r.n_x, &r.n_y, &r.n_z, &r.rho_min,
                        &r.rho_integral) != 9)
            throw std::runtime_error("parse_observables: malformed row: " + line);
        out.push_back(r);
    }
    return out;
}

int run_experiment(const ExperimentConfig& cfg, bool quiet, std::ostream* log) {
    if (!log) log = &std::cerr;
    if (cfg.experiment == "fig1") return run_fig1_like(cfg, false, quiet, log);
    if (cfg.experiment == "stationarity") return run_fig1_like(cfg, true, quiet, log);
    if (cfg.experiment == "fig2") return run_fig2(cfg, quiet, log);
    if (cfg.experiment == "convergence") return run_convergence(cfg, quiet, log);
    if (cfg.experiment == "custom") return run_custom(cfg, quiet, log);
    throw std::invalid_argument("run_experiment: unknown experiment " + cfg.experiment);
}

int verify_model(const ExperimentConfig& cfg, std::ostream& log) {
    const auto pr = params_from(cfg);
    const auto g = make_grid(std::min(cfg.nq, 128), std::min(cfg.np, 128), 1.0, 1.0);
    SpectralWorkspace ws(g);
    std::mt19937_64 rng(cfg.seed);
    int failures = 0;
    auto report = [&](const char* name, double value, double bound) {
        const bool ok = value <= bound;
        char buf[128];
        std::snprintf(buf, sizeof buf, "%-34s %.3e  (bound %.1e)  %s\n", name, value, bound,
                      ok ? "PASS" : "FAIL");
        log << buf;
        if (!ok) ++failures;
    };

    auto band = [&]() {
        ScalarField f(g);
        std::uniform_real_distribution<double> amp(-1.0, 1.0);
        std::uniform_int_distribution<int> mode(-3, 3);
        for (int t = 0; t < 6; ++t) {
            const double kq = mode(rng) * kPi / g.lq;
            const double kp = mode(rng) * kPi / g.lp;
            const cplx a{amp(rng), amp(rng)};
            for (int i = 0; i < g.nq; ++i)
                for (int j = 0; j < g.np; ++j)
                    f.v[g.idx(i, j)] += a * std::exp(cplx{0.0, kq * g.q(i) + kp * g.p(j)});
        }
        for (int i = 0; i < g.nq; ++i)
            for (int j = 0; j < g.np; ++j) {
                const double q = g.q(i) / (0.11 * g.lq), p = g.p(j) / (0.11 * g.lp);
                f.v[g.idx(i, j)] *= std::exp(-0.5 * (q * q + p * p));
            }
        return f;
    };

    const auto gauge = GaugePotential::harmonic_oscillator();
    const double hbar = pr.hbar;

    {  // curl constraint on both built-in gauges
        double worst = 0.0;
        for (const auto& gp : {GaugePotential::liouville(), gauge})
            for (int i = 0; i < g.nq; i += 7)
                for (int j = 0; j < g.np; j += 7)
                    worst = std::max(worst, std::abs(gp.curl(g.q(i), g.p(j)) + 1.0));
        report("gauge curl constraint", worst, 1e-12);
    }
    {  // z commutators
        const auto psi = band();
        auto zq = [&](const ScalarField& f) { return apply_z_plus(f, gauge, ws, hbar).q_comp; };
        auto zp = [&](const ScalarField& f) { return apply_z_plus(f, gauge, ws, hbar).p_comp; };
        auto zmq = [&](const ScalarField& f) { return apply_z_minus(f, gauge, ws, hbar).q_comp; };
        const auto comm = sub(zq(zp(psi)), zp(zq(psi)));
        const double same =
            max_abs_diff(comm, scaled(psi, cplx{0.0, -hbar})) / std::max(1.0, max_abs(psi));
        const double cross =
            max_abs(sub(zp(zmq(psi)), zmq(zp(psi)))) / std::max(1.0, max_abs(psi));
        report("z same-sign commutator", same, 1e-10);
        report("z cross commutator", cross, 1e-10);
    }
    {  // covariant liouvillian forms + hermiticity
        const auto psi = band();
        const auto h = harmonic_term(pr.m, pr.omega);
        const auto a = apply_covariant_liouvillian(h, gauge, ws, psi, hbar);
        const auto b = covariant_liouvillian_zform(h, gauge, ws, psi, hbar);
        report("liouvillian two-form agreement", max_abs_diff(a, b) / std::max(1.0, max_abs(a)),
               1e-10);
        const auto psi2 = band();
        const cplx lhs = inner_product(psi2, a);
        const cplx rhs = inner_product(apply_covariant_liouvillian(h, gauge, ws, psi2, hbar), psi);
        report("liouvillian hermiticity", std::abs(lhs - rhs), 1e-9);
    }
    {  // clebsch two-form
        const auto psi = band();
        const auto a = clebsch_density(psi, gauge, ws, hbar);
        const auto b = clebsch_density_divergence_form(psi, gauge, ws, hbar);
        report("density two-form agreement", max_abs_diff(a, b) / std::max(1.0, max_abs(a)),
               1e-10);
    }
    {  // hybrid density two-form
        HybridField y(g, 2);
        y.comp[0] = band();
        y.comp[1] = band();
        const auto a = hybrid_density(y, gauge, ws, hbar);
        const auto b = hybrid_density_divergence_form(y, gauge, ws, hbar);
        double worst = 0.0, scale_ = 1.0;
        for (int e = 0; e < 4; ++e) {
            worst = std::max(worst, max_abs_diff(a.entry[e], b.entry[e]));
            scale_ = std::max(scale_, max_abs(a.entry[e]));
        }
        report("hybrid density two-form", worst / scale_, 1e-10);
        report("hybrid density hermiticity", a.max_herm_deviation() / scale_, 1e-12);
    }
    {  // momentum map
        double worst = 0.0;
        for (int trial = 0; trial < 5; ++trial) {
            const auto psi = band();
            std::uniform_real_distribution<double> cf(-1.0, 1.0);
            std::vector<Monomial> mono;
            for (int a = 0; a <= 3; ++a)
                for (int b = 0; a + b <= 3; ++b) mono.push_back({a, b, cf(rng)});
            const auto h = polynomial_term(std::move(mono));
            const double lhs = kvh_energy(psi, h, gauge, ws, hbar);
            const double rhs = kvh_energy_inner(psi, h, gauge, ws, hbar).real();
            worst = std::max(worst, std::abs(lhs - rhs));
        }
        report("momentum map identity", worst, 1e-9);
    }
    if (pr.lambda() > 0.0 && pr.lambda() < pr.m * pr.omega * pr.omega) {
        // classical density agreement between the two exact solutions
        ExactThermalObservables obs(pr, 128);
        const auto ag = AgExactSolution::thermal(pr);
        const double sd = 1.0 / std::sqrt(pr.beta);
        double worst = 0.0;
        const double rho_max = pr.omega * pr.beta / (2 * kPi);
        for (double t : {0.0, 2.4, 8.8})
            for (double q : {0.5 * sd, -3 * sd})
                for (double p : {0.0, 2 * sd})
                    worst = std::max(worst, std::abs(obs.solution().classical_density(q, p, t) -
                                                     ag.classical_density(q, p, t)) /
                                                rho_max);
        report("classical density agreement", worst, 1e-6);
    }
    log << (failures == 0 ? "all checks passed\n" : "FAILURES present\n");
    return failures;
}

}  // namespace khs
