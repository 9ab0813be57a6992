#include "khs/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace khs {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return d;
    } catch (...) {
        throw std::invalid_argument("config: value of '" + key + "' is not a number: " + v);
    }
}

int parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const int d = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return d;
    } catch (...) {
        throw std::invalid_argument("config: value of '" + key + "' is not an integer: " + v);
    }
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument("config: value of '" + key + "' is not a boolean: " + v);
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
    return out;
}

void apply_preset(ExperimentConfig& c) {
    if (c.experiment == "fig1") {
        c.solver = "exact";
        c.dt = 0.02;
        c.t_final = 10.0;
        c.emit_snapshots = true;
        c.snapshot_times = {0.0, 2.4, 5.7, 8.8};
    } else if (c.experiment == "fig2") {
        c.solver = "exact";
        c.dt = 250.0;      // sample spacing of the relaxation series
        c.t_final = 5e5;   // covers the purity decay to ~0.52
    } else if (c.experiment == "stationarity") {
        c.alpha = {0.0, 0.0, 0.0};
        c.solver = "exact";
        c.dt = 0.02;
        c.t_final = 10.0;
    } else if (c.experiment == "convergence") {
        c.solver = "rk4";
        c.dt = 1e-3;
        c.t_final = 1.0;
    } else if (c.experiment != "custom") {
        throw std::invalid_argument("config: unknown experiment '" + c.experiment + "'");
    }
}

}  // namespace

void ExperimentConfig::finalize() {
    if (!(beta > 0.0)) throw std::invalid_argument("config: beta must be positive");
    if (!(m > 0.0) || !(omega > 0.0) || !(hbar > 0.0))
        throw std::invalid_argument("config: m, omega, hbar must be positive");
    if (lq <= 0.0) lq = 20.0 / std::sqrt(beta);
    if (lp <= 0.0) lp = 20.0 / std::sqrt(beta);
    if (sample_every < 1) throw std::invalid_argument("config: sample_every must be >= 1");
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (!(t_final > 0.0)) throw std::invalid_argument("config: t_final must be positive");
    if (solver != "exact" && solver != "characteristics" && solver != "rk4" &&
        solver != "branch")
        throw std::invalid_argument("config: unknown solver '" + solver + "'");
    if (gauge != "harmonic" && gauge != "liouville")
        throw std::invalid_argument("config: unknown gauge '" + gauge + "'");
}

ExperimentConfig parse_config(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                        " is not key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (kv.count(key))
            throw std::invalid_argument("config: duplicate key '" + key + "'");
        kv[key] = val;
    }
    if (!kv.count("experiment"))
        throw std::invalid_argument("config: missing required key 'experiment'");

    static const char* known[] = {"experiment", "m",     "omega",        "alpha",
                                  "beta",       "hbar",  "nq",           "np",
                                  "lq",         "lp",    "gauge",        "solver",
                                  "dt",         "t_final", "sample_every", "output_dir",
                                  "emit_snapshots", "snapshot_times", "seed"};
    for (const auto& [k, v] : kv) {
        bool ok = false;
        for (const char* kk : known)
            if (k == kk) ok = true;
        if (!ok) throw std::invalid_argument("config: unknown key '" + k + "'");
    }

    ExperimentConfig c;
    c.experiment = kv.at("experiment");
    apply_preset(c);

    auto get = [&](const char* k) -> const std::string* {
        auto it = kv.find(k);
        return it == kv.end() ? nullptr : &it->second;
    };
    if (auto* v = get("m")) c.m = parse_double("m", *v);
    if (auto* v = get("omega")) c.omega = parse_double("omega", *v);
    if (auto* v = get("alpha")) {
        const auto lst = parse_list("alpha", *v);
        if (lst.size() != 3)
            throw std::invalid_argument("config: alpha needs three components");
        c.alpha = {lst[0], lst[1], lst[2]};
    }
    if (auto* v = get("beta")) c.beta = parse_double("beta", *v);
    if (auto* v = get("hbar")) c.hbar = parse_double("hbar", *v);
    if (auto* v = get("nq")) c.nq = parse_int("nq", *v);
    if (auto* v = get("np")) c.np = parse_int("np", *v);
    if (auto* v = get("lq")) c.lq = parse_double("lq", *v);
    if (auto* v = get("lp")) c.lp = parse_double("lp", *v);
    if (auto* v = get("gauge")) c.gauge = *v;
    if (auto* v = get("solver")) c.solver = *v;
    if (auto* v = get("dt")) {
        c.dt = parse_double("dt", *v);
        if (!(c.dt > 0.0)) throw std::invalid_argument("dt must be positive");
    }
    if (auto* v = get("t_final")) c.t_final = parse_double("t_final", *v);
    if (auto* v = get("sample_every")) c.sample_every = parse_int("sample_every", *v);
    if (auto* v = get("output_dir")) c.output_dir = *v;
    if (auto* v = get("emit_snapshots")) c.emit_snapshots = parse_bool("emit_snapshots", *v);
    if (auto* v = get("snapshot_times")) c.snapshot_times = parse_list("snapshot_times", *v);
    if (auto* v = get("seed")) c.seed = static_cast<std::uint64_t>(parse_int("seed", *v));

    c.finalize();
    return c;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
    return parse_config(in);
}

std::string canonical_dump(const ExperimentConfig& c) {
    char buf[64];
    std::ostringstream os;
    auto num = [&](double d) {
        std::snprintf(buf, sizeof buf, "%.17g", d);
        return std::string(buf);
    };
    os << "alpha=" << num(c.alpha[0]) << ',' << num(c.alpha[1]) << ',' << num(c.alpha[2])
       << "\nbeta=" << num(c.beta) << "\ndt=" << num(c.dt)
       << "\nemit_snapshots=" << (c.emit_snapshots ? "true" : "false")
       << "\nexperiment=" << c.experiment << "\ngauge=" << c.gauge
       << "\nhbar=" << num(c.hbar) << "\nlp=" << num(c.lp) << "\nlq=" << num(c.lq)
       << "\nm=" << num(c.m) << "\nnp=" << c.np << "\nnq=" << c.nq
       << "\nomega=" << num(c.omega) << "\nsample_every=" << c.sample_every
       << "\nseed=" << c.seed << "\nsnapshot_times=";
    for (std::size_t i = 0; i < c.snapshot_times.size(); ++i)
        os << (i ? "," : "") << num(c.snapshot_times[i]);
    os << "\nsolver=" << c.solver << "\nt_final=" << num(c.t_final) << "\n";
    return os.str();
}

std::uint64_t config_hash(const ExperimentConfig& c) {
    const std::string s = canonical_dump(c);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace khs
