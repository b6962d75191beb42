// qkdsim: command-line driver for the BB84 eavesdropping study.
//
// Subcommands:
//   theory    tabulate exact cloner fidelity/error/information curves
//   sweep     run the fidelity sweep experiment, write records as CSV
//   analyze   fit, intersect, and bootstrap/Monte-Carlo a sweep CSV
//   protocol  run BB84 rounds with an optional cloning eavesdropper
//   optimize  closed-form optimal clone coefficients for a given eta_A
//
// Exit codes: 0 ok, 1 usage, 2 data error, 3 analysis failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qkd/bb84.hpp"
#include "qkd/cloner.hpp"
#include "qkd/experiment.hpp"
#include "qkd/optimizer.hpp"
#include "qkd/stats.hpp"

using json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr double kPi = 3.14159265358979323846;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitAnalysis = 3;

std::uint64_t default_seed() {
    if (const char* env = std::getenv("QKD_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw CLI::ValidationError("QKD_SEED", "must be an unsigned integer");
        }
    }
    return 12345;
}

// Accepts plain radians or pi literals: "pi", "pi/8", "3*pi/8", "-pi/4".
double parse_angle(const std::string& text) {
    std::string s;
    for (char c : text) {
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    }
    if (s.empty()) throw std::invalid_argument("empty angle");

    const std::size_t pos = s.find("pi");
    if (pos == std::string::npos) {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument("trailing characters in angle");
        return v;
    }

    double coeff = 1.0;
    std::string head = s.substr(0, pos);
    if (!head.empty() && head.back() == '*') head.pop_back();
    if (head == "-") {
        coeff = -1.0;
    } else if (!head.empty()) {
        std::size_t used = 0;
        coeff = std::stod(head, &used);
        if (used != head.size()) throw std::invalid_argument("bad angle coefficient");
    }

    double divisor = 1.0;
    const std::string tail = s.substr(pos + 2);
    if (!tail.empty()) {
        if (tail[0] != '/') throw std::invalid_argument("expected '/' after pi");
        std::size_t used = 0;
        divisor = std::stod(tail.substr(1), &used);
        if (used != tail.size() - 1) throw std::invalid_argument("bad angle divisor");
        if (divisor == 0.0) throw std::invalid_argument("division by zero in angle");
    }
    return coeff * kPi / divisor;
}

double require_finite(double x, const char* what) {
    if (!std::isfinite(x)) {
        throw qkd::AnalysisError(std::string(what) + " is not finite");
    }
    return x;
}

std::string iso_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

// Every data output sits beside a manifest recording how it was produced.
struct Manifest {
    std::string command;
    json config;
    std::uint64_t seed = 0;
    std::string started;

    void write(const std::string& data_path) const {
        json m;
        m["schema_version"] = 1;
        m["tool"] = "qkdsim";
        m["version"] = kVersion;
        m["command"] = command;
        m["seed"] = seed;
        m["config"] = config;
        m["started"] = started;
        m["finished"] = iso_now();
        std::ofstream out(data_path + ".manifest.json");
        out << m.dump(2) << '\n';
    }
};

void write_text(const std::string& path, const std::string& body) {
    if (path == "-") {
        std::cout << body;
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << body;
}

json interval_json(const qkd::IntervalEstimate& e) {
    return json{{"mean", require_finite(e.mean, "interval mean")},
                {"lo", require_finite(e.lo, "interval lo")},
                {"hi", require_finite(e.hi, "interval hi")},
                {"level", e.level},
                {"n_reps", e.n_reps},
                {"n_failures", e.n_failures}};
}

json fit_json(const qkd::QuadraticFit& f) {
    json cov = json::array();
    for (const auto& row : f.cov) cov.push_back(row);
    return json{{"coeffs", f.coeffs}, {"cov", cov}, {"n", f.n}, {"rss", f.rss}};
}

struct NoiseFlags {
    double p1 = 0.0;
    double p2 = 0.0;
    double readout = 0.0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--noise-p1", p1, "Depolarizing probability per 1-qubit gate")
            ->check(CLI::Range(0.0, 1.0))->capture_default_str();
        cmd->add_option("--noise-p2", p2, "Depolarizing probability per 2-qubit gate")
            ->check(CLI::Range(0.0, 1.0))->capture_default_str();
        cmd->add_option("--noise-readout", readout, "Bit-flip probability per measured qubit")
            ->check(CLI::Range(0.0, 1.0))->capture_default_str();
    }

    qkd::NoiseModel model() const { return {p1, p2, readout}; }
};

// ---------------------------------------------------------------- theory --

int run_theory(int grid, const std::string& min_text, const std::string& max_text,
               const std::string& out) {
    const double lo = parse_angle(min_text);
    const double hi = parse_angle(max_text);
    if (grid < 2 || !(lo >= 0.0) || !(hi <= kPi / 4.0) || !(lo < hi)) {
        std::cerr << "error: bad theta grid spec\n";
        return kExitUsage;
    }
    std::string body = "theta,f_a,f_b,e_b,e_e,i_ab,i_ae,s\n";
    char line[256];
    for (int i = 0; i < grid; ++i) {
        // Pin the endpoint: the incremental form can overshoot hi by 1 ulp.
        const double theta = (i == grid - 1) ? hi : lo + (hi - lo) * double(i) / double(grid - 1);
        const qkd::TheoryPoint p = qkd::theory_curves(theta);
        const qkd::RateReport rate = qkd::rate_report(p.e_b);
        std::snprintf(line, sizeof(line),
                      "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      theta, 1.0 - p.e_b, 1.0 - p.e_e, p.e_b, p.e_e, p.i_ab, p.i_ae, rate.s);
        body += line;
    }
    write_text(out, body);
    return 0;
}

// ----------------------------------------------------------------- sweep --

int run_sweep_cmd(const std::vector<std::string>& state_names, int angles, int shots,
                  std::uint64_t seed, const NoiseFlags& noise, const std::string& out) {
    qkd::SweepConfig cfg;
    cfg.states.clear();
    for (const std::string& name : state_names) {
        const auto s = qkd::state_from_label(name);
        if (!s) {
            std::cerr << "error: unknown state '" << name
                      << "' (expected plus, minus, plus_i, minus_i)\n";
            return kExitUsage;
        }
        cfg.states.push_back(*s);
    }
    cfg.n_angles = angles;
    cfg.shots = shots;
    cfg.seed = seed;
    cfg.noise = noise.model();

    Manifest manifest;
    manifest.command = "sweep";
    manifest.seed = seed;
    manifest.started = iso_now();
    manifest.config = {{"states", state_names}, {"angles", angles}, {"shots", shots},
                       {"noise_p1", noise.p1}, {"noise_p2", noise.p2},
                       {"noise_readout", noise.readout}, {"out", out}};

    const auto records = qkd::run_sweep(cfg);
    qkd::write_csv(out, records);
    manifest.write(out);
    return 0;
}

// --------------------------------------------------------------- analyze --

int run_analyze(const std::string& csv_path, int reps, bool unpaired, std::uint64_t seed,
                const std::string& out, const std::string& plot_out, int plot_points) {
    std::vector<qkd::ExperimentRecord> records;
    try {
        records = qkd::read_csv(csv_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << csv_path << ": " << e.what() << '\n';
        return kExitData;
    }

    Manifest manifest;
    manifest.command = "analyze";
    manifest.seed = seed;
    manifest.started = iso_now();
    manifest.config = {{"input", csv_path}, {"reps", reps}, {"unpaired", unpaired},
                       {"out", out}, {"plot_out", plot_out}, {"plot_points", plot_points}};

    json report;
    report["schema_version"] = 1;
    report["seed"] = seed;
    report["reps"] = reps;
    report["paired"] = !unpaired;
    report["states"] = json::object();

    std::string plot_body = "state,theta,fit_a,fit_b\n";
    std::array<std::vector<double>, 4> qber_replicates;
    std::array<bool, 4> state_ok{false, false, false, false};
    int analyzed = 0;

    const std::array<qkd::Bb84State, 4> all_states = {
        qkd::Bb84State::Plus, qkd::Bb84State::Minus, qkd::Bb84State::PlusI, qkd::Bb84State::MinusI};

    for (int si = 0; si < 4; ++si) {
        const std::string label = qkd::state_label(all_states[si]);
        std::vector<qkd::ExperimentRecord> subset;
        for (const auto& r : records) {
            if (r.state_label == label) subset.push_back(r);
        }
        if (subset.empty()) continue;

        json& block = report["states"][label];
        block["n_records"] = subset.size();
        try {
            if (subset.size() < 4) {
                throw qkd::AnalysisError("need at least 4 records per state");
            }
            std::vector<std::pair<double, double>> pts_a, pts_b;
            for (const auto& r : subset) {
                pts_a.emplace_back(r.theta, r.fid_a);
                pts_b.emplace_back(r.theta, r.fid_b);
            }
            const qkd::QuadraticFit fit_a = qkd::fit_quadratic(pts_a);
            const qkd::QuadraticFit fit_b = qkd::fit_quadratic(pts_b);
            block["fit_a"] = fit_json(fit_a);
            block["fit_b"] = fit_json(fit_b);

            for (int i = 0; i < plot_points; ++i) {
                const double t = kPi / 4.0 * double(i) / double(plot_points - 1);
                char line[160];
                std::snprintf(line, sizeof(line), "%s,%.17g,%.17g,%.17g\n", label.c_str(), t,
                              fit_a.eval(t), fit_b.eval(t));
                plot_body += line;
            }

            try {
                const qkd::IntersectionEstimate pt = qkd::intersect(fit_a, fit_b);
                block["point_estimate"] = {{"theta_star", require_finite(pt.theta_star, "theta_star")},
                                           {"fid_star", pt.fid_star},
                                           {"qber_star", pt.qber_star}};
            } catch (const qkd::AnalysisError& e) {
                block["point_estimate"] = {{"error", e.what()}};
            }

            const auto [mc_theta, mc_qber] = qkd::monte_carlo_ci(fit_a, fit_b, reps, seed);
            block["monte_carlo"] = {{"theta", interval_json(mc_theta)},
                                    {"qber", interval_json(mc_qber)}};

            const auto boot = qkd::bootstrap_replicates(subset, reps, seed, !unpaired);
            if (2 * boot.n_failures > reps) {
                throw qkd::AnalysisError("more than half of the bootstrap replicates failed");
            }
            block["bootstrap"] = {
                {"theta", interval_json(qkd::percentile_interval(boot.theta, 0.95, boot.n_failures))},
                {"qber", interval_json(qkd::percentile_interval(boot.qber, 0.95, boot.n_failures))}};

            qber_replicates[si] = boot.qber;
            state_ok[si] = true;
            ++analyzed;
        } catch (const std::exception& e) {
            block["error"] = e.what();
        }
    }

    if (analyzed == 0) {
        std::cerr << "error: no state could be analyzed\n";
        return kExitAnalysis;
    }

    if (state_ok[0] && state_ok[1] && state_ok[2] && state_ok[3]) {
        // Replicates that failed to intersect were dropped per state, so the
        // arrays can differ in length; truncate to the shortest.
        std::size_t n = qber_replicates[0].size();
        for (const auto& v : qber_replicates) n = std::min(n, v.size());
        for (auto& v : qber_replicates) v.resize(n);
        report["cumulative"] = {{"qber", interval_json(qkd::aggregate_cumulative(qber_replicates))},
                                {"n_replicates_used", n}};
    } else {
        report["cumulative"] = {{"error", "cumulative aggregate requires all four states"}};
    }

    write_text(out, report.dump(2) + "\n");
    if (out != "-") manifest.write(out);
    write_text(plot_out, plot_body);
    return 0;
}

// -------------------------------------------------------------- protocol --

int run_protocol_cmd(std::int64_t rounds, const std::string& eve_theta_text,
                     const NoiseFlags& noise, std::uint64_t seed, const std::string& out,
                     bool include_bits) {
    std::optional<double> eve_theta;
    if (!eve_theta_text.empty()) {
        eve_theta = parse_angle(eve_theta_text);
        if (!(*eve_theta > 0.0 && *eve_theta < kPi / 4.0)) {
            std::cerr << "error: --eve-theta must lie in the open interval (0, pi/4)\n";
            return kExitUsage;
        }
    }

    const qkd::ProtocolResult result = qkd::run_protocol(rounds, eve_theta, noise.model(), seed);
    const qkd::RateReport rate = qkd::rate_report(std::min(result.e_b_hat, 0.5));

    json j;
    j["schema_version"] = 1;
    j["rounds"] = result.rounds;
    j["sifted_length"] = result.sifted_length;
    j["sift_rate"] = double(result.sifted_length) / double(result.rounds);
    j["e_b_hat"] = result.e_b_hat;
    j["e_e_hat"] = result.e_e_hat;
    if (eve_theta) j["eve_theta"] = *eve_theta;
    j["rate"] = {{"i_ab", require_finite(rate.i_ab, "i_ab")},
                 {"i_ae", require_finite(rate.i_ae, "i_ae")},
                 {"s_raw", rate.s},
                 {"s", std::max(rate.s, 0.0)},
                 {"insecure", rate.insecure}};
    if (include_bits) {
        j["alice_bits"] = result.alice_bits;
        j["bob_bits"] = result.bob_bits;
        j["eve_bits"] = result.eve_bits;
    }
    write_text(out, j.dump(2) + "\n");
    if (out != "-") {
        Manifest manifest;
        manifest.command = "protocol";
        manifest.seed = seed;
        manifest.started = iso_now();
        manifest.config = {{"rounds", rounds}, {"eve_theta", eve_theta_text},
                           {"noise_p1", noise.p1}, {"noise_p2", noise.p2},
                           {"noise_readout", noise.readout}, {"out", out}};
        manifest.write(out);
    }
    return 0;
}

// -------------------------------------------------------------- optimize --

int run_optimize(double eta_a, const std::string& out) {
    const qkd::LagrangeSolution sol = qkd::optimal_coefficients(eta_a);
    const auto residuals = qkd::lagrange_residuals(sol, eta_a);
    json j;
    j["schema_version"] = 1;
    j["eta_a"] = eta_a;
    j["eta_b"] = sol.eta_b;
    j["mu"] = sol.mu;
    j["nu"] = sol.nu;
    j["xi"] = sol.xi;
    j["lambda1"] = sol.lambda1;
    j["lambda2"] = sol.lambda2;
    j["residuals"] = residuals;
    write_text(out, j.dump(2) + "\n");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"BB84 eavesdropping simulator and analysis toolkit"};
    app.set_version_flag("--version", kVersion);
    app.set_config("--config", "", "Key-value config file; flags override config values");
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    try {
        seed = default_seed();
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    // theory
    auto* theory = app.add_subcommand("theory", "Tabulate exact theory curves as CSV");
    int grid = 100;
    std::string theta_min = "0", theta_max = "pi/4", theory_out = "-";
    theory->add_option("--grid", grid, "Number of grid points")->capture_default_str();
    theory->add_option("--theta-min", theta_min, "Grid start (radians or pi literal)")
        ->capture_default_str();
    theory->add_option("--theta-max", theta_max, "Grid end (radians or pi literal)")
        ->capture_default_str();
    theory->add_option("--out", theory_out, "Output CSV path, '-' for stdout")
        ->capture_default_str();

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Run the fidelity sweep experiment");
    std::vector<std::string> states = {"plus", "minus", "plus_i", "minus_i"};
    int angles = 100, shots = 100;
    std::string sweep_out = "experiment.csv";
    NoiseFlags sweep_noise;
    sweep->add_option("--states", states, "BB84 states to sweep")->capture_default_str();
    sweep->add_option("--angles", angles, "Cloning angles per state")->capture_default_str();
    sweep->add_option("--shots", shots, "Shots per angle")->capture_default_str();
    sweep->add_option("--seed", seed, "RNG seed (default from QKD_SEED if set)")
        ->capture_default_str();
    sweep_noise.attach(sweep);
    sweep->add_option("--out", sweep_out, "Output CSV path")->capture_default_str();

    // analyze
    auto* analyze = app.add_subcommand("analyze", "Fit and estimate crossover intervals");
    std::string analyze_in, analyze_out = "analysis.json", plot_out = "analysis_curves.csv";
    int reps = 10000, plot_points = 100;
    bool unpaired = false;
    analyze->add_option("csv", analyze_in, "Sweep CSV to analyze")->required();
    analyze->add_option("--reps", reps, "Monte-Carlo / bootstrap replicates")
        ->capture_default_str();
    analyze->add_flag("--unpaired", unpaired,
                      "Resample the two fidelity series with independent indices");
    analyze->add_option("--seed", seed, "RNG seed (default from QKD_SEED if set)")
        ->capture_default_str();
    analyze->add_option("--out", analyze_out, "JSON report path, '-' for stdout")
        ->capture_default_str();
    analyze->add_option("--plot-out", plot_out, "Fitted-curve sample CSV path")
        ->capture_default_str();
    analyze->add_option("--plot-points", plot_points, "Samples per fitted curve")
        ->check(CLI::Range(2, 100000))->capture_default_str();

    // protocol
    auto* protocol = app.add_subcommand("protocol", "Run BB84 rounds");
    std::int64_t rounds = 20000;
    std::string eve_theta_text, protocol_out = "-";
    bool include_bits = false;
    NoiseFlags protocol_noise;
    protocol->add_option("--rounds", rounds, "Protocol rounds")->capture_default_str();
    protocol->add_option("--eve-theta", eve_theta_text,
                         "Cloning angle of the eavesdropper (radians or pi literal); "
                         "omit for no attack");
    protocol_noise.attach(protocol);
    protocol->add_option("--seed", seed, "RNG seed (default from QKD_SEED if set)")
        ->capture_default_str();
    protocol->add_option("--out", protocol_out, "JSON output path, '-' for stdout")
        ->capture_default_str();
    protocol->add_flag("--include-bits", include_bits, "Embed the sifted bit arrays in the JSON");

    // optimize
    auto* optimize = app.add_subcommand("optimize", "Optimal clone coefficients for eta_A");
    double eta_a = 0.0;
    std::string optimize_out = "-";
    optimize->add_option("--eta-a", eta_a, "Bob-clone shrinking factor, in (0, 1)")->required();
    optimize->add_option("--out", optimize_out, "JSON output path, '-' for stdout")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitUsage;
    }

    try {
        if (*theory) return run_theory(grid, theta_min, theta_max, theory_out);
        if (*sweep) return run_sweep_cmd(states, angles, shots, seed, sweep_noise, sweep_out);
        if (*analyze)
            return run_analyze(analyze_in, reps, unpaired, seed, analyze_out, plot_out, plot_points);
        if (*protocol)
            return run_protocol_cmd(rounds, eve_theta_text, protocol_noise, seed, protocol_out,
                                    include_bits);
        if (*optimize) return run_optimize(eta_a, optimize_out);
    } catch (const qkd::CsvError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const qkd::AnalysisError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitAnalysis;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
    return 0;
}
