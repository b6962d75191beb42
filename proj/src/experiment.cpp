#include "qkd/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "qkd/cloner.hpp"

namespace qkd {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::uint64_t state_stream_index(Bb84State s) {
    return static_cast<std::uint64_t>(s);
}

std::string format_g17(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

} // namespace

void SweepConfig::validate() const {
    if (states.empty()) throw std::invalid_argument("SweepConfig: at least one state required");
    if (n_angles < 3) throw std::invalid_argument("SweepConfig: n_angles must be >= 3");
    if (shots < 1) throw std::invalid_argument("SweepConfig: shots must be >= 1");
    noise.validate();
}

std::vector<ExperimentRecord> run_sweep(const SweepConfig& cfg) {
    cfg.validate();
    std::vector<ExperimentRecord> records;
    records.reserve(cfg.states.size() * std::size_t(cfg.n_angles));

    for (Bb84State s : cfg.states) {
        const std::uint64_t sidx = state_stream_index(s);
        const Basis basis = state_basis(s);
        const int want_bit = state_bit(s);

        for (int i = 0; i < cfg.n_angles; ++i) {
            Rng angle_rng = Rng::derive(cfg.seed, {sidx, std::uint64_t(i), 0});
            const double theta = angle_rng.uniform() * (kPi / 4.0);

            Circuit circuit = prep_circuit(s, 0);
            // (pi/4, theta, theta) satisfies the zero condition for every
            // theta, so endpoint draws are valid circuit instances.
            const Circuit cloner = build_circuit(CloneAngles{kPi / 4.0, theta, theta});
            circuit.insert(circuit.end(), cloner.begin(), cloner.end());
            // Both clones are measured in the preparation basis in the same
            // shot; the two measurements commute.
            for (const CircuitOp& op : basis_rotation(basis, 0)) circuit.push_back(op);
            for (const CircuitOp& op : basis_rotation(basis, 1)) circuit.push_back(op);

            Rng shot_rng = Rng::derive(cfg.seed, {sidx, std::uint64_t(i), 1});
            std::int64_t match_a = 0, match_b = 0;

            if (cfg.noise.gates_noiseless()) {
                Statevector state(3);
                qkd::apply(state, circuit);
                for (int shot = 0; shot < cfg.shots; ++shot) {
                    std::string outcome = state.bitstring(state.sample_index(shot_rng));
                    outcome = flip_readout(outcome.substr(0, 2), cfg.noise.p_readout, shot_rng) +
                              outcome.substr(2);
                    match_a += ((outcome[0] == '0' ? 1 : 0) == want_bit);
                    match_b += ((outcome[1] == '0' ? 1 : 0) == want_bit);
                }
            } else {
                for (int shot = 0; shot < cfg.shots; ++shot) {
                    Statevector state(3);
                    apply_with_noise(state, circuit, cfg.noise, shot_rng);
                    std::string outcome = state.bitstring(state.sample_index(shot_rng));
                    outcome = flip_readout(outcome.substr(0, 2), cfg.noise.p_readout, shot_rng) +
                              outcome.substr(2);
                    match_a += ((outcome[0] == '0' ? 1 : 0) == want_bit);
                    match_b += ((outcome[1] == '0' ? 1 : 0) == want_bit);
                }
            }

            ExperimentRecord rec;
            rec.state_label = state_label(s);
            rec.theta = theta;
            rec.shots = cfg.shots;
            rec.fid_a = double(match_a) / double(cfg.shots);
            rec.fid_b = double(match_b) / double(cfg.shots);
            records.push_back(std::move(rec));
        }
    }
    return records;
}

CsvError::CsvError(int line_no, const std::string& message)
    : std::runtime_error("line " + std::to_string(line_no) + ": " + message), line(line_no) {}

void write_csv(const std::filesystem::path& path, const std::vector<ExperimentRecord>& records) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_csv: cannot open " + path.string());
    out << "state,theta,shots,fid_a,fid_b\n";
    for (const ExperimentRecord& r : records) {
        out << r.state_label << ',' << format_g17(r.theta) << ',' << r.shots << ','
            << format_g17(r.fid_a) << ',' << format_g17(r.fid_b) << '\n';
    }
    if (!out) throw std::runtime_error("write_csv: write failed for " + path.string());
}

std::vector<ExperimentRecord> read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_csv: cannot open " + path.string());

    std::string line;
    int line_no = 0;
    if (!std::getline(in, line)) throw CsvError(1, "missing header");
    ++line_no;
    if (line == "state,theta,shots,fid_a,fid_b\r") line.pop_back();
    if (line != "state,theta,shots,fid_a,fid_b") {
        throw CsvError(line_no, "unexpected header: " + line);
    }

    std::vector<ExperimentRecord> records;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        std::istringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 5) {
            throw CsvError(line_no, "expected 5 fields, got " + std::to_string(fields.size()));
        }

        ExperimentRecord r;
        r.state_label = fields[0];
        if (!state_from_label(r.state_label)) {
            throw CsvError(line_no, "unknown state label: " + r.state_label);
        }
        try {
            std::size_t pos = 0;
            r.theta = std::stod(fields[1], &pos);
            if (pos != fields[1].size()) throw std::invalid_argument("trailing characters");
            r.shots = std::stoi(fields[2], &pos);
            if (pos != fields[2].size()) throw std::invalid_argument("trailing characters");
            r.fid_a = std::stod(fields[3], &pos);
            if (pos != fields[3].size()) throw std::invalid_argument("trailing characters");
            r.fid_b = std::stod(fields[4], &pos);
            if (pos != fields[4].size()) throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
            throw CsvError(line_no, "malformed numeric field");
        }
        records.push_back(std::move(r));
    }
    return records;
}

} // namespace qkd
