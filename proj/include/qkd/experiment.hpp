#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "qkd/bb84.hpp"
#include "qkd/noise.hpp"

namespace qkd {

// Fidelity sweep configuration: per state, n_angles cloning angles are drawn
// uniformly from the closed interval [0, pi/4] and the cloner is run for
// `shots` shots each.
struct SweepConfig {
    std::vector<Bb84State> states{Bb84State::Plus, Bb84State::Minus,
                                  Bb84State::PlusI, Bb84State::MinusI};
    int n_angles = 100;
    int shots = 100;
    NoiseModel noise;
    std::uint64_t seed = 0;

    void validate() const;
};

// One sweep point. Fidelity estimates are shot fractions, so each is an
// exact multiple of 1/shots.
struct ExperimentRecord {
    std::string state_label;
    double theta;
    int shots;
    double fid_a; // Bob's clone
    double fid_b; // Eve's clone

    bool operator==(const ExperimentRecord&) const = default;
};

// Runs the full sweep. Records are emitted in (state, point) order and are
// fully reproducible from cfg.seed: every point owns an RNG stream derived
// from (seed, state index, point index).
std::vector<ExperimentRecord> run_sweep(const SweepConfig& cfg);

// CSV schema: state,theta,shots,fid_a,fid_b. Numbers serialized with 17
// significant digits so read(write(r)) == r exactly.
void write_csv(const std::filesystem::path& path, const std::vector<ExperimentRecord>& records);
std::vector<ExperimentRecord> read_csv(const std::filesystem::path& path);

// Parse failure with the offending 1-based line number.
struct CsvError : std::runtime_error {
    CsvError(int line, const std::string& message);
    int line;
};

} // namespace qkd
