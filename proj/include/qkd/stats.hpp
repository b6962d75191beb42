#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qkd/experiment.hpp"

namespace qkd {

// Replicate failures and degenerate geometry surface as AnalysisError rather
// than invalid_argument; the CLI maps them to their own exit code.
struct AnalysisError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Ordinary least-squares quadratic F(theta) = c0 + c1 theta + c2 theta^2.
struct QuadraticFit {
    std::array<double, 3> coeffs{};
    std::array<std::array<double, 3>, 3> cov{};
    int n = 0;
    double rss = 0.0;

    double eval(double theta) const {
        return coeffs[0] + theta * (coeffs[1] + theta * coeffs[2]);
    }
};

// Crossover of the two fitted fidelity curves.
struct IntersectionEstimate {
    double theta_star;
    double fid_star;
    double qber_star; // always exactly 1 - fid_star
};

// Mean plus two-sided percentile confidence bounds over replicates.
struct IntervalEstimate {
    double mean;
    double lo;
    double hi;
    double level = 0.95;
    int n_reps = 0;
    int n_failures = 0;
};

// Successful replicate draws of the crossover, one entry per replicate.
struct ReplicateSet {
    std::vector<double> theta;
    std::vector<double> qber;
    int n_failures = 0;
};

// OLS with covariance sigma^2 (X^T X)^{-1}, sigma^2 = rss / (n - 3).
// Requires >= 3 points at >= 3 distinct thetas.
QuadraticFit fit_quadratic(std::span<const std::pair<double, double>> points);

// Root of (fit_a - fit_b)(theta) = 0 inside [domain_lo, domain_hi] where the
// difference crosses from negative to positive (Eve-advantage to
// Bob-advantage). When both roots qualify, the smaller theta is returned.
// Throws AnalysisError when no valid crossover exists.
IntersectionEstimate intersect(const QuadraticFit& fit_a, const QuadraticFit& fit_b,
                               double domain_lo = 0.0,
                               double domain_hi = 0.78539816339744830961);

// Percentile interval (linear interpolation between order statistics).
IntervalEstimate percentile_interval(std::span<const double> values, double level = 0.95,
                                     int n_failures = 0);

// Coefficient-perturbation replicates: each of the six coefficients is drawn
// from a normal with the fitted mean and the square root of the matching
// covariance diagonal as standard deviation. Replicate r uses the stream
// derived from (seed, r).
ReplicateSet monte_carlo_replicates(const QuadraticFit& fit_a, const QuadraticFit& fit_b,
                                    int reps, std::uint64_t seed);

// Paired bootstrap: one index draw with replacement is applied to both
// fidelity series before refitting. `paired = false` draws independent
// indices for the two curves.
ReplicateSet bootstrap_replicates(std::span<const ExperimentRecord> records, int reps,
                                  std::uint64_t seed, bool paired = true);

// Interval summaries of the replicate sets. Throw AnalysisError when more
// than half of the replicates failed.
std::pair<IntervalEstimate, IntervalEstimate> monte_carlo_ci(const QuadraticFit& fit_a,
                                                             const QuadraticFit& fit_b,
                                                             int reps, std::uint64_t seed);
std::pair<IntervalEstimate, IntervalEstimate> bootstrap_ci(std::span<const ExperimentRecord> records,
                                                           int reps, std::uint64_t seed,
                                                           bool paired = true);

// Per-replicate unweighted mean of the four states' crossover QBERs (each
// BB84 state occupies a quarter of a long sifted key), summarized as a
// percentile interval. Arrays must have equal lengths.
IntervalEstimate aggregate_cumulative(const std::array<std::vector<double>, 4>& per_state);

} // namespace qkd
