#include "qkd/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace qkd {

namespace {

using Mat3 = std::array<std::array<double, 3>, 3>;

// Gauss-Jordan inverse with partial pivoting. Throws on near-singular input.
Mat3 invert3(Mat3 a) {
    Mat3 inv{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 3; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        }
        if (std::abs(a[pivot][col]) < 1e-12) {
            throw AnalysisError("fit_quadratic: design matrix is rank deficient");
        }
        std::swap(a[col], a[pivot]);
        std::swap(inv[col], inv[pivot]);
        const double d = a[col][col];
        for (int c = 0; c < 3; ++c) {
            a[col][c] /= d;
            inv[col][c] /= d;
        }
        for (int r = 0; r < 3; ++r) {
            if (r == col) continue;
            const double f = a[r][col];
            for (int c = 0; c < 3; ++c) {
                a[r][c] -= f * a[col][c];
                inv[r][c] -= f * inv[col][c];
            }
        }
    }
    return inv;
}

bool valid_crossing(double root, double slope, double lo, double hi) {
    // Negative-to-positive crossing of F_A - F_B, inside the domain.
    return root >= lo && root <= hi && slope > 0.0;
}

} // namespace

QuadraticFit fit_quadratic(std::span<const std::pair<double, double>> points) {
    if (points.size() < 3) {
        throw std::invalid_argument("fit_quadratic: need at least 3 points");
    }
    std::vector<double> distinct;
    for (const auto& [t, f] : points) distinct.push_back(t);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 3) {
        throw AnalysisError("fit_quadratic: need at least 3 distinct thetas");
    }

    Mat3 xtx{};
    std::array<double, 3> xty{};
    for (const auto& [t, f] : points) {
        const double x[3] = {1.0, t, t * t};
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) xtx[i][j] += x[i] * x[j];
            xty[i] += x[i] * f;
        }
    }
    const Mat3 inv = invert3(xtx);

    QuadraticFit fit;
    fit.n = static_cast<int>(points.size());
    for (int i = 0; i < 3; ++i) {
        fit.coeffs[i] = inv[i][0] * xty[0] + inv[i][1] * xty[1] + inv[i][2] * xty[2];
    }
    for (const auto& [t, f] : points) {
        const double r = f - fit.eval(t);
        fit.rss += r * r;
    }
    const double sigma2 = fit.n > 3 ? fit.rss / double(fit.n - 3) : 0.0;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) fit.cov[i][j] = sigma2 * inv[i][j];
    }
    return fit;
}

IntersectionEstimate intersect(const QuadraticFit& fit_a, const QuadraticFit& fit_b,
                               double domain_lo, double domain_hi) {
    const double d0 = fit_a.coeffs[0] - fit_b.coeffs[0];
    const double d1 = fit_a.coeffs[1] - fit_b.coeffs[1];
    const double d2 = fit_a.coeffs[2] - fit_b.coeffs[2];

    std::vector<double> roots;
    constexpr double kDegenerate = 1e-14;
    if (std::abs(d2) < kDegenerate) {
        if (std::abs(d1) < kDegenerate) {
            throw AnalysisError("intersect: curves are identical or parallel, no isolated root");
        }
        roots.push_back(-d0 / d1);
    } else {
        const double disc = d1 * d1 - 4.0 * d2 * d0;
        if (disc < 0.0) {
            throw AnalysisError("intersect: no real intersection in domain");
        }
        const double sq = std::sqrt(disc);
        // Numerically stable pair of roots.
        const double q = -0.5 * (d1 + (d1 >= 0.0 ? sq : -sq));
        roots.push_back(q / d2);
        if (q != 0.0) roots.push_back(d0 / q);
        else roots.push_back(-d1 / d2 - roots[0]);
    }

    double best = std::numeric_limits<double>::quiet_NaN();
    for (double r : roots) {
        const double slope = d1 + 2.0 * d2 * r;
        if (!valid_crossing(r, slope, domain_lo, domain_hi)) continue;
        // Under noise both roots can qualify; keep the smaller theta.
        if (std::isnan(best) || r < best) best = r;
    }
    if (std::isnan(best)) {
        throw AnalysisError("intersect: no valid crossover in domain");
    }

    IntersectionEstimate est;
    est.theta_star = best;
    est.fid_star = fit_a.eval(best);
    est.qber_star = 1.0 - est.fid_star;
    return est;
}

IntervalEstimate percentile_interval(std::span<const double> values, double level, int n_failures) {
    if (values.empty()) {
        throw AnalysisError("percentile_interval: no replicates");
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());

    auto quantile = [&](double q) {
        const double h = q * double(sorted.size() - 1);
        const std::size_t i = static_cast<std::size_t>(std::floor(h));
        if (i + 1 >= sorted.size()) return sorted.back();
        const double frac = h - double(i);
        return sorted[i] + frac * (sorted[i + 1] - sorted[i]);
    };

    IntervalEstimate est;
    est.level = level;
    est.n_reps = static_cast<int>(values.size());
    est.n_failures = n_failures;
    est.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / double(sorted.size());
    const double alpha = (1.0 - level) / 2.0;
    est.lo = quantile(alpha);
    est.hi = quantile(1.0 - alpha);
    return est;
}

ReplicateSet monte_carlo_replicates(const QuadraticFit& fit_a, const QuadraticFit& fit_b,
                                    int reps, std::uint64_t seed) {
    if (reps < 100) {
        throw std::invalid_argument("monte_carlo_replicates: reps must be >= 100");
    }
    const std::array<double, 3> sd_a = {std::sqrt(fit_a.cov[0][0]), std::sqrt(fit_a.cov[1][1]),
                                        std::sqrt(fit_a.cov[2][2])};
    const std::array<double, 3> sd_b = {std::sqrt(fit_b.cov[0][0]), std::sqrt(fit_b.cov[1][1]),
                                        std::sqrt(fit_b.cov[2][2])};
    ReplicateSet out;
    for (int r = 0; r < reps; ++r) {
        Rng rng = Rng::derive(seed, {0x6d63ULL, std::uint64_t(r)});
        QuadraticFit a = fit_a, b = fit_b;
        for (int i = 0; i < 3; ++i) a.coeffs[i] += sd_a[i] * rng.normal();
        for (int i = 0; i < 3; ++i) b.coeffs[i] += sd_b[i] * rng.normal();
        try {
            const IntersectionEstimate est = intersect(a, b);
            out.theta.push_back(est.theta_star);
            out.qber.push_back(est.qber_star);
        } catch (const AnalysisError&) {
            ++out.n_failures;
        }
    }
    return out;
}

ReplicateSet bootstrap_replicates(std::span<const ExperimentRecord> records, int reps,
                                  std::uint64_t seed, bool paired) {
    if (records.size() < 4) {
        throw std::invalid_argument("bootstrap_replicates: need at least 4 records");
    }
    if (reps < 100) {
        throw std::invalid_argument("bootstrap_replicates: reps must be >= 100");
    }
    const std::size_t n = records.size();
    ReplicateSet out;
    std::vector<std::pair<double, double>> pts_a(n), pts_b(n);
    for (int r = 0; r < reps; ++r) {
        Rng rng = Rng::derive(seed, {0x6273ULL, std::uint64_t(r)});
        for (std::size_t k = 0; k < n; ++k) {
            const ExperimentRecord& rec = records[rng.uniform_int(n)];
            pts_a[k] = {rec.theta, rec.fid_a};
            if (paired) pts_b[k] = {rec.theta, rec.fid_b};
        }
        if (!paired) {
            for (std::size_t k = 0; k < n; ++k) {
                const ExperimentRecord& rec = records[rng.uniform_int(n)];
                pts_b[k] = {rec.theta, rec.fid_b};
            }
        }
        try {
            const IntersectionEstimate est = intersect(fit_quadratic(pts_a), fit_quadratic(pts_b));
            out.theta.push_back(est.theta_star);
            out.qber.push_back(est.qber_star);
        } catch (const AnalysisError&) {
            ++out.n_failures;
        }
    }
    return out;
}

namespace {

std::pair<IntervalEstimate, IntervalEstimate> summarize(const ReplicateSet& reps, int requested) {
    if (2 * reps.n_failures > requested) {
        throw AnalysisError("more than half of the replicates produced no valid crossover");
    }
    return {percentile_interval(reps.theta, 0.95, reps.n_failures),
            percentile_interval(reps.qber, 0.95, reps.n_failures)};
}

} // namespace

std::pair<IntervalEstimate, IntervalEstimate> monte_carlo_ci(const QuadraticFit& fit_a,
                                                             const QuadraticFit& fit_b,
                                                             int reps, std::uint64_t seed) {
    return summarize(monte_carlo_replicates(fit_a, fit_b, reps, seed), reps);
}

std::pair<IntervalEstimate, IntervalEstimate> bootstrap_ci(std::span<const ExperimentRecord> records,
                                                           int reps, std::uint64_t seed, bool paired) {
    return summarize(bootstrap_replicates(records, reps, seed, paired), reps);
}

IntervalEstimate aggregate_cumulative(const std::array<std::vector<double>, 4>& per_state) {
    const std::size_t n = per_state[0].size();
    for (const auto& v : per_state) {
        if (v.size() != n) {
            throw std::invalid_argument("aggregate_cumulative: replicate arrays have mismatched lengths");
        }
    }
    std::vector<double> cumulative(n);
    for (std::size_t i = 0; i < n; ++i) {
        cumulative[i] = (per_state[0][i] + per_state[1][i] + per_state[2][i] + per_state[3][i]) / 4.0;
    }
    return percentile_interval(cumulative);
}

} // namespace qkd
