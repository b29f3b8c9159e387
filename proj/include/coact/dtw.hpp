#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "coact/linalg.hpp"
#include "coact/spatial.hpp"
#include "coact/types.hpp"

namespace coact::dtw {

struct ChannelSeries {
    std::string unit_id;
    Matrix values;  // T x D
    std::vector<std::string> channels;
    bool scaled = false;

    std::size_t length() const { return values.rows; }
    std::size_t dims() const { return values.cols; }
};

ChannelSeries series_from_timeline(const spatial::TimelineMatrix& tl);

struct GlobalScaler {
    std::vector<double> means;
    std::vector<double> sds;  // population sd over the pooled rows
    std::vector<bool> zero_sd;
    std::vector<std::string> channels;
};

// Single scaler fit on the pooled rows of every session.
GlobalScaler fit_scaler(const std::vector<ChannelSeries>& sessions);
ChannelSeries apply_scaler(const ChannelSeries& series, const GlobalScaler& scaler);
ChannelSeries invert_scaler(const ChannelSeries& series, const GlobalScaler& scaler);

// Channel-wise linear interpolation at target_length equally spaced positions
// over [0, T-1]; endpoints preserved exactly.
ChannelSeries resample(const ChannelSeries& series, std::size_t target_length);

struct DtwResult {
    double cost = 0.0;
    std::vector<std::pair<std::size_t, std::size_t>> path;  // (index_a, index_b)
};

// Band-constrained DTW. Local cost between rows is the Euclidean distance,
// summed along the path without normalization. A cell (i,j) is admissible
// when it lies within band_radius of the stretched diagonal measured from
// either side, which keeps the constraint symmetric for unequal lengths.
// Path ties prefer the diagonal step, then (1,0).
DtwResult dtw_distance(const Matrix& a, const Matrix& b, double band_radius);

inline DtwResult dtw_distance(const ChannelSeries& a, const ChannelSeries& b, double band_radius) {
    return dtw_distance(a.values, b.values, band_radius);
}

// Alignment cost used inside DBA: squared Euclidean local cost (the
// objective the mean update provably never increases).
DtwResult dtw_alignment_sq(const Matrix& a, const Matrix& b, double band_radius);

double default_band_radius(std::size_t length, double fraction = 0.1);

struct BarycenterPrototype {
    std::string group;
    Matrix values;  // L x D
    std::vector<std::string> channels;
    std::size_t iterations = 0;
    std::vector<double> inertia_trace;  // squared-cost objective per iteration
    double final_inertia = 0.0;
};

// DTW barycenter averaging: init at the group medoid, then alternate
// aligning every series to the barycenter and averaging the rows mapped to
// each barycenter index. Series are processed in unit_id order so input
// permutations cannot change the result.
BarycenterPrototype dba_barycenter(const std::vector<ChannelSeries>& group,
                                   double band_radius, std::size_t max_iter = 30,
                                   double tol = 1e-6);

struct DifferenceMap {
    Matrix values;  // L x D, high - low
    std::vector<std::string> channels;
};

DifferenceMap difference_map(const BarycenterPrototype& high, const BarycenterPrototype& low);

// Mean over the normalized timeline per channel; positive = higher intensity
// among high performers.
std::vector<double> effect_profile(const DifferenceMap& diff);

struct CandidateStability {
    std::size_t length = 0;
    double mean = 0.0;
    double se = 0.0;
    double mean_sign_agreement = 0.0;
    double mean_rho = 0.0;
};

struct StabilityComponents {
    double sign_agreement = 0.0;  // baseline-weighted, channels with |baseline| >= threshold
    double rho = 0.0;             // Spearman between profiles (0 when rank-degenerate)
    double score = 0.0;           // 0.5*sign_agreement + 0.5*(rho+1)/2
};

StabilityComponents stability_components(const std::vector<double>& replicate,
                                         const std::vector<double>& baseline,
                                         double sign_threshold = 0.1);

struct LengthSelectionReport {
    std::size_t baseline_length = 0;
    std::vector<double> baseline_profile;
    std::vector<std::string> channels;
    std::vector<CandidateStability> candidates;
    std::size_t chosen_length = 0;
    std::size_t best_length = 0;  // argmax stability mean
};

struct LengthSelectionParams {
    std::size_t bootstrap_replicates = 200;
    double sign_threshold = 0.1;
    double band_fraction = 0.1;
    std::size_t dba_max_iter = 30;
    double dba_tol = 1e-6;
    std::uint64_t seed = 0;
    std::size_t threads = 1;
};

// Bootstrap stability of the effect profile across candidate lengths,
// 1-SE rule against the best candidate. Sessions are scaled (one global
// scaler) before resampling; the baseline profile is computed at the median
// session length.
LengthSelectionReport select_length(const std::vector<ChannelSeries>& sessions,
                                    const std::vector<Level>& labels,
                                    const std::vector<std::size_t>& candidates,
                                    const LengthSelectionParams& params = {});

// One full profile computation at a fixed length (used by select_length and
// the CLI): resample scaled sessions, DBA per group, difference, profile.
std::vector<double> group_effect_profile(const std::vector<ChannelSeries>& scaled_sessions,
                                         const std::vector<Level>& labels,
                                         std::size_t length, double band_fraction,
                                         std::size_t dba_max_iter, double dba_tol);

}  // namespace coact::dtw
