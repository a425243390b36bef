#ifndef WDS_STATS_HPP
#define WDS_STATS_HPP

#include <map>
#include <utility>
#include <vector>

namespace wds {
namespace stats {

// Result of a scoring pass. `degenerate` is set when the dispersion
// measure vanished and the scores carry no outlier information.
struct ScoreResult {
    std::vector<double> scores;
    bool degenerate = false;
};

double mean(const std::vector<double>& v);
// Population standard deviation (divide by n).
double stddev(const std::vector<double>& v);
double median(std::vector<double> v);
// Median absolute deviation around the median.
double mad(const std::vector<double>& v);

// z_i = (x_i - mean) / stddev, population stddev. Requires n >= 2.
// A constant input yields all-zero scores with the degenerate flag.
ScoreResult zscore(const std::vector<double>& values);

// z*_i = 0.6745 * (x_i - median) / MAD. When MAD == 0 the result is
// degenerate: 0 at the median, +/-inf sentinels elsewhere.
ScoreResult modified_zscore(const std::vector<double>& values);

// Standard zscore applied independently inside each partition group.
// Groups with fewer than two members (or zero in-group spread) score 0
// and mark the whole result degenerate.
std::map<int, double> local_zscore(const std::map<int, double>& values,
                                   const std::map<int, int>& partition,
                                   bool* any_degenerate = nullptr);

// Each sample scored against mean/stddev of the samples in (t-window, t].
// Fewer than two in-window samples (or zero spread) scores 0.
std::vector<std::pair<double, double>> dynamic_zscore(
    const std::vector<std::pair<double, double>>& stream, double window);

// Robust outlier split: seeds center/scale with median and
// normal-consistent MAD (1.4826 * MAD), flags values whose score
// exceeds `threshold` (high side only), then re-estimates mean/stddev
// from the unflagged values and repeats until the flag set is stable.
// Plain z against a contaminated mean/stddev cannot push k equal
// outliers past sqrt((n-k)/k), so the clean-subset baseline is what
// makes a fixed threshold usable.
struct OutlierSplit {
    std::vector<double> scores;   // against the final clean baseline
    std::vector<char> flagged;    // 1 = above threshold
    double clean_mean = 0.0;
    double clean_stddev = 0.0;
    bool degenerate = false;      // no usable dispersion at any stage
};
OutlierSplit robust_high_outliers(const std::vector<double>& values, double threshold);

} // namespace stats
} // namespace wds

#endif
