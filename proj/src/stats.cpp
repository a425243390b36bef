#include "wds/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wds {
namespace stats {

namespace {
constexpr double kMadToSigma = 1.4826022185056018; // 1 / 0.6745
constexpr double kModifiedFactor = 0.6745;
} // namespace

double mean(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0, c = 0.0;
    for (double x : v) { // Kahan
        double y = x - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s / static_cast<double>(v.size());
}

double stddev(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    double s = 0.0, c = 0.0;
    for (double x : v) {
        double d = (x - m) * (x - m);
        double y = d - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return std::sqrt(s / static_cast<double>(v.size()));
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    const size_t n = v.size();
    std::nth_element(v.begin(), v.begin() + n / 2, v.end());
    double hi = v[n / 2];
    if (n % 2 == 1) return hi;
    std::nth_element(v.begin(), v.begin() + n / 2 - 1, v.begin() + n / 2);
    return 0.5 * (v[n / 2 - 1] + hi);
}

double mad(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    const double med = median(v);
    std::vector<double> dev;
    dev.reserve(v.size());
    for (double x : v) dev.push_back(std::fabs(x - med));
    return median(std::move(dev));
}

ScoreResult zscore(const std::vector<double>& values) {
    ScoreResult r;
    r.scores.assign(values.size(), 0.0);
    if (values.size() < 2) {
        r.degenerate = true;
        return r;
    }
    const double m = mean(values);
    const double sd = stddev(values);
    if (sd == 0.0) {
        r.degenerate = true; // no node is an outlier of a constant distribution
        return r;
    }
    for (size_t i = 0; i < values.size(); ++i) r.scores[i] = (values[i] - m) / sd;
    return r;
}

ScoreResult modified_zscore(const std::vector<double>& values) {
    ScoreResult r;
    r.scores.assign(values.size(), 0.0);
    if (values.size() < 2) {
        r.degenerate = true;
        return r;
    }
    const double med = median(values);
    const double m = mad(values);
    if (m == 0.0) {
        r.degenerate = true;
        const double inf = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < values.size(); ++i) {
            if (values[i] > med) r.scores[i] = inf;
            else if (values[i] < med) r.scores[i] = -inf;
        }
        return r;
    }
    for (size_t i = 0; i < values.size(); ++i)
        r.scores[i] = kModifiedFactor * (values[i] - med) / m;
    return r;
}

std::map<int, double> local_zscore(const std::map<int, double>& values,
                                   const std::map<int, int>& partition,
                                   bool* any_degenerate) {
    std::map<int, std::vector<int>> groups;
    for (const auto& [id, _] : values) {
        auto it = partition.find(id);
        const int g = it == partition.end() ? 0 : it->second;
        groups[g].push_back(id);
    }
    std::map<int, double> out;
    bool degen = false;
    for (const auto& [g, ids] : groups) {
        std::vector<double> vals;
        vals.reserve(ids.size());
        for (int id : ids) vals.push_back(values.at(id));
        ScoreResult r = zscore(vals);
        degen = degen || r.degenerate;
        for (size_t i = 0; i < ids.size(); ++i) out[ids[i]] = r.scores[i];
    }
    if (any_degenerate) *any_degenerate = degen;
    return out;
}

std::vector<std::pair<double, double>> dynamic_zscore(
    const std::vector<std::pair<double, double>>& stream, double window) {
    std::vector<std::pair<double, double>> out;
    out.reserve(stream.size());
    size_t lo = 0;
    std::vector<double> buf;
    for (size_t i = 0; i < stream.size(); ++i) {
        const double t = stream[i].first;
        while (lo <= i && stream[lo].first <= t - window) ++lo;
        buf.clear();
        for (size_t j = lo; j <= i; ++j) buf.push_back(stream[j].second);
        double score = 0.0;
        if (buf.size() >= 2) {
            const double m = mean(buf);
            const double sd = stddev(buf);
            if (sd > 0.0) score = (stream[i].second - m) / sd;
        }
        out.emplace_back(t, score);
    }
    return out;
}

OutlierSplit robust_high_outliers(const std::vector<double>& values, double threshold) {
    OutlierSplit out;
    const size_t n = values.size();
    out.scores.assign(n, 0.0);
    out.flagged.assign(n, 0);
    if (n < 2) {
        out.degenerate = true;
        return out;
    }

    double center = median(values);
    double scale = kMadToSigma * mad(values);
    if (scale == 0.0) {
        // Majority ties; fall back to moment estimates.
        center = mean(values);
        scale = stddev(values);
        if (scale == 0.0) {
            out.degenerate = true;
            return out;
        }
    }

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<char> cur(n, 0);
    for (int iter = 0; iter < 64; ++iter) {
        std::vector<char> next(n, 0);
        for (size_t i = 0; i < n; ++i) {
            const double s = scale > 0.0 ? (values[i] - center) / scale
                                         : (values[i] > center ? inf : 0.0);
            if (s > threshold) next[i] = 1;
        }
        if (next == cur) break;
        cur = next;
        std::vector<double> rest;
        rest.reserve(n);
        for (size_t i = 0; i < n; ++i)
            if (!cur[i]) rest.push_back(values[i]);
        if (rest.size() < 2) break;
        center = mean(rest);
        scale = stddev(rest);
    }

    out.flagged = cur;
    out.clean_mean = center;
    out.clean_stddev = scale;
    for (size_t i = 0; i < n; ++i) {
        out.scores[i] = scale > 0.0 ? (values[i] - center) / scale
                                    : (values[i] > center ? inf : (values[i] < center ? -inf : 0.0));
    }
    return out;
}

} // namespace stats
} // namespace wds
