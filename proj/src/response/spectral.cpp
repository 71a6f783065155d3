#include "vivclust/response/spectral.hpp"

#include "vivclust/core/dsp.hpp"
#include "vivclust/core/error.hpp"

#include <algorithm>
#include <cmath>

namespace vivclust::response {

Spectrum welch_psd(const TimeSeries& ts, std::size_t seg_len, double overlap) {
    const auto p = dsp::welch(ts.values, ts.dt, seg_len, overlap);
    return {p.freqs, p.psd};
}

Peak spectrum_peak(const Spectrum& s, double f_min) {
    Peak best;
    bool found = false;
    for (std::size_t k = 0; k < s.psd.size(); ++k) {
        if (k == 0 || s.freqs[k] < f_min) continue;  // DC carries no response
        if (!found || s.psd[k] > best.value) {
            best = {s.freqs[k], s.psd[k]};
            found = true;
        }
    }
    return best;
}

double kurtosis(std::span<const double> x) {
    if (x.empty()) throw validation_error("degenerate signal");
    const double m = dsp::mean(x);
    double m2 = 0.0, m4 = 0.0;
    for (double v : x) {
        const double d = v - m;
        const double d2 = d * d;
        m2 += d2;
        m4 += d2 * d2;
    }
    const auto n = static_cast<double>(x.size());
    m2 /= n;
    m4 /= n;
    // relative to the signal scale, so constant signals with rounding noise still fail
    if (!(m2 > 0.0) || m2 <= 1e-28 * (m * m)) throw validation_error("degenerate signal");
    return m4 / (m2 * m2);
}

EmpiricalCdf::EmpiricalCdf(std::vector<double> values) : sorted_(std::move(values)) {
    if (sorted_.empty()) throw validation_error("empirical CDF needs at least one value");
    std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::operator()(double x) const {
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
    return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

double EmpiricalCdf::quantile(double p) const {
    if (!(p > 0.0 && p <= 1.0)) throw validation_error("quantile level must be in (0, 1]");
    const auto n = static_cast<double>(sorted_.size());
    auto k = static_cast<std::size_t>(std::ceil(p * n - 1e-12));
    k = std::clamp<std::size_t>(k, 1, sorted_.size());
    return sorted_[k - 1];
}

}  // namespace vivclust::response
