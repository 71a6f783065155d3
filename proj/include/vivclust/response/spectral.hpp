#pragma once

#include "vivclust/core/types.hpp"

#include <span>
#include <vector>

namespace vivclust::response {

struct Spectrum {
    std::vector<double> freqs;  // Hz, 0 .. Nyquist
    std::vector<double> psd;    // one-sided, unit^2 / Hz
};

// Welch estimate with a Hann window; see dsp::welch for the segment placement.
Spectrum welch_psd(const TimeSeries& ts, std::size_t seg_len = 1024, double overlap = 0.5);

// Largest PSD value above DC and at or above f_min, with its frequency.
struct Peak {
    double freq = 0.0;
    double value = 0.0;
};
Peak spectrum_peak(const Spectrum& s, double f_min = 0.0);

// m4 / m2^2 with population moments. Throws "degenerate signal" for zero variance.
double kurtosis(std::span<const double> x);
inline double kurtosis(const TimeSeries& ts) { return kurtosis(ts.values); }

// Right-continuous empirical distribution function.
class EmpiricalCdf {
public:
    explicit EmpiricalCdf(std::vector<double> values);

    double operator()(double x) const;
    // Smallest sample x with F(x) >= p, for p in (0, 1].
    double quantile(double p) const;
    std::size_t size() const { return sorted_.size(); }
    const std::vector<double>& sorted() const { return sorted_; }

private:
    std::vector<double> sorted_;
};

}  // namespace vivclust::response
