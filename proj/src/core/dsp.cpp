#include "vivclust/core/dsp.hpp"

#include "vivclust/core/error.hpp"
#include "vivclust/core/types.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace vivclust::dsp {

std::vector<std::complex<double>> fft(std::span<const double> x) {
    // kissfft crashes on a single sample
    if (x.size() < 2) return std::vector<std::complex<double>>(x.begin(), x.end());
    Eigen::FFT<double> engine;
    std::vector<double> in(x.begin(), x.end());
    std::vector<std::complex<double>> out;
    engine.fwd(out, in);
    return out;
}

std::vector<double> ifft_real(const std::vector<std::complex<double>>& spectrum) {
    if (spectrum.size() < 2) {
        std::vector<double> re;
        for (const auto& c : spectrum) re.push_back(c.real());
        return re;
    }
    Eigen::FFT<double> engine;
    std::vector<std::complex<double>> out;
    engine.inv(out, spectrum);
    std::vector<double> re(out.size());
    for (std::size_t i = 0; i < out.size(); ++i) re[i] = out[i].real();
    return re;
}

double bin_frequency(std::size_t k, std::size_t n, double dt) {
    const double df = 1.0 / (static_cast<double>(n) * dt);
    if (2 * k <= n) return static_cast<double>(k) * df;
    return -static_cast<double>(n - k) * df;
}

namespace {

double band_gain(double f, Band band, double width) {
    f = std::abs(f);
    if (f >= band.f_low && f <= band.f_high) return 1.0;
    if (width <= 0.0) return 0.0;
    double dist = f < band.f_low ? band.f_low - f : f - band.f_high;
    if (dist >= width) return 0.0;
    return 0.5 * (1.0 + std::cos(kPi * dist / width));
}

// Band mask times a frequency response h(f), applied in the frequency domain.
template <class Response>
std::vector<double> masked(std::span<const double> x, double dt, Band band, double taper, Response h) {
    if (x.empty()) return {};
    if (!(band.f_high > band.f_low) || band.f_low < 0.0)
        throw validation_error("band-pass needs 0 <= f_low < f_high");
    const std::size_t n = x.size();
    const double m = mean(x);
    std::vector<double> centered(n);
    for (std::size_t i = 0; i < n; ++i) centered[i] = x[i] - m;
    auto spec = fft(centered);
    const double width = taper * (band.f_high - band.f_low);
    for (std::size_t k = 0; k < n; ++k) {
        const double f = bin_frequency(k, n, dt);
        const double g = k == 0 ? 0.0 : band_gain(f, band, width);
        spec[k] *= g == 0.0 ? std::complex<double>(0.0) : g * h(f, k);
    }
    return ifft_real(spec);
}

}  // namespace

std::vector<double> band_pass(std::span<const double> x, double dt, Band band, double taper,
                              bool differentiate) {
    const std::size_t n = x.size();
    return masked(x, dt, band, taper, [&](double f, std::size_t k) {
        if (!differentiate) return std::complex<double>(1.0);
        // Nyquist bin has no well-defined derivative sign.
        if (2 * k == n) return std::complex<double>(0.0);
        return std::complex<double>(0.0, 2.0 * kPi * f);
    });
}

std::vector<double> band_pass_displacement(std::span<const double> acc, double dt, Band band,
                                           double taper) {
    if (!(band.f_low - taper * (band.f_high - band.f_low) > 0.0))
        throw validation_error("double integration needs a band mask that excludes 0 Hz");
    return masked(acc, dt, band, taper, [](double f, std::size_t) {
        const double w = 2.0 * kPi * f;
        return std::complex<double>(-1.0 / (w * w));
    });
}

double mean(std::span<const double> x) {
    if (x.empty()) return 0.0;
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double rms(std::span<const double> x) {
    if (x.empty()) return 0.0;
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s / static_cast<double>(x.size()));
}

std::vector<double> hann(std::size_t n) {
    std::vector<double> w(n, 1.0);
    if (n < 2) return w;
    for (std::size_t i = 0; i < n; ++i)
        w[i] = 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(i) / static_cast<double>(n - 1)));
    return w;
}

namespace {

void accumulate_segments(std::span<const double> x, double dt, std::size_t seg_len,
                         std::size_t step, std::size_t n_seg, std::size_t offset,
                         const std::vector<double>& w, double w2, std::vector<double>& acc) {
    std::vector<double> seg(seg_len);
    const std::size_t half = seg_len / 2;
    for (std::size_t s = 0; s < n_seg; ++s) {
        const auto part = x.subspan(offset + s * step, seg_len);
        const double m = mean(part);
        for (std::size_t i = 0; i < seg_len; ++i) seg[i] = (part[i] - m) * w[i];
        const auto spec = fft(seg);
        for (std::size_t k = 0; k <= half; ++k) {
            double p = std::norm(spec[k]) * dt / w2;
            if (k != 0 && 2 * k != seg_len) p *= 2.0;
            acc[k] += p;
        }
    }
}

}  // namespace

Psd welch(std::span<const double> x, double dt, std::size_t seg_len, double overlap) {
    if (seg_len < 64) throw validation_error("welch segment shorter than 64 samples");
    if (x.size() < seg_len) throw validation_error("signal shorter than one welch segment");
    if (!(dt > 0.0)) throw validation_error("dt must be positive");
    if (!(overlap >= 0.0 && overlap < 1.0)) throw validation_error("overlap must be in [0, 1)");
    const auto step = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(static_cast<double>(seg_len) * (1.0 - overlap))));
    const std::size_t n_seg = 1 + (x.size() - seg_len) / step;
    const std::size_t leftover = x.size() - seg_len - (n_seg - 1) * step;
    const auto w = hann(seg_len);
    double w2 = 0.0;
    for (double v : w) w2 += v * v;

    Psd out;
    const std::size_t half = seg_len / 2;
    out.freqs.resize(half + 1);
    for (std::size_t k = 0; k <= half; ++k)
        out.freqs[k] = static_cast<double>(k) / (static_cast<double>(seg_len) * dt);
    out.psd.assign(half + 1, 0.0);
    std::size_t count = n_seg;
    accumulate_segments(x, dt, seg_len, step, n_seg, leftover / 2, w, w2, out.psd);
    if (leftover % 2 == 1) {
        accumulate_segments(x, dt, seg_len, step, n_seg, leftover / 2 + 1, w, w2, out.psd);
        count *= 2;
    }
    for (double& p : out.psd) p /= static_cast<double>(count);
    return out;
}

std::size_t segment_length_for(std::size_t n, std::size_t cap) {
    std::size_t s = 1;
    while (s * 2 <= n && s * 2 <= cap) s *= 2;
    return s;
}

std::vector<double> central_difference(std::span<const double> x, double dt) {
    const std::size_t n = x.size();
    std::vector<double> d(n, 0.0);
    if (n < 2) return d;
    d[0] = (x[1] - x[0]) / dt;
    d[n - 1] = (x[n - 1] - x[n - 2]) / dt;
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (x[i + 1] - x[i - 1]) / (2.0 * dt);
    return d;
}

}  // namespace vivclust::dsp

namespace vivclust {

std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

namespace {
std::uint64_t fnv1a(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}
}  // namespace

std::uint64_t derive_seed(std::uint64_t root, std::string_view tag) {
    return mix_seed(root ^ fnv1a(tag));
}

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
    return mix_seed(mix_seed(root) + index);
}

std::string content_hash(std::string_view data) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(data)));
    return buf;
}

}  // namespace vivclust
