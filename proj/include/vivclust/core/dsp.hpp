#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace vivclust::dsp {

std::vector<std::complex<double>> fft(std::span<const double> x);
// Real part of the inverse transform of a full (two-sided) spectrum.
std::vector<double> ifft_real(const std::vector<std::complex<double>>& spectrum);

// Frequency of DFT bin k for n samples at spacing dt, folded to signed frequency.
double bin_frequency(std::size_t k, std::size_t n, double dt);

struct Band {
    double f_low = 0.0;
    double f_high = 0.0;
};

// Zero-phase band-pass by DFT masking. The mask is flat on [f_low, f_high] and rolls
// off with a raised cosine over taper * (f_high - f_low) outside each edge.
// The mean is always removed. With differentiate = true the pass band output is
// the time derivative (multiplication by i*2*pi*f).
std::vector<double> band_pass(std::span<const double> x, double dt, Band band,
                              double taper = 0.1, bool differentiate = false);

// Displacement from acceleration over the same masked band (division by -(2 pi f)^2).
// The mask must exclude 0 Hz, so the band needs f_low > 0 and the taper must not
// reach it.
std::vector<double> band_pass_displacement(std::span<const double> acc, double dt, Band band,
                                           double taper = 0.1);

double rms(std::span<const double> x);
double mean(std::span<const double> x);

// Symmetric Hann window of length n.
std::vector<double> hann(std::size_t n);

struct Psd {
    std::vector<double> freqs;  // 0 .. Nyquist
    std::vector<double> psd;    // one-sided density
};

// Welch estimate: Hann-windowed segments with the per-segment mean removed.
// Segments are centered in the record (the leftover is split between both ends,
// averaging the two placements when it is odd), so a reversed record gives the
// same estimate. Throws a validation Error when seg_len < 64 or exceeds the record.
Psd welch(std::span<const double> x, double dt, std::size_t seg_len, double overlap);

// Largest power of two not above n, capped at cap.
std::size_t segment_length_for(std::size_t n, std::size_t cap);

// Second-order central differences; one-sided at the ends.
std::vector<double> central_difference(std::span<const double> x, double dt);

}  // namespace vivclust::dsp

namespace vivclust {

// SplitMix64 finaliser; used to derive independent per-stage seeds from one root.
std::uint64_t mix_seed(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t root, std::string_view tag);
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index);

// FNV-1a 64-bit digest, hex encoded.
std::string content_hash(std::string_view data);

}  // namespace vivclust
