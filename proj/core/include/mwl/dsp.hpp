#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace mwl::dsp {

/// Forward DFT. Uses an iterative radix-2 FFT for power-of-two lengths,
/// direct evaluation otherwise (inputs here are short).
std::vector<std::complex<double>> dft(std::span<const double> x);

bool is_power_of_two(std::size_t n);

/// One-sided Hann periodogram.
/// The window is normalized by its coherent gain so a unit sinusoid keeps
/// unit amplitude; psd[k] covers frequency k * fs / N for k = 0..N/2.
struct Psd {
    std::vector<double> freq_hz;
    std::vector<double> power;
};
Psd periodogram(std::span<const double> x, double fs_hz);

/// Welch average of Hann periodograms, 50% overlap. segment_len is clamped
/// to the signal length.
Psd welch(std::span<const double> x, double fs_hz, std::size_t segment_len);

/// One second-order IIR section, direct form II transposed.
struct Biquad {
    double b0, b1, b2, a1, a2;
};

/// Butterworth high-pass of even order as a cascade of biquads
/// (RBJ bilinear sections with Butterworth Q values).
std::vector<Biquad> butterworth_highpass(int order, double cutoff_hz, double fs_hz);

std::vector<double> filter(const std::vector<Biquad>& sections,
                           std::span<const double> x);

/// Zero-phase forward-backward filtering with odd-reflection padding of
/// pad_len samples at each end (trimmed from the output).
std::vector<double> filtfilt(const std::vector<Biquad>& sections,
                             std::span<const double> x, std::size_t pad_len);

}  // namespace mwl::dsp
