#include "mwl/dsp.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mwl::dsp {

namespace {
constexpr double kPi = std::numbers::pi;

void fft_inplace(std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        double ang = -2.0 * kPi / static_cast<double>(len);
        std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                auto u = a[i + k];
                auto v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

std::vector<double> hann_window(std::size_t n) {
    std::vector<double> w(n, 1.0);
    if (n < 2) return w;
    for (std::size_t i = 0; i < n; ++i)
        w[i] = 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(i) /
                                     static_cast<double>(n - 1)));
    return w;
}

Psd periodogram_windowed(std::span<const double> x, double fs_hz,
                         const std::vector<double>& w) {
    const std::size_t n = x.size();
    double cg = 0.0;
    for (double v : w) cg += v;
    cg /= static_cast<double>(n);

    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] * w[i] / cg;
    auto spec = dft(y);

    const std::size_t nbins = n / 2 + 1;
    Psd out;
    out.freq_hz.resize(nbins);
    out.power.resize(nbins);
    for (std::size_t k = 0; k < nbins; ++k) {
        out.freq_hz[k] = static_cast<double>(k) * fs_hz / static_cast<double>(n);
        double scale = (k == 0 || (n % 2 == 0 && k == n / 2)) ? 1.0 : 2.0;
        double mag2 = std::norm(spec[k]);
        out.power[k] = scale * mag2 / (static_cast<double>(n) * static_cast<double>(n));
    }
    return out;
}

}  // namespace

bool is_power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

std::vector<std::complex<double>> dft(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> out(n);
    if (n == 0) return out;
    if (is_power_of_two(n)) {
        for (std::size_t i = 0; i < n; ++i) out[i] = x[i];
        fft_inplace(out);
        return out;
    }
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> s(0.0);
        for (std::size_t t = 0; t < n; ++t) {
            double ang = -2.0 * kPi * static_cast<double>(k) *
                         static_cast<double>(t) / static_cast<double>(n);
            s += x[t] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        out[k] = s;
    }
    return out;
}

Psd periodogram(std::span<const double> x, double fs_hz) {
    if (x.size() < 2) throw std::invalid_argument("periodogram: signal too short");
    return periodogram_windowed(x, fs_hz, hann_window(x.size()));
}

Psd welch(std::span<const double> x, double fs_hz, std::size_t segment_len) {
    if (x.size() < 2) throw std::invalid_argument("welch: signal too short");
    std::size_t nper = std::min(segment_len, x.size());
    std::size_t step = std::max<std::size_t>(1, nper / 2);
    auto w = hann_window(nper);

    Psd acc;
    std::size_t count = 0;
    for (std::size_t start = 0; start + nper <= x.size(); start += step) {
        auto seg = x.subspan(start, nper);
        Psd p = periodogram_windowed(seg, fs_hz, w);
        if (count == 0) {
            acc = std::move(p);
        } else {
            for (std::size_t k = 0; k < acc.power.size(); ++k)
                acc.power[k] += p.power[k];
        }
        ++count;
    }
    for (double& v : acc.power) v /= static_cast<double>(count);
    return acc;
}

std::vector<Biquad> butterworth_highpass(int order, double cutoff_hz, double fs_hz) {
    if (order <= 0 || order % 2 != 0)
        throw std::invalid_argument("butterworth_highpass: order must be even and > 0");
    if (cutoff_hz <= 0 || cutoff_hz >= fs_hz / 2)
        throw std::invalid_argument("butterworth_highpass: cutoff outside (0, fs/2)");

    std::vector<Biquad> sections;
    int npairs = order / 2;
    double w0 = 2.0 * kPi * cutoff_hz / fs_hz;
    double cw = std::cos(w0), sw = std::sin(w0);
    for (int k = 0; k < npairs; ++k) {
        // Pole-pair Q for a Butterworth cascade.
        double q = 1.0 / (2.0 * std::sin(kPi * (2.0 * k + 1.0) / (2.0 * order)));
        double alpha = sw / (2.0 * q);
        double a0 = 1.0 + alpha;
        Biquad s{};
        s.b0 = (1.0 + cw) / 2.0 / a0;
        s.b1 = -(1.0 + cw) / a0;
        s.b2 = (1.0 + cw) / 2.0 / a0;
        s.a1 = -2.0 * cw / a0;
        s.a2 = (1.0 - alpha) / a0;
        sections.push_back(s);
    }
    return sections;
}

std::vector<double> filter(const std::vector<Biquad>& sections,
                           std::span<const double> x) {
    std::vector<double> y(x.begin(), x.end());
    for (const auto& s : sections) {
        double z1 = 0.0, z2 = 0.0;
        for (double& v : y) {
            double in = v;
            double out = s.b0 * in + z1;
            z1 = s.b1 * in - s.a1 * out + z2;
            z2 = s.b2 * in - s.a2 * out;
            v = out;
        }
    }
    return y;
}

std::vector<double> filtfilt(const std::vector<Biquad>& sections,
                             std::span<const double> x, std::size_t pad_len) {
    const std::size_t n = x.size();
    if (n == 0) return {};
    std::size_t pad = std::min(pad_len, n - 1);

    std::vector<double> ext;
    ext.reserve(n + 2 * pad);
    for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x[0] - x[i]);
    ext.insert(ext.end(), x.begin(), x.end());
    for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);

    auto fwd = filter(sections, ext);
    std::reverse(fwd.begin(), fwd.end());
    auto bwd = filter(sections, fwd);
    std::reverse(bwd.begin(), bwd.end());

    return std::vector<double>(bwd.begin() + static_cast<long>(pad),
                               bwd.begin() + static_cast<long>(pad + n));
}

}  // namespace mwl::dsp
