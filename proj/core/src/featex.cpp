#include "mwl/featex.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>

#include "mwl/dsp.hpp"
#include "mwl/stats.hpp"

namespace mwl::featex {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kFftLength = 256;       // fixed transform for FFT mean coefficients
constexpr int kFftCoefficients = 76;
constexpr int kLpcOrder = 12;
constexpr int kMelFilters = 26;
constexpr int kMfccCount = 12;
constexpr int kWaveletScales = 9;     // Ricker scales 1..9
constexpr int kHistogramBins = 10;
constexpr int kNeighbourhoodRadius = 10;

struct Context {
    std::span<const double> x;
    double fs;
    std::size_t n;

    std::vector<double> sorted;
    std::vector<double> diffs;

    // One-sided magnitude spectrum of the raw series (n-point DFT),
    // freq[k] = k * fs / n.
    std::vector<double> freq;
    std::vector<double> mag;

    // Hann periodogram of the whole series.
    dsp::Psd psd;

    std::vector<double> fft256_mag;     // bins 0..75 of the 256-point transform

    std::vector<double> lpcc;           // 13 values; empty if degenerate
    std::vector<double> mfcc;           // 12 values

    // Per Ricker scale 1..9: abs mean, energy (mean square), std, variance.
    std::vector<double> w_absmean, w_energy, w_std, w_var;
    double wavelet_entropy = 0.0;
    bool wavelet_degenerate = false;

    std::vector<int> hist_counts;       // 10 bins
};

std::vector<double> ricker(int points, double a) {
    std::vector<double> w(static_cast<std::size_t>(points));
    double norm = 2.0 / (std::sqrt(3.0 * a) * std::pow(kPi, 0.25));
    for (int i = 0; i < points; ++i) {
        double t = static_cast<double>(i) - (points - 1) / 2.0;
        double ta = t / a;
        w[static_cast<std::size_t>(i)] =
            norm * (1.0 - ta * ta) * std::exp(-t * t / (2.0 * a * a));
    }
    return w;
}

// numpy-style 'same' convolution.
std::vector<double> convolve_same(std::span<const double> x,
                                  const std::vector<double>& w) {
    const std::size_t n = x.size(), m = w.size();
    std::vector<double> full(n + m - 1, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) full[i + j] += x[i] * w[j];
    std::size_t start = (m - 1) / 2;
    return std::vector<double>(full.begin() + static_cast<long>(start),
                               full.begin() + static_cast<long>(start + n));
}

double hz_to_mel(double f) { return 2595.0 * std::log10(1.0 + f / 700.0); }
double mel_to_hz(double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); }

void compute_spectra(Context& c) {
    auto spec = dsp::dft(c.x);
    std::size_t nbins = c.n / 2 + 1;
    c.freq.resize(nbins);
    c.mag.resize(nbins);
    for (std::size_t k = 0; k < nbins; ++k) {
        c.freq[k] = static_cast<double>(k) * c.fs / static_cast<double>(c.n);
        c.mag[k] = std::abs(spec[k]);
    }
    c.psd = dsp::periodogram(c.x, c.fs);

    std::vector<double> padded(kFftLength, 0.0);
    for (std::size_t i = 0; i < std::min<std::size_t>(c.n, kFftLength); ++i)
        padded[i] = c.x[i];
    auto s256 = dsp::dft(padded);
    c.fft256_mag.resize(kFftCoefficients);
    for (int k = 0; k < kFftCoefficients; ++k)
        c.fft256_mag[static_cast<std::size_t>(k)] = std::abs(s256[static_cast<std::size_t>(k)]);
}

void compute_lpcc(Context& c) {
    std::vector<double> r(kLpcOrder + 1, 0.0);
    for (int j = 0; j <= kLpcOrder; ++j)
        for (std::size_t i = 0; i + static_cast<std::size_t>(j) < c.n; ++i)
            r[static_cast<std::size_t>(j)] += c.x[i] * c.x[i + static_cast<std::size_t>(j)];
    if (r[0] <= 0.0) return;  // degenerate; caller imputes zeros

    // Levinson-Durbin.
    std::vector<double> a(kLpcOrder + 1, 0.0);
    double err = r[0];
    for (int i = 1; i <= kLpcOrder; ++i) {
        double acc = r[static_cast<std::size_t>(i)];
        for (int j = 1; j < i; ++j)
            acc -= a[static_cast<std::size_t>(j)] * r[static_cast<std::size_t>(i - j)];
        double k = acc / err;
        std::vector<double> an = a;
        an[static_cast<std::size_t>(i)] = k;
        for (int j = 1; j < i; ++j)
            an[static_cast<std::size_t>(j)] =
                a[static_cast<std::size_t>(j)] - k * a[static_cast<std::size_t>(i - j)];
        a = an;
        err *= (1.0 - k * k);
        if (err <= 0.0) {
            err = 1e-30;
            break;
        }
    }
    // Cepstral recursion over the predictor coefficients.
    c.lpcc.assign(kLpcOrder + 1, 0.0);
    c.lpcc[0] = std::log(std::max(err, 1e-30));
    for (int m = 1; m <= kLpcOrder; ++m) {
        double cm = a[static_cast<std::size_t>(m)];
        for (int k = 1; k < m; ++k)
            cm += (static_cast<double>(k) / m) * c.lpcc[static_cast<std::size_t>(k)] *
                  a[static_cast<std::size_t>(m - k)];
        c.lpcc[static_cast<std::size_t>(m)] = cm;
    }
}

void compute_mfcc(Context& c) {
    std::size_t nbins = c.mag.size();
    std::vector<double> power(nbins);
    for (std::size_t k = 0; k < nbins; ++k) power[k] = c.mag[k] * c.mag[k];

    double mel_max = hz_to_mel(c.fs / 2.0);
    std::vector<double> centers(kMelFilters + 2);
    for (int j = 0; j < kMelFilters + 2; ++j)
        centers[static_cast<std::size_t>(j)] =
            mel_to_hz(mel_max * j / (kMelFilters + 1));

    std::vector<double> log_e(kMelFilters);
    for (int j = 1; j <= kMelFilters; ++j) {
        double lo = centers[static_cast<std::size_t>(j - 1)];
        double mid = centers[static_cast<std::size_t>(j)];
        double hi = centers[static_cast<std::size_t>(j + 1)];
        double e = 0.0;
        for (std::size_t k = 0; k < nbins; ++k) {
            double f = c.freq[k];
            double w = 0.0;
            if (f > lo && f < mid)
                w = (f - lo) / (mid - lo);
            else if (f >= mid && f < hi)
                w = (hi - f) / (hi - mid);
            e += power[k] * w;
        }
        log_e[static_cast<std::size_t>(j - 1)] = std::log(std::max(e, 1e-30));
    }
    c.mfcc.resize(kMfccCount);
    for (int i = 0; i < kMfccCount; ++i) {
        double s = 0.0;
        for (int j = 0; j < kMelFilters; ++j)
            s += log_e[static_cast<std::size_t>(j)] *
                 std::cos(kPi * i * (2.0 * j + 1.0) / (2.0 * kMelFilters));
        c.mfcc[static_cast<std::size_t>(i)] = s;
    }
}

void compute_wavelets(Context& c) {
    c.w_absmean.resize(kWaveletScales);
    c.w_energy.resize(kWaveletScales);
    c.w_std.resize(kWaveletScales);
    c.w_var.resize(kWaveletScales);
    for (int s = 0; s < kWaveletScales; ++s) {
        double a = static_cast<double>(s + 1);
        int points = static_cast<int>(std::min<std::size_t>(
            static_cast<std::size_t>(10.0 * a), c.n));
        auto coef = convolve_same(c.x, ricker(points, a));
        double am = 0.0, en = 0.0;
        for (double v : coef) {
            am += std::abs(v);
            en += v * v;
        }
        am /= static_cast<double>(coef.size());
        en /= static_cast<double>(coef.size());
        c.w_absmean[static_cast<std::size_t>(s)] = am;
        c.w_energy[static_cast<std::size_t>(s)] = en;
        double var = stats::variance_pop(coef);
        c.w_var[static_cast<std::size_t>(s)] = var;
        c.w_std[static_cast<std::size_t>(s)] = std::sqrt(var);
    }
    double total = 0.0;
    for (double e : c.w_energy) total += e;
    if (total <= 0.0) {
        c.wavelet_degenerate = true;
        return;
    }
    double h = 0.0;
    for (double e : c.w_energy) {
        double p = e / total;
        if (p > 0.0) h -= p * std::log(p);
    }
    c.wavelet_entropy = h;
}

void compute_histogram(Context& c) {
    c.hist_counts.assign(kHistogramBins, 0);
    double lo = c.sorted.front(), hi = c.sorted.back();
    if (hi <= lo) {
        c.hist_counts[0] = static_cast<int>(c.n);
        return;
    }
    double width = (hi - lo) / kHistogramBins;
    for (double v : c.x) {
        int b = static_cast<int>((v - lo) / width);
        b = std::clamp(b, 0, kHistogramBins - 1);
        ++c.hist_counts[static_cast<std::size_t>(b)];
    }
}

// --- spectral helpers over the one-sided magnitude spectrum ---

double spectral_moment_centroid(const Context& c) {
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < c.mag.size(); ++k) {
        num += c.freq[k] * c.mag[k];
        den += c.mag[k];
    }
    return den > 0 ? num / den : 0.0;
}

double spectral_spread(const Context& c, double centroid) {
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < c.mag.size(); ++k) {
        double d = c.freq[k] - centroid;
        num += d * d * c.mag[k];
        den += c.mag[k];
    }
    return den > 0 ? std::sqrt(num / den) : 0.0;
}

double cumulative_threshold_freq(const std::vector<double>& freq,
                                 const std::vector<double>& weight,
                                 double fraction) {
    double total = 0.0;
    for (double w : weight) total += w;
    if (total <= 0.0) return 0.0;
    double cum = 0.0;
    for (std::size_t k = 0; k < weight.size(); ++k) {
        cum += weight[k];
        if (cum >= fraction * total) return freq[k];
    }
    return freq.back();
}

double linreg_slope(std::span<const double> xs, std::span<const double> ys) {
    double mx = stats::mean(xs), my = stats::mean(ys);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        num += (xs[i] - mx) * (ys[i] - my);
        den += (xs[i] - mx) * (xs[i] - mx);
    }
    return den > 0 ? num / den : 0.0;
}

double compute_one(const Context& c, const FeatureDef& def) {
    const std::size_t n = c.n;
    const auto& x = c.x;
    switch (def.kind) {
        case Kind::FftMeanCoefficient:
            return c.fft256_mag[static_cast<std::size_t>(def.param)];
        case Kind::FundamentalFrequency: {
            std::size_t best = 1;
            for (std::size_t k = 2; k < c.mag.size(); ++k)
                if (c.mag[k] > c.mag[best]) best = k;
            return c.mag.size() > 1 ? c.freq[best] : 0.0;
        }
        case Kind::HumanRangeEnergy: {
            double band = 0.0, total = 0.0;
            for (std::size_t k = 1; k < c.mag.size(); ++k) {
                double p = c.mag[k] * c.mag[k];
                total += p;
                if (c.freq[k] >= 0.6 && c.freq[k] <= 2.5) band += p;
            }
            return total > 0 ? band / total : 0.0;
        }
        case Kind::Lpcc:
            return c.lpcc.empty() ? std::numeric_limits<double>::quiet_NaN()
                                  : c.lpcc[static_cast<std::size_t>(def.param)];
        case Kind::Mfcc:
            return c.mfcc[static_cast<std::size_t>(def.param)];
        case Kind::MaxPowerSpectrum:
            return *std::max_element(c.psd.power.begin(), c.psd.power.end());
        case Kind::MaxFrequency:
            return cumulative_threshold_freq(c.freq, c.mag, 0.95);
        case Kind::MedianFrequency:
            return cumulative_threshold_freq(c.freq, c.mag, 0.5);
        case Kind::PowerBandwidth: {
            double mx = *std::max_element(c.psd.power.begin(), c.psd.power.end());
            if (mx <= 0.0) return 0.0;
            std::size_t first = c.psd.power.size(), last = 0;
            for (std::size_t k = 0; k < c.psd.power.size(); ++k)
                if (c.psd.power[k] >= 0.5 * mx) {
                    first = std::min(first, k);
                    last = k;
                }
            return c.psd.freq_hz[last] - c.psd.freq_hz[first];
        }
        case Kind::SpectralCentroid:
            return spectral_moment_centroid(c);
        case Kind::SpectralDecrease: {
            double num = 0.0, den = 0.0;
            for (std::size_t k = 1; k < c.mag.size(); ++k) {
                num += (c.mag[k] - c.mag[0]) / static_cast<double>(k);
                den += c.mag[k];
            }
            return den > 0 ? num / den : 0.0;
        }
        case Kind::SpectralDistance: {
            // Signed distance between the cumulative spectrum and the
            // straight line through its endpoints.
            std::vector<double> cum(c.mag.size());
            double acc = 0.0;
            for (std::size_t k = 0; k < c.mag.size(); ++k) {
                acc += c.mag[k];
                cum[k] = acc;
            }
            double total = 0.0;
            std::size_t last = cum.size() - 1;
            for (std::size_t k = 0; k < cum.size(); ++k) {
                double line = cum[0] + (cum[last] - cum[0]) *
                                           (last ? static_cast<double>(k) / last : 0.0);
                total += cum[k] - line;
            }
            return total;
        }
        case Kind::SpectralEntropy: {
            double total = 0.0;
            for (std::size_t k = 1; k < c.mag.size(); ++k)
                total += c.mag[k] * c.mag[k];
            if (total <= 0.0) return 0.0;
            double h = 0.0;
            for (std::size_t k = 1; k < c.mag.size(); ++k) {
                double p = c.mag[k] * c.mag[k] / total;
                if (p > 0.0) h -= p * std::log2(p);
            }
            std::size_t nb = c.mag.size() - 1;
            return nb > 1 ? h / std::log2(static_cast<double>(nb)) : 0.0;
        }
        case Kind::SpectralKurtosis: {
            double centroid = spectral_moment_centroid(c);
            double spread = spectral_spread(c, centroid);
            if (spread <= 0.0) return std::numeric_limits<double>::quiet_NaN();
            double num = 0.0, den = 0.0;
            for (std::size_t k = 0; k < c.mag.size(); ++k) {
                double d = c.freq[k] - centroid;
                num += d * d * d * d * c.mag[k];
                den += c.mag[k];
            }
            return num / den / (spread * spread * spread * spread);
        }
        case Kind::SpectralPositiveTurning: {
            int count = 0;
            for (std::size_t k = 1; k + 1 < c.mag.size(); ++k)
                if (c.mag[k] > c.mag[k - 1] && c.mag[k] > c.mag[k + 1]) ++count;
            return count;
        }
        case Kind::SpectralRollOff: {
            std::vector<double> p(c.mag.size());
            for (std::size_t k = 0; k < c.mag.size(); ++k) p[k] = c.mag[k] * c.mag[k];
            return cumulative_threshold_freq(c.freq, p, 0.95);
        }
        case Kind::SpectralRollOn: {
            std::vector<double> p(c.mag.size());
            for (std::size_t k = 0; k < c.mag.size(); ++k) p[k] = c.mag[k] * c.mag[k];
            return cumulative_threshold_freq(c.freq, p, 0.05);
        }
        case Kind::SpectralSkewness: {
            double centroid = spectral_moment_centroid(c);
            double spread = spectral_spread(c, centroid);
            if (spread <= 0.0) return std::numeric_limits<double>::quiet_NaN();
            double num = 0.0, den = 0.0;
            for (std::size_t k = 0; k < c.mag.size(); ++k) {
                double d = c.freq[k] - centroid;
                num += d * d * d * c.mag[k];
                den += c.mag[k];
            }
            return num / den / (spread * spread * spread);
        }
        case Kind::SpectralSlope:
            return linreg_slope(c.freq, c.mag);
        case Kind::SpectralSpread:
            return spectral_spread(c, spectral_moment_centroid(c));
        case Kind::SpectralVariation: {
            double num = 0.0, da = 0.0, db = 0.0;
            for (std::size_t k = 0; k + 1 < c.mag.size(); ++k) {
                num += c.mag[k] * c.mag[k + 1];
                da += c.mag[k] * c.mag[k];
                db += c.mag[k + 1] * c.mag[k + 1];
            }
            if (da <= 0.0 || db <= 0.0) return std::numeric_limits<double>::quiet_NaN();
            return 1.0 - num / std::sqrt(da * db);
        }
        case Kind::WaveletAbsMean:
            return c.w_absmean[static_cast<std::size_t>(def.param)];
        case Kind::WaveletEnergy:
            return c.w_energy[static_cast<std::size_t>(def.param)];
        case Kind::WaveletEntropy:
            return c.wavelet_degenerate ? std::numeric_limits<double>::quiet_NaN()
                                        : c.wavelet_entropy;
        case Kind::WaveletStd:
            return c.w_std[static_cast<std::size_t>(def.param)];
        case Kind::WaveletVariance:
            return c.w_var[static_cast<std::size_t>(def.param)];
        case Kind::Ecdf:
            return static_cast<double>(def.param + 1) / static_cast<double>(n);
        case Kind::EcdfPercentile: {
            double p = def.param == 0 ? 0.2 : 0.8;
            for (std::size_t i = 0; i < n; ++i)
                if (static_cast<double>(i + 1) / static_cast<double>(n) >= p)
                    return c.sorted[i];
            return c.sorted.back();
        }
        case Kind::EcdfPercentileCount: {
            double p = def.param == 0 ? 0.2 : 0.8;
            double v = c.sorted.back();
            for (std::size_t i = 0; i < n; ++i)
                if (static_cast<double>(i + 1) / static_cast<double>(n) >= p) {
                    v = c.sorted[i];
                    break;
                }
            int count = 0;
            for (double s : x)
                if (s <= v) ++count;
            return count;
        }
        case Kind::Histogram:
            return c.hist_counts[static_cast<std::size_t>(def.param)];
        case Kind::InterquartileRange:
            return stats::quantile(x, 0.75) - stats::quantile(x, 0.25);
        case Kind::Kurtosis: {
            double m2 = stats::variance_pop(x);
            if (m2 <= 0.0) return std::numeric_limits<double>::quiet_NaN();
            return stats::kurtosis(x) - 3.0;  // Fisher (excess) convention
        }
        case Kind::Max:
            return c.sorted.back();
        case Kind::Mean:
            return stats::mean(x);
        case Kind::MeanAbsoluteDeviation: {
            double m = stats::mean(x), s = 0.0;
            for (double v : x) s += std::abs(v - m);
            return s / static_cast<double>(n);
        }
        case Kind::Median:
            return stats::median(x);
        case Kind::MedianAbsoluteDeviation: {
            double m = stats::median(x);
            std::vector<double> d(n);
            for (std::size_t i = 0; i < n; ++i) d[i] = std::abs(x[i] - m);
            return stats::median(d);
        }
        case Kind::Min:
            return c.sorted.front();
        case Kind::RootMeanSquare: {
            double s = 0.0;
            for (double v : x) s += v * v;
            return std::sqrt(s / static_cast<double>(n));
        }
        case Kind::Skewness: {
            double m2 = stats::variance_pop(x);
            if (m2 <= 0.0) return std::numeric_limits<double>::quiet_NaN();
            return stats::skewness(x);
        }
        case Kind::StandardDeviation:
            return stats::stddev_pop(x);
        case Kind::Variance:
            return stats::variance_pop(x);
        case Kind::AbsoluteEnergy: {
            double s = 0.0;
            for (double v : x) s += v * v;
            return s;
        }
        case Kind::AreaUnderCurve: {
            double dt = 1.0 / c.fs, s = 0.0;
            for (std::size_t i = 0; i + 1 < n; ++i)
                s += 0.5 * dt * (std::abs(x[i]) + std::abs(x[i + 1]));
            return s;
        }
        case Kind::Autocorrelation: {
            std::span<const double> a = x.subspan(0, n - 1);
            std::span<const double> b = x.subspan(1, n - 1);
            return stats::pearson(a, b);
        }
        case Kind::Centroid: {
            double num = 0.0, den = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                double e = x[i] * x[i];
                num += (static_cast<double>(i) / c.fs) * e;
                den += e;
            }
            if (den <= 0.0) return std::numeric_limits<double>::quiet_NaN();
            return num / den;
        }
        case Kind::Entropy: {
            double h = 0.0;
            for (int count : c.hist_counts) {
                if (count > 0) {
                    double p = static_cast<double>(count) / static_cast<double>(n);
                    h -= p * std::log2(p);
                }
            }
            return h;
        }
        case Kind::MeanAbsoluteDiff: {
            double s = 0.0;
            for (double d : c.diffs) s += std::abs(d);
            return s / static_cast<double>(c.diffs.size());
        }
        case Kind::MeanDiff:
            return stats::mean(c.diffs);
        case Kind::MedianAbsoluteDiff: {
            std::vector<double> ad(c.diffs.size());
            for (std::size_t i = 0; i < ad.size(); ++i) ad[i] = std::abs(c.diffs[i]);
            return stats::median(ad);
        }
        case Kind::MedianDiff:
            return stats::median(c.diffs);
        case Kind::NegativeTurningPoints: {
            int count = 0;
            for (std::size_t i = 1; i + 1 < n; ++i)
                if (x[i] < x[i - 1] && x[i] < x[i + 1]) ++count;
            return count;
        }
        case Kind::NeighbourhoodPeaks: {
            int count = 0;
            const int r = kNeighbourhoodRadius;
            for (std::size_t i = r; i + r < n; ++i) {
                bool peak = true;
                for (int j = -r; j <= r && peak; ++j) {
                    if (j == 0) continue;
                    if (x[static_cast<std::size_t>(static_cast<long>(i) + j)] >= x[i])
                        peak = false;
                }
                if (peak) ++count;
            }
            return count;
        }
        case Kind::PeakToPeak:
            return c.sorted.back() - c.sorted.front();
        case Kind::PositiveTurningPoints: {
            int count = 0;
            for (std::size_t i = 1; i + 1 < n; ++i)
                if (x[i] > x[i - 1] && x[i] > x[i + 1]) ++count;
            return count;
        }
        case Kind::SignalDistance: {
            double s = 0.0;
            for (double d : c.diffs) s += std::sqrt(1.0 + d * d);
            return s;
        }
        case Kind::Slope: {
            std::vector<double> t(n);
            for (std::size_t i = 0; i < n; ++i) t[i] = static_cast<double>(i);
            return linreg_slope(t, x);
        }
        case Kind::SumAbsoluteDiff: {
            double s = 0.0;
            for (double d : c.diffs) s += std::abs(d);
            return s;
        }
        case Kind::TotalEnergy: {
            double s = 0.0;
            for (double v : x) s += v * v;
            double duration = static_cast<double>(n - 1) / c.fs;
            return duration > 0 ? s / duration : 0.0;
        }
        case Kind::ZeroCrossingRate: {
            int count = 0;
            auto sgn = [](double v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); };
            for (std::size_t i = 0; i + 1 < n; ++i)
                if (sgn(x[i]) != sgn(x[i + 1])) ++count;
            return static_cast<double>(count) / static_cast<double>(n - 1);
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

std::string to_string(Domain d) {
    switch (d) {
        case Domain::Spectral: return "Spectral";
        case Domain::Wavelet: return "Wavelet";
        case Domain::Statistical: return "Statistical";
        case Domain::Temporal: return "Temporal";
    }
    return "?";
}

const FeatureCatalog& FeatureCatalog::standard() {
    static const FeatureCatalog catalog = [] {
        FeatureCatalog cat;
        auto add = [&cat](std::string name, Domain d, Kind k, int param = 0) {
            cat.defs_.push_back({std::move(name), d, k, param});
        };
        for (int i = 0; i < kFftCoefficients; ++i)
            add("FFT mean coefficient_" + std::to_string(i), Domain::Spectral,
                Kind::FftMeanCoefficient, i);
        add("Fundamental frequency", Domain::Spectral, Kind::FundamentalFrequency);
        add("Human range energy", Domain::Spectral, Kind::HumanRangeEnergy);
        for (int i = 0; i <= kLpcOrder; ++i)
            add("LPCC_" + std::to_string(i), Domain::Spectral, Kind::Lpcc, i);
        for (int i = 0; i < kMfccCount; ++i)
            add("MFCC_" + std::to_string(i), Domain::Spectral, Kind::Mfcc, i);
        add("Maximum power spectrum", Domain::Spectral, Kind::MaxPowerSpectrum);
        add("Maximum frequency", Domain::Spectral, Kind::MaxFrequency);
        add("Median frequency", Domain::Spectral, Kind::MedianFrequency);
        add("Power bandwidth", Domain::Spectral, Kind::PowerBandwidth);
        add("Spectral centroid", Domain::Spectral, Kind::SpectralCentroid);
        add("Spectral decrease", Domain::Spectral, Kind::SpectralDecrease);
        add("Spectral distance", Domain::Spectral, Kind::SpectralDistance);
        add("Spectral entropy", Domain::Spectral, Kind::SpectralEntropy);
        add("Spectral kurtosis", Domain::Spectral, Kind::SpectralKurtosis);
        add("Spectral positive turning points", Domain::Spectral,
            Kind::SpectralPositiveTurning);
        add("Spectral roll-off", Domain::Spectral, Kind::SpectralRollOff);
        add("Spectral roll-on", Domain::Spectral, Kind::SpectralRollOn);
        add("Spectral skewness", Domain::Spectral, Kind::SpectralSkewness);
        add("Spectral slope", Domain::Spectral, Kind::SpectralSlope);
        add("Spectral spread", Domain::Spectral, Kind::SpectralSpread);
        add("Spectral variation", Domain::Spectral, Kind::SpectralVariation);
        for (int i = 0; i < kWaveletScales; ++i)
            add("Wavelet absolute mean_" + std::to_string(i), Domain::Wavelet,
                Kind::WaveletAbsMean, i);
        for (int i = 0; i < kWaveletScales; ++i)
            add("Wavelet energy_" + std::to_string(i), Domain::Wavelet,
                Kind::WaveletEnergy, i);
        add("Wavelet entropy", Domain::Wavelet, Kind::WaveletEntropy);
        for (int i = 0; i < kWaveletScales; ++i)
            add("Wavelet standard deviation_" + std::to_string(i), Domain::Wavelet,
                Kind::WaveletStd, i);
        for (int i = 0; i < kWaveletScales; ++i)
            add("Wavelet variance_" + std::to_string(i), Domain::Wavelet,
                Kind::WaveletVariance, i);
        for (int i = 0; i < 10; ++i)
            add("ECDF_" + std::to_string(i), Domain::Statistical, Kind::Ecdf, i);
        for (int i = 0; i < 2; ++i)
            add("ECDF Percentile_" + std::to_string(i), Domain::Statistical,
                Kind::EcdfPercentile, i);
        for (int i = 0; i < 2; ++i)
            add("ECDF Percentile Count_" + std::to_string(i), Domain::Statistical,
                Kind::EcdfPercentileCount, i);
        for (int i = 0; i < kHistogramBins; ++i)
            add("Histogram_" + std::to_string(i), Domain::Statistical,
                Kind::Histogram, i);
        add("Interquartile range", Domain::Statistical, Kind::InterquartileRange);
        add("Kurtosis", Domain::Statistical, Kind::Kurtosis);
        add("Max", Domain::Statistical, Kind::Max);
        add("Mean", Domain::Statistical, Kind::Mean);
        add("Mean absolute deviation", Domain::Statistical,
            Kind::MeanAbsoluteDeviation);
        add("Median", Domain::Statistical, Kind::Median);
        add("Median absolute deviation", Domain::Statistical,
            Kind::MedianAbsoluteDeviation);
        add("Min", Domain::Statistical, Kind::Min);
        add("Root mean square", Domain::Statistical, Kind::RootMeanSquare);
        add("Skewness", Domain::Statistical, Kind::Skewness);
        add("Standard deviation", Domain::Statistical, Kind::StandardDeviation);
        add("Variance", Domain::Statistical, Kind::Variance);
        add("Absolute energy", Domain::Temporal, Kind::AbsoluteEnergy);
        add("Area under the curve", Domain::Temporal, Kind::AreaUnderCurve);
        add("Autocorrelation", Domain::Temporal, Kind::Autocorrelation);
        add("Centroid", Domain::Temporal, Kind::Centroid);
        add("Entropy", Domain::Temporal, Kind::Entropy);
        add("Mean absolute diff", Domain::Temporal, Kind::MeanAbsoluteDiff);
        add("Mean diff", Domain::Temporal, Kind::MeanDiff);
        add("Median absolute diff", Domain::Temporal, Kind::MedianAbsoluteDiff);
        add("Median diff", Domain::Temporal, Kind::MedianDiff);
        add("Negative turning points", Domain::Temporal,
            Kind::NegativeTurningPoints);
        add("Neighbourhood peaks", Domain::Temporal, Kind::NeighbourhoodPeaks);
        add("Peak to peak distance", Domain::Temporal, Kind::PeakToPeak);
        add("Positive turning points", Domain::Temporal,
            Kind::PositiveTurningPoints);
        add("Signal distance", Domain::Temporal, Kind::SignalDistance);
        add("Slope", Domain::Temporal, Kind::Slope);
        add("Sum absolute diff", Domain::Temporal, Kind::SumAbsoluteDiff);
        add("Total energy", Domain::Temporal, Kind::TotalEnergy);
        add("Zero crossing rate", Domain::Temporal, Kind::ZeroCrossingRate);
        return cat;
    }();
    return catalog;
}

void FeatureCatalog::save_json(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot write catalog: " + path.string());
    out << "[\n";
    for (std::size_t i = 0; i < defs_.size(); ++i) {
        const auto& d = defs_[i];
        out << "  {\"name\": \"" << d.name << "\", \"domain\": \""
            << to_string(d.domain) << "\", \"param\": " << d.param << "}"
            << (i + 1 < defs_.size() ? ",\n" : "\n");
    }
    out << "]\n";
}

ExtractionResult extract_features(std::span<const double> series,
                                  const FeatureCatalog& catalog,
                                  double sampling_rate_hz) {
    if (series.size() < 16) throw Error("extract_features: series shorter than 16");
    Context c;
    c.x = series;
    c.fs = sampling_rate_hz;
    c.n = series.size();
    c.sorted.assign(series.begin(), series.end());
    std::sort(c.sorted.begin(), c.sorted.end());
    c.diffs.resize(c.n - 1);
    for (std::size_t i = 0; i + 1 < c.n; ++i) c.diffs[i] = series[i + 1] - series[i];
    compute_spectra(c);
    compute_lpcc(c);
    compute_mfcc(c);
    compute_wavelets(c);
    compute_histogram(c);

    ExtractionResult res;
    res.values.reserve(catalog.size());
    res.imputed.reserve(catalog.size());
    for (const auto& def : catalog.defs()) {
        double v = compute_one(c, def);
        bool bad = !std::isfinite(v);
        res.values.push_back(bad ? 0.0 : v);
        res.imputed.push_back(bad);
    }
    return res;
}

dataio::FeatureMatrix extract_all(const std::vector<IndexSeries>& series,
                                  const FeatureCatalog& catalog,
                                  const std::vector<Rating>& ratings,
                                  std::vector<std::string>* warnings) {
    std::map<std::pair<int, int>, int> score_by_key;
    for (const auto& r : ratings)
        score_by_key[{r.subject_id, static_cast<int>(r.condition)}] = r.score;

    dataio::FeatureMatrix fm;
    for (const auto& d : catalog.defs()) fm.columns.push_back(d.name);

    std::vector<std::vector<double>> rows;
    for (const auto& s : series) {
        auto it = score_by_key.find({s.subject_id, static_cast<int>(s.condition)});
        if (it == score_by_key.end()) {
            if (warnings)
                warnings->push_back("no rating for subject " +
                                    std::to_string(s.subject_id) + " " +
                                    to_string(s.condition) + " (" + s.index_id +
                                    "); dropped");
            continue;
        }
        auto cls = map_rating_to_class(it->second);
        if (!cls) {
            if (warnings)
                warnings->push_back("neutral rating (5) for subject " +
                                    std::to_string(s.subject_id) + " " +
                                    to_string(s.condition) + "; dropped");
            continue;
        }
        auto res = extract_features(s.values, catalog);
        fm.rows.push_back({s.subject_id, s.condition, s.index_id, false});
        fm.labels.push_back(*cls);
        rows.push_back(std::move(res.values));
    }
    if (warnings && rows.empty() && !series.empty())
        warnings->push_back("all instances dropped; empty feature matrix");

    fm.values.resize(static_cast<long>(rows.size()),
                     static_cast<long>(fm.columns.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < fm.columns.size(); ++c)
            fm.values(static_cast<long>(r), static_cast<long>(c)) = rows[r][c];
    return fm;
}

}  // namespace mwl::featex
