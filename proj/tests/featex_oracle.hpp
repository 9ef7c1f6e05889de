// Brute-force reference implementations of every catalog feature, used by
// both the unit and acceptance suites. Spectral quantities are computed by
// direct summation over an O(n^2) DFT; nothing here shares code with the
// library beyond the catalog's dispatch metadata (Kind / param).
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "mwl/featex.hpp"
#include "oracles.hpp"

namespace featex_oracle {

using mwl::featex::FeatureDef;
using mwl::featex::Kind;

inline double quantile_linear(std::vector<double> s, double q) {
    std::sort(s.begin(), s.end());
    double pos = q * double(s.size() - 1);
    std::size_t lo = std::size_t(std::floor(pos));
    std::size_t hi = std::size_t(std::ceil(pos));
    return s[lo] + (pos - double(lo)) * (s[hi] - s[lo]);
}

inline double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct Spectrum {
    std::vector<double> freq, mag;  // one-sided, n-point transform
};

inline Spectrum one_sided(std::span<const double> x, double fs) {
    auto spec = oracle::dft(x);
    Spectrum s;
    for (std::size_t k = 0; k <= x.size() / 2; ++k) {
        s.freq.push_back(double(k) * fs / double(x.size()));
        s.mag.push_back(std::abs(spec[k]));
    }
    return s;
}

inline double cum_threshold(const std::vector<double>& freq,
                            const std::vector<double>& w, double frac) {
    double total = 0.0;
    for (double v : w) total += v;
    if (total <= 0.0) return 0.0;
    double cum = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        cum += w[k];
        if (cum >= frac * total) return freq[k];
    }
    return freq.back();
}

inline std::vector<double> ricker(int points, double a) {
    std::vector<double> w(static_cast<std::size_t>(points));
    double norm = 2.0 / (std::sqrt(3.0 * a) * std::pow(oracle::kPi, 0.25));
    for (int i = 0; i < points; ++i) {
        double t = double(i) - double(points - 1) / 2.0;
        w[std::size_t(i)] = norm * (1.0 - (t / a) * (t / a)) *
                            std::exp(-t * t / (2.0 * a * a));
    }
    return w;
}

inline std::vector<double> conv_same(std::span<const double> x,
                                     const std::vector<double>& w) {
    std::vector<double> full(x.size() + w.size() - 1, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < w.size(); ++j) full[i + j] += x[i] * w[j];
    std::size_t start = (w.size() - 1) / 2;
    return {full.begin() + long(start), full.begin() + long(start + x.size())};
}

inline std::vector<double> wavelet_coeffs(std::span<const double> x, int scale1) {
    double a = double(scale1);
    int points = int(std::min<std::size_t>(std::size_t(10.0 * a), x.size()));
    return conv_same(x, ricker(points, a));
}

inline std::vector<int> histogram10(std::span<const double> x) {
    std::vector<int> h(10, 0);
    double lo = *std::min_element(x.begin(), x.end());
    double hi = *std::max_element(x.begin(), x.end());
    if (hi <= lo) {
        h[0] = int(x.size());
        return h;
    }
    for (double v : x) {
        int b = int((v - lo) / ((hi - lo) / 10.0));
        h[std::size_t(std::clamp(b, 0, 9))]++;
    }
    return h;
}

inline std::vector<double> lpcc_ref(std::span<const double> x) {
    const int p = 12;
    std::vector<double> r(p + 1, 0.0);
    for (int j = 0; j <= p; ++j)
        for (std::size_t i = 0; i + std::size_t(j) < x.size(); ++i)
            r[std::size_t(j)] += x[i] * x[i + std::size_t(j)];
    if (r[0] <= 0.0) return {};
    std::vector<double> a(p + 1, 0.0);
    double err = r[0];
    for (int i = 1; i <= p; ++i) {
        double acc = r[std::size_t(i)];
        for (int j = 1; j < i; ++j) acc -= a[std::size_t(j)] * r[std::size_t(i - j)];
        double k = acc / err;
        std::vector<double> an = a;
        an[std::size_t(i)] = k;
        for (int j = 1; j < i; ++j)
            an[std::size_t(j)] = a[std::size_t(j)] - k * a[std::size_t(i - j)];
        a = an;
        err *= (1.0 - k * k);
        if (err <= 0.0) {
            err = 1e-30;
            break;
        }
    }
    std::vector<double> c(p + 1, 0.0);
    c[0] = std::log(std::max(err, 1e-30));
    for (int m = 1; m <= p; ++m) {
        double cm = a[std::size_t(m)];
        for (int k = 1; k < m; ++k)
            cm += (double(k) / m) * c[std::size_t(k)] * a[std::size_t(m - k)];
        c[std::size_t(m)] = cm;
    }
    return c;
}

inline std::vector<double> mfcc_ref(std::span<const double> x, double fs) {
    auto s = one_sided(x, fs);
    auto mel = [](double f) { return 2595.0 * std::log10(1.0 + f / 700.0); };
    auto imel = [](double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); };
    const int nf = 26;
    double mmax = mel(fs / 2.0);
    std::vector<double> centers(nf + 2);
    for (int j = 0; j < nf + 2; ++j) centers[std::size_t(j)] = imel(mmax * j / (nf + 1));
    std::vector<double> log_e(nf);
    for (int j = 1; j <= nf; ++j) {
        double lo = centers[std::size_t(j - 1)], mid = centers[std::size_t(j)],
               hi = centers[std::size_t(j + 1)];
        double e = 0.0;
        for (std::size_t k = 0; k < s.freq.size(); ++k) {
            double f = s.freq[k], w = 0.0;
            if (f > lo && f < mid) w = (f - lo) / (mid - lo);
            else if (f >= mid && f < hi) w = (hi - f) / (hi - mid);
            e += s.mag[k] * s.mag[k] * w;
        }
        log_e[std::size_t(j - 1)] = std::log(std::max(e, 1e-30));
    }
    std::vector<double> out(12);
    for (int i = 0; i < 12; ++i) {
        double v = 0.0;
        for (int j = 0; j < nf; ++j)
            v += log_e[std::size_t(j)] *
                 std::cos(oracle::kPi * i * (2.0 * j + 1.0) / (2.0 * nf));
        out[std::size_t(i)] = v;
    }
    return out;
}

/// Reference value for one catalog entry; nullopt marks a cell the library
/// is expected to impute (non-finite result).
inline std::optional<double> value(const FeatureDef& def,
                                   std::span<const double> x, double fs) {
    const std::size_t n = x.size();
    std::vector<double> sorted(x.begin(), x.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> diffs(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) diffs[i] = x[i + 1] - x[i];

    auto moments = [&] {
        double m = oracle::mean(x), m2 = 0.0, m3 = 0.0, m4 = 0.0;
        for (double v : x) {
            double d = v - m;
            m2 += d * d;
            m3 += d * d * d;
            m4 += d * d * d * d;
        }
        m2 /= double(n);
        m3 /= double(n);
        m4 /= double(n);
        return std::array<double, 4>{m, m2, m3, m4};
    };

    switch (def.kind) {
        case Kind::FftMeanCoefficient: {
            std::vector<double> padded(256, 0.0);
            for (std::size_t i = 0; i < std::min<std::size_t>(n, 256); ++i)
                padded[i] = x[i];
            auto spec = oracle::dft(padded);
            return std::abs(spec[std::size_t(def.param)]);
        }
        case Kind::FundamentalFrequency: {
            auto s = one_sided(x, fs);
            std::size_t best = 1;
            for (std::size_t k = 2; k < s.mag.size(); ++k)
                if (s.mag[k] > s.mag[best]) best = k;
            return s.freq[best];
        }
        case Kind::HumanRangeEnergy: {
            auto s = one_sided(x, fs);
            double band = 0.0, total = 0.0;
            for (std::size_t k = 1; k < s.mag.size(); ++k) {
                total += s.mag[k] * s.mag[k];
                if (s.freq[k] >= 0.6 && s.freq[k] <= 2.5) band += s.mag[k] * s.mag[k];
            }
            return total > 0 ? band / total : 0.0;
        }
        case Kind::Lpcc: {
            auto c = lpcc_ref(x);
            if (c.empty()) return std::nullopt;
            return c[std::size_t(def.param)];
        }
        case Kind::Mfcc:
            return mfcc_ref(x, fs)[std::size_t(def.param)];
        case Kind::MaxPowerSpectrum: {
            auto p = oracle::periodogram(x, fs);
            return *std::max_element(p.power.begin(), p.power.end());
        }
        case Kind::MaxFrequency: {
            auto s = one_sided(x, fs);
            return cum_threshold(s.freq, s.mag, 0.95);
        }
        case Kind::MedianFrequency: {
            auto s = one_sided(x, fs);
            return cum_threshold(s.freq, s.mag, 0.5);
        }
        case Kind::PowerBandwidth: {
            auto p = oracle::periodogram(x, fs);
            double mx = *std::max_element(p.power.begin(), p.power.end());
            if (mx <= 0.0) return 0.0;
            std::size_t first = p.power.size(), last = 0;
            for (std::size_t k = 0; k < p.power.size(); ++k)
                if (p.power[k] >= 0.5 * mx) {
                    first = std::min(first, k);
                    last = k;
                }
            return p.freq[last] - p.freq[first];
        }
        case Kind::SpectralCentroid: {
            auto s = one_sided(x, fs);
            double num = 0.0, den = 0.0;
            for (std::size_t k = 0; k < s.mag.size(); ++k) {
                num += s.freq[k] * s.mag[k];
                den += s.mag[k];
            }
            return den > 0 ? num / den : 0.0;
        }
        case Kind::SpectralDecrease: {
            auto s = one_sided(x, fs);
            double num = 0.0, den = 0.0;
            for (std::size_t k = 1; k < s.mag.size(); ++k) {
                num += (s.mag[k] - s.mag[0]) / double(k);
                den += s.mag[k];
            }
            return den > 0 ? num / den : 0.0;
        }
        case Kind::SpectralDistance: {
            auto s = one_sided(x, fs);
            std::vector<double> cum(s.mag.size());
            double acc = 0.0;
            for (std::size_t k = 0; k < s.mag.size(); ++k) {
                acc += s.mag[k];
                cum[k] = acc;
            }
            std::size_t last = cum.size() - 1;
            double total = 0.0;
            for (std::size_t k = 0; k < cum.size(); ++k) {
                double line =
                    cum[0] + (cum[last] - cum[0]) * (last ? double(k) / last : 0.0);
                total += cum[k] - line;
            }
            return total;
        }
        case Kind::SpectralEntropy: {
            auto s = one_sided(x, fs);
            double total = 0.0;
            for (std::size_t k = 1; k < s.mag.size(); ++k) total += s.mag[k] * s.mag[k];
            if (total <= 0.0) return 0.0;
            double h = 0.0;
            for (std::size_t k = 1; k < s.mag.size(); ++k) {
                double p = s.mag[k] * s.mag[k] / total;
                if (p > 0.0) h -= p * std::log2(p);
            }
            std::size_t nb = s.mag.size() - 1;
            return nb > 1 ? h / std::log2(double(nb)) : 0.0;
        }
        case Kind::SpectralKurtosis:
        case Kind::SpectralSkewness: {
            auto s = one_sided(x, fs);
            double num = 0.0, den = 0.0;
            for (std::size_t k = 0; k < s.mag.size(); ++k) {
                num += s.freq[k] * s.mag[k];
                den += s.mag[k];
            }
            if (den <= 0.0) return std::nullopt;
            double centroid = num / den;
            double v = 0.0;
            for (std::size_t k = 0; k < s.mag.size(); ++k)
                v += (s.freq[k] - centroid) * (s.freq[k] - centroid) * s.mag[k];
            double spread = std::sqrt(v / den);
            if (spread <= 0.0) return std::nullopt;
            int order = def.kind == Kind::SpectralKurtosis ? 4 : 3;
            double m = 0.0;
            for (std::size_t k = 0; k < s.mag.size(); ++k)
                m += std::pow(s.freq[k] - centroid, order) * s.mag[k];
            return m / den / std::pow(spread, order);
        }
        case Kind::SpectralPositiveTurning: {
            auto s = one_sided(x, fs);
            int count = 0;
            for (std::size_t k = 1; k + 1 < s.mag.size(); ++k)
                if (s.mag[k] > s.mag[k - 1] && s.mag[k] > s.mag[k + 1]) ++count;
            return double(count);
        }
        case Kind::SpectralRollOff:
        case Kind::SpectralRollOn: {
            auto s = one_sided(x, fs);
            std::vector<double> p(s.mag.size());
            for (std::size_t k = 0; k < p.size(); ++k) p[k] = s.mag[k] * s.mag[k];
            return cum_threshold(s.freq, p,
                                 def.kind == Kind::SpectralRollOff ? 0.95 : 0.05);
        }
        case Kind::SpectralSlope: {
            auto s = one_sided(x, fs);
            double mx = oracle::mean(s.freq), my = oracle::mean(s.mag);
            double num = 0.0, den = 0.0;
            for (std::size_t k = 0; k < s.freq.size(); ++k) {
                num += (s.freq[k] - mx) * (s.mag[k] - my);
                den += (s.freq[k] - mx) * (s.freq[k] - mx);
            }
            return den > 0 ? num / den : 0.0;
        }
        case Kind::SpectralSpread: {
            auto s = one_sided(x, fs);
            double num = 0.0, den = 0.0;
            for (std::size_t k = 0; k < s.mag.size(); ++k) {
                num += s.freq[k] * s.mag[k];
                den += s.mag[k];
            }
            if (den <= 0.0) return 0.0;
            double centroid = num / den;
            double v = 0.0;
            for (std::size_t k = 0; k < s.mag.size(); ++k)
                v += (s.freq[k] - centroid) * (s.freq[k] - centroid) * s.mag[k];
            return std::sqrt(v / den);
        }
        case Kind::SpectralVariation: {
            auto s = one_sided(x, fs);
            double num = 0.0, da = 0.0, db = 0.0;
            for (std::size_t k = 0; k + 1 < s.mag.size(); ++k) {
                num += s.mag[k] * s.mag[k + 1];
                da += s.mag[k] * s.mag[k];
                db += s.mag[k + 1] * s.mag[k + 1];
            }
            if (da <= 0.0 || db <= 0.0) return std::nullopt;
            return 1.0 - num / std::sqrt(da * db);
        }
        case Kind::WaveletAbsMean: {
            auto c = wavelet_coeffs(x, def.param + 1);
            double s = 0.0;
            for (double v : c) s += std::abs(v);
            return s / double(c.size());
        }
        case Kind::WaveletEnergy: {
            auto c = wavelet_coeffs(x, def.param + 1);
            double s = 0.0;
            for (double v : c) s += v * v;
            return s / double(c.size());
        }
        case Kind::WaveletEntropy: {
            std::vector<double> energy(9);
            double total = 0.0;
            for (int sc = 1; sc <= 9; ++sc) {
                auto c = wavelet_coeffs(x, sc);
                double e = 0.0;
                for (double v : c) e += v * v;
                e /= double(c.size());
                energy[std::size_t(sc - 1)] = e;
                total += e;
            }
            if (total <= 0.0) return std::nullopt;
            double h = 0.0;
            for (double e : energy) {
                double p = e / total;
                if (p > 0.0) h -= p * std::log(p);
            }
            return h;
        }
        case Kind::WaveletStd:
        case Kind::WaveletVariance: {
            auto c = wavelet_coeffs(x, def.param + 1);
            double m = oracle::mean(c), v = 0.0;
            for (double e : c) v += (e - m) * (e - m);
            v /= double(c.size());
            return def.kind == Kind::WaveletStd ? std::sqrt(v) : v;
        }
        case Kind::Ecdf:
            return double(def.param + 1) / double(n);
        case Kind::EcdfPercentile:
        case Kind::EcdfPercentileCount: {
            double p = def.param == 0 ? 0.2 : 0.8;
            double v = sorted.back();
            for (std::size_t i = 0; i < n; ++i)
                if (double(i + 1) / double(n) >= p) {
                    v = sorted[i];
                    break;
                }
            if (def.kind == Kind::EcdfPercentile) return v;
            int count = 0;
            for (double s : x)
                if (s <= v) ++count;
            return double(count);
        }
        case Kind::Histogram:
            return double(histogram10(x)[std::size_t(def.param)]);
        case Kind::InterquartileRange:
            return quantile_linear(sorted, 0.75) - quantile_linear(sorted, 0.25);
        case Kind::Kurtosis: {
            auto m = moments();
            if (m[1] <= 0.0) return std::nullopt;
            return m[3] / (m[1] * m[1]) - 3.0;
        }
        case Kind::Max:
            return sorted.back();
        case Kind::Mean:
            return oracle::mean(x);
        case Kind::MeanAbsoluteDeviation: {
            double m = oracle::mean(x), s = 0.0;
            for (double v : x) s += std::abs(v - m);
            return s / double(n);
        }
        case Kind::Median:
            return median_of({x.begin(), x.end()});
        case Kind::MedianAbsoluteDeviation: {
            double m = median_of({x.begin(), x.end()});
            std::vector<double> d(n);
            for (std::size_t i = 0; i < n; ++i) d[i] = std::abs(x[i] - m);
            return median_of(d);
        }
        case Kind::Min:
            return sorted.front();
        case Kind::RootMeanSquare: {
            double s = 0.0;
            for (double v : x) s += v * v;
            return std::sqrt(s / double(n));
        }
        case Kind::Skewness: {
            auto m = moments();
            if (m[1] <= 0.0) return std::nullopt;
            return m[2] / std::pow(m[1], 1.5);
        }
        case Kind::StandardDeviation: {
            auto m = moments();
            return std::sqrt(m[1]);
        }
        case Kind::Variance:
            return moments()[1];
        case Kind::AbsoluteEnergy: {
            double s = 0.0;
            for (double v : x) s += v * v;
            return s;
        }
        case Kind::AreaUnderCurve: {
            double s = 0.0;
            for (std::size_t i = 0; i + 1 < n; ++i)
                s += 0.5 * (1.0 / fs) * (std::abs(x[i]) + std::abs(x[i + 1]));
            return s;
        }
        case Kind::Autocorrelation: {
            double ma = 0.0, mb = 0.0;
            for (std::size_t i = 0; i + 1 < n; ++i) ma += x[i];
            for (std::size_t i = 1; i < n; ++i) mb += x[i];
            ma /= double(n - 1);
            mb /= double(n - 1);
            double num = 0.0, da = 0.0, db = 0.0;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                num += (x[i] - ma) * (x[i + 1] - mb);
                da += (x[i] - ma) * (x[i] - ma);
                db += (x[i + 1] - mb) * (x[i + 1] - mb);
            }
            if (da <= 0.0 || db <= 0.0) return 0.0;
            return num / std::sqrt(da * db);
        }
        case Kind::Centroid: {
            double num = 0.0, den = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                num += (double(i) / fs) * x[i] * x[i];
                den += x[i] * x[i];
            }
            if (den <= 0.0) return std::nullopt;
            return num / den;
        }
        case Kind::Entropy: {
            double h = 0.0;
            for (int c : histogram10(x))
                if (c > 0) {
                    double p = double(c) / double(n);
                    h -= p * std::log2(p);
                }
            return h;
        }
        case Kind::MeanAbsoluteDiff: {
            double s = 0.0;
            for (double d : diffs) s += std::abs(d);
            return s / double(diffs.size());
        }
        case Kind::MeanDiff:
            return oracle::mean(diffs);
        case Kind::MedianAbsoluteDiff: {
            std::vector<double> ad(diffs.size());
            for (std::size_t i = 0; i < ad.size(); ++i) ad[i] = std::abs(diffs[i]);
            return median_of(ad);
        }
        case Kind::MedianDiff:
            return median_of(diffs);
        case Kind::NegativeTurningPoints: {
            int count = 0;
            for (std::size_t i = 1; i + 1 < n; ++i)
                if (x[i] < x[i - 1] && x[i] < x[i + 1]) ++count;
            return double(count);
        }
        case Kind::NeighbourhoodPeaks: {
            int count = 0;
            for (std::size_t i = 10; i + 10 < n; ++i) {
                bool peak = true;
                for (int j = -10; j <= 10; ++j) {
                    if (j == 0) continue;
                    if (x[std::size_t(long(i) + j)] >= x[i]) {
                        peak = false;
                        break;
                    }
                }
                if (peak) ++count;
            }
            return double(count);
        }
        case Kind::PeakToPeak:
            return sorted.back() - sorted.front();
        case Kind::PositiveTurningPoints: {
            int count = 0;
            for (std::size_t i = 1; i + 1 < n; ++i)
                if (x[i] > x[i - 1] && x[i] > x[i + 1]) ++count;
            return double(count);
        }
        case Kind::SignalDistance: {
            double s = 0.0;
            for (double d : diffs) s += std::sqrt(1.0 + d * d);
            return s;
        }
        case Kind::Slope: {
            double mt = double(n - 1) / 2.0, my = oracle::mean(x);
            double num = 0.0, den = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                num += (double(i) - mt) * (x[i] - my);
                den += (double(i) - mt) * (double(i) - mt);
            }
            return num / den;
        }
        case Kind::SumAbsoluteDiff: {
            double s = 0.0;
            for (double d : diffs) s += std::abs(d);
            return s;
        }
        case Kind::TotalEnergy: {
            double s = 0.0;
            for (double v : x) s += v * v;
            return s * fs / double(n - 1);
        }
        case Kind::ZeroCrossingRate: {
            auto sgn = [](double v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); };
            int count = 0;
            for (std::size_t i = 0; i + 1 < n; ++i)
                if (sgn(x[i]) != sgn(x[i + 1])) ++count;
            return double(count) / double(n - 1);
        }
    }
    return std::nullopt;
}

}  // namespace featex_oracle
