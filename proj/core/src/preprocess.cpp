#include "mwl/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "mwl/dsp.hpp"
#include "mwl/stats.hpp"

namespace mwl::preprocess {

EegRecording average_rereference(const EegRecording& rec) {
    if (rec.n_channels() < 2)
        throw Error("average re-reference needs at least 2 channels");
    EegRecording out = rec;
    Vector row_means = rec.samples.rowwise().mean();
    out.samples = rec.samples.colwise() - row_means;
    return out;
}

EegRecording highpass_1hz(const EegRecording& rec, int order) {
    if (rec.sampling_rate_hz <= 2)
        throw Error("high-pass at 1 Hz needs sampling rate > 2 Hz");
    EegRecording out = rec;
    auto sections = dsp::butterworth_highpass(order, 1.0, rec.sampling_rate_hz);
    const auto pad = static_cast<std::size_t>(rec.sampling_rate_hz);
    for (int c = 0; c < rec.n_channels(); ++c) {
        std::vector<double> col(rec.samples.col(c).data(),
                                rec.samples.col(c).data() + rec.n_samples());
        auto filtered = dsp::filtfilt(sections, col, pad);
        for (int r = 0; r < rec.n_samples(); ++r) out.samples(r, c) = filtered[r];
    }
    return out;
}

namespace {

// (M)^(-1/2) for a symmetric positive definite M.
Matrix inv_sqrt_sym(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    Vector d = es.eigenvalues();
    for (long i = 0; i < d.size(); ++i) d(i) = 1.0 / std::sqrt(std::max(d(i), 1e-300));
    return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

IcaDecomposition fast_ica(const Matrix& samples, const IcaOptions& opts) {
    const long n = samples.rows();
    const long nch = samples.cols();
    if (n < 2 * nch) throw Error("fast_ica: too few samples for channel count");
    if (opts.n_components > nch)
        throw Error("fast_ica: n_components exceeds channel count");

    IcaDecomposition dec;
    dec.channel_means = samples.colwise().mean();
    Matrix xc = samples.rowwise() - dec.channel_means.transpose();

    // PCA whitening.
    Matrix cov = xc.transpose() * xc / static_cast<double>(n);
    Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
    // Eigenvalues ascending. With n_components unset, truncate to the
    // effective rank: an average re-referenced recording is rank-deficient
    // and whitening across a ~zero eigenvalue explodes numerically.
    const double ev_max = std::max(es.eigenvalues()(nch - 1), 0.0);
    long rank = 0;
    for (long i = 0; i < nch; ++i)
        if (es.eigenvalues()(i) > ev_max * 1e-10) ++rank;
    rank = std::max<long>(rank, 1);
    long ncomp = opts.n_components > 0 ? opts.n_components : rank;
    Matrix evec(nch, ncomp);
    Vector eval(ncomp);
    for (long i = 0; i < ncomp; ++i) {
        evec.col(i) = es.eigenvectors().col(nch - 1 - i);
        eval(i) = std::max(es.eigenvalues()(nch - 1 - i), ev_max * 1e-12 + 1e-300);
    }
    Matrix whiten = eval.cwiseSqrt().cwiseInverse().asDiagonal() *
                    evec.transpose();                      // ncomp x nch
    Matrix dewhiten = evec * eval.cwiseSqrt().asDiagonal();  // nch x ncomp
    Matrix z = xc * whiten.transpose();                     // n x ncomp

    // Symmetric FastICA with tanh contrast.
    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix w(ncomp, ncomp);
    for (long i = 0; i < ncomp; ++i)
        for (long j = 0; j < ncomp; ++j) w(i, j) = gauss(rng);
    w = inv_sqrt_sym(w * w.transpose()) * w;

    dec.converged = false;
    for (int it = 0; it < opts.max_iterations; ++it) {
        Matrix wx = z * w.transpose();          // n x ncomp
        Matrix g = wx.array().tanh().matrix();  // n x ncomp
        Vector gprime_mean =
            (1.0 - g.array().square()).colwise().mean().transpose();
        Matrix w1 = (g.transpose() * z) / static_cast<double>(n) -
                    gprime_mean.asDiagonal() * w;
        w1 = inv_sqrt_sym(w1 * w1.transpose()) * w1;
        double delta = ((w1 * w.transpose()).diagonal().cwiseAbs() -
                        Vector::Ones(ncomp))
                           .cwiseAbs()
                           .maxCoeff();
        w = w1;
        dec.iterations = it + 1;
        if (delta < opts.tolerance) {
            dec.converged = true;
            break;
        }
    }

    dec.unmixing = w * whiten;        // ncomp x nch
    dec.mixing = dewhiten * w.transpose();  // nch x ncomp
    dec.sources = xc * dec.unmixing.transpose();
    return dec;
}

Matrix reconstruct(const IcaDecomposition& dec, const std::set<int>& zeroed) {
    Matrix s = dec.sources;
    for (int c : zeroed) {
        if (c < 0 || c >= s.cols())
            throw Error("reconstruct: component index out of range");
        s.col(c).setZero();
    }
    Matrix x = s * dec.mixing.transpose();
    x.rowwise() += dec.channel_means.transpose();
    return x;
}

double hurst_exponent(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n < 64) throw Error("hurst_exponent: series too short");
    std::vector<double> log_m, log_rs;
    for (std::size_t m = 16; m <= n / 4; m *= 2) {
        std::size_t nblocks = n / m;
        double rs_sum = 0.0;
        std::size_t rs_count = 0;
        for (std::size_t b = 0; b < nblocks; ++b) {
            auto block = x.subspan(b * m, m);
            double mu = stats::mean(block);
            double cum = 0.0, mx = 0.0, mn = 0.0, ss = 0.0;
            for (double v : block) {
                cum += v - mu;
                mx = std::max(mx, cum);
                mn = std::min(mn, cum);
                ss += (v - mu) * (v - mu);
            }
            double sd = std::sqrt(ss / static_cast<double>(m));
            if (sd > 1e-300) {
                rs_sum += (mx - mn) / sd;
                ++rs_count;
            }
        }
        if (rs_count > 0) {
            log_m.push_back(std::log(static_cast<double>(m)));
            log_rs.push_back(std::log(rs_sum / static_cast<double>(rs_count)));
        }
    }
    if (log_m.size() < 2) return 0.5;  // degenerate; treated as noise-like
    double mx = stats::mean(log_m), my = stats::mean(log_rs);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < log_m.size(); ++i) {
        num += (log_m[i] - mx) * (log_rs[i] - my);
        den += (log_m[i] - mx) * (log_m[i] - mx);
    }
    return num / den;
}

ComponentStats component_stats(const IcaDecomposition& dec, double sampling_rate_hz) {
    const long ncomp = dec.sources.cols();
    const long n = dec.sources.rows();
    if (ncomp < 2) throw Error("component_stats: need at least 2 components");

    ComponentStats cs;
    cs.spectral_kurtosis.resize(ncomp);
    cs.slope.resize(ncomp);
    cs.hurst.resize(ncomp);
    cs.gradient_median.resize(ncomp);
    cs.degenerate.assign(ncomp, false);

    const std::size_t seg = std::min<std::size_t>(256, static_cast<std::size_t>(n));
    for (long c = 0; c < ncomp; ++c) {
        std::span<const double> col(dec.sources.col(c).data(),
                                    static_cast<std::size_t>(n));
        if (stats::stddev_pop(col) < 1e-14) {
            cs.degenerate[c] = true;
            cs.spectral_kurtosis(c) = 0.0;
            cs.slope(c) = 0.0;
            cs.hurst(c) = 0.0;
            cs.gradient_median(c) = 0.0;
            continue;
        }
        auto psd = dsp::welch(col, sampling_rate_hz, seg);
        std::vector<double> band_power, log_f, log_p;
        for (std::size_t k = 0; k < psd.freq_hz.size(); ++k) {
            double f = psd.freq_hz[k];
            if (f >= 1.0 && f <= 45.0) {
                double p = std::max(psd.power[k], 1e-30);
                band_power.push_back(p);
                log_f.push_back(std::log10(f));
                log_p.push_back(std::log10(p));
            }
        }
        cs.spectral_kurtosis(c) = stats::kurtosis(band_power);
        double mx = stats::mean(log_f), my = stats::mean(log_p);
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < log_f.size(); ++i) {
            num += (log_f[i] - mx) * (log_p[i] - my);
            den += (log_f[i] - mx) * (log_f[i] - mx);
        }
        cs.slope(c) = den > 0 ? num / den : 0.0;
        cs.hurst(c) = hurst_exponent(col);
        std::vector<double> grad(static_cast<std::size_t>(n) - 1);
        for (long i = 0; i + 1 < n; ++i)
            grad[static_cast<std::size_t>(i)] =
                std::abs(dec.sources(i + 1, c) - dec.sources(i, c));
        cs.gradient_median(c) = stats::median(grad);
    }

    cs.z.resize(ncomp, 4);
    const Vector* cols[4] = {&cs.spectral_kurtosis, &cs.slope, &cs.hurst,
                             &cs.gradient_median};
    for (int s = 0; s < 4; ++s) {
        std::span<const double> v(cols[s]->data(), static_cast<std::size_t>(ncomp));
        double mu = stats::mean(v);
        double sd = stats::stddev_pop(v);
        for (long c = 0; c < ncomp; ++c)
            cs.z(c, s) = (sd > 1e-14 && !cs.degenerate[static_cast<std::size_t>(c)])
                             ? ((*cols[s])(c) - mu) / sd
                             : 0.0;
    }
    return cs;
}

std::set<int> flag_bad_components(const ComponentStats& stats, double threshold) {
    std::set<int> flagged;
    for (long c = 0; c < stats.z.rows(); ++c)
        for (int s = 0; s < 4; ++s)
            if (std::abs(stats.z(c, s)) > threshold) {
                flagged.insert(static_cast<int>(c));
                break;
            }
    return flagged;
}

std::pair<EegRecording, DenoiseReport> denoise(const EegRecording& rec,
                                               const DenoiseOptions& opts) {
    rec.validate();
    EegRecording pre = highpass_1hz(average_rereference(rec), opts.filter_order);
    IcaDecomposition dec = fast_ica(pre.samples, opts.ica);
    DenoiseReport report;
    report.subject_id = rec.subject_id;
    report.condition = rec.condition;
    report.ica_converged = dec.converged;
    report.stats = component_stats(dec, rec.sampling_rate_hz);
    auto flagged = flag_bad_components(report.stats, opts.z_threshold);
    report.removed_components.assign(flagged.begin(), flagged.end());
    EegRecording out = pre;
    out.samples = reconstruct(dec, flagged);
    return {std::move(out), std::move(report)};
}

}  // namespace mwl::preprocess
