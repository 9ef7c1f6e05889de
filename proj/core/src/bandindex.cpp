#include "mwl/bandindex.hpp"

#include <cmath>

#include "mwl/dsp.hpp"

namespace mwl::bandindex {

namespace {
constexpr double kPowerFloor = 1e-12;
}

double band_lo_hz(Band b) { return b == Band::Theta ? 4.0 : 8.0; }
double band_hi_hz(Band b) { return b == Band::Theta ? 8.0 : 12.0; }

const std::vector<ClusterSpec>& canonical_clusters() {
    static const std::vector<ClusterSpec> specs = {
        {"c1-t", Band::Theta, {"AF3", "AF4", "F3", "F4", "F7", "F8"}},
        {"c2-t", Band::Theta, {"F3", "F4"}},
        {"c3-t", Band::Theta, {"F3", "F4", "F7", "F8"}},
        {"c-a", Band::Alpha, {"P7", "P8"}},
    };
    return specs;
}

const std::vector<std::string>& index_ids() {
    static const std::vector<std::string> ids = {
        "c1-t", "c2-t", "c3-t", "c-a",  "at-1",
        "at-2", "at-3", "ta-1", "ta-2", "ta-3"};
    return ids;
}

std::vector<Matrix> segment_windows(const EegRecording& rec, double window_s) {
    const auto win = static_cast<long>(std::lround(rec.sampling_rate_hz * window_s));
    if (win <= 0 || win > rec.samples.rows())
        throw Error("segment_windows: window longer than recording");
    const long count = rec.samples.rows() / win;
    std::vector<Matrix> out;
    out.reserve(static_cast<std::size_t>(count));
    for (long w = 0; w < count; ++w)
        out.push_back(rec.samples.middleRows(w * win, win));
    return out;
}

double band_power(std::span<const double> window, double sampling_rate_hz,
                  double f_lo_hz, double f_hi_hz) {
    if (f_lo_hz < 0 || f_hi_hz > sampling_rate_hz / 2 || f_lo_hz >= f_hi_hz)
        throw Error("band_power: band outside Nyquist range");
    auto psd = dsp::periodogram(window, sampling_rate_hz);
    double sum = 0.0;
    int count = 0;
    for (std::size_t k = 0; k < psd.freq_hz.size(); ++k) {
        if (psd.freq_hz[k] >= f_lo_hz && psd.freq_hz[k] < f_hi_hz) {
            sum += psd.power[k];
            ++count;
        }
    }
    if (count == 0) throw Error("band_power: no frequency bins in band");
    return std::max(sum / count, kPowerFloor);
}

double cluster_power(const Matrix& window, const ClusterSpec& spec,
                     double sampling_rate_hz,
                     const std::vector<std::string>& channel_names) {
    if (spec.electrodes.empty()) throw Error("cluster_power: empty cluster");
    double sum = 0.0;
    for (const auto& e : spec.electrodes) {
        long col = -1;
        for (std::size_t i = 0; i < channel_names.size(); ++i)
            if (channel_names[i] == e) {
                col = static_cast<long>(i);
                break;
            }
        if (col < 0) throw Error("cluster_power: electrode '" + e + "' missing");
        std::span<const double> ch(window.col(col).data(),
                                   static_cast<std::size_t>(window.rows()));
        sum += band_power(ch, sampling_rate_hz, band_lo_hz(spec.band),
                          band_hi_hz(spec.band));
    }
    return sum / static_cast<double>(spec.electrodes.size());
}

std::vector<IndexSeries> compute_indexes(const EegRecording& rec, double window_s) {
    auto windows = segment_windows(rec, window_s);
    const auto& clusters = canonical_clusters();

    std::vector<IndexSeries> out;
    for (const auto& id : index_ids()) {
        IndexSeries s;
        s.index_id = id;
        s.subject_id = rec.subject_id;
        s.condition = rec.condition;
        s.values.reserve(windows.size());
        out.push_back(std::move(s));
    }

    for (const auto& win : windows) {
        double theta[3], alpha = 0.0;
        for (int c = 0; c < 3; ++c)
            theta[c] = cluster_power(win, clusters[static_cast<std::size_t>(c)],
                                     rec.sampling_rate_hz, rec.channel_names);
        alpha = cluster_power(win, clusters[3], rec.sampling_rate_hz,
                              rec.channel_names);
        out[0].values.push_back(theta[0]);
        out[1].values.push_back(theta[1]);
        out[2].values.push_back(theta[2]);
        out[3].values.push_back(alpha);
        for (int k = 0; k < 3; ++k) {
            out[static_cast<std::size_t>(4 + k)].values.push_back(alpha / theta[k]);
            out[static_cast<std::size_t>(7 + k)].values.push_back(theta[k] / alpha);
        }
    }
    return out;
}

}  // namespace mwl::bandindex
