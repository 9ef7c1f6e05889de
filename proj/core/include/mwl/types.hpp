#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mwl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Error type thrown across the library; what() carries a
/// human-readable description including file/row context where relevant.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Condition { Rest, Simkap };

std::string to_string(Condition c);
Condition condition_from_string(const std::string& s);

/// One subject/condition recording: samples x channels, microvolts.
struct EegRecording {
    int subject_id = 0;
    Condition condition = Condition::Rest;
    Matrix samples;  // n_samples x n_channels
    double sampling_rate_hz = 0.0;
    std::vector<std::string> channel_names;

    int n_samples() const { return static_cast<int>(samples.rows()); }
    int n_channels() const { return static_cast<int>(samples.cols()); }
    double duration_s() const {
        return sampling_rate_hz > 0 ? n_samples() / sampling_rate_hz : 0.0;
    }

    /// Column index of a named channel; throws Error if absent.
    int channel_index(const std::string& name) const;

    /// Checks finiteness, unique channel names, shape consistency.
    void validate() const;
};

struct Rating {
    int subject_id = 0;
    Condition condition = Condition::Rest;
    int score = 0;  // 1..9
};

enum class WorkloadClass { Suboptimal, SuperOptimal };

std::string to_string(WorkloadClass c);

/// Scores 1-4 -> Suboptimal, 6-9 -> SuperOptimal, 5 -> nullopt (discarded).
/// Throws Error for scores outside [1, 9].
std::optional<WorkloadClass> map_rating_to_class(int score);

/// One workload-index time series: one value per 1 s window.
struct IndexSeries {
    std::string index_id;  // c1-t, c2-t, c3-t, c-a, at-1..3, ta-1..3
    int subject_id = 0;
    Condition condition = Condition::Rest;
    std::vector<double> values;
};

}  // namespace mwl
