#include "mwl/types.hpp"

#include <cmath>
#include <set>

namespace mwl {

std::string to_string(Condition c) {
    return c == Condition::Rest ? "Rest" : "Simkap";
}

Condition condition_from_string(const std::string& s) {
    if (s == "Rest" || s == "rest" || s == "lo") return Condition::Rest;
    if (s == "Simkap" || s == "simkap" || s == "hi") return Condition::Simkap;
    throw Error("unknown condition: '" + s + "'");
}

std::string to_string(WorkloadClass c) {
    return c == WorkloadClass::Suboptimal ? "Suboptimal" : "SuperOptimal";
}

std::optional<WorkloadClass> map_rating_to_class(int score) {
    if (score < 1 || score > 9)
        throw Error("rating score " + std::to_string(score) + " outside [1, 9]");
    if (score == 5) return std::nullopt;
    return score <= 4 ? WorkloadClass::Suboptimal : WorkloadClass::SuperOptimal;
}

int EegRecording::channel_index(const std::string& name) const {
    for (size_t i = 0; i < channel_names.size(); ++i)
        if (channel_names[i] == name) return static_cast<int>(i);
    throw Error("channel '" + name + "' not present in recording of subject " +
                std::to_string(subject_id));
}

void EegRecording::validate() const {
    if (sampling_rate_hz <= 0) throw Error("sampling rate must be positive");
    if (static_cast<size_t>(samples.cols()) != channel_names.size())
        throw Error("channel name count does not match sample columns");
    std::set<std::string> uniq(channel_names.begin(), channel_names.end());
    if (uniq.size() != channel_names.size())
        throw Error("duplicate channel names");
    if (!samples.allFinite())
        throw Error("non-finite sample values in recording of subject " +
                    std::to_string(subject_id));
}

}  // namespace mwl
