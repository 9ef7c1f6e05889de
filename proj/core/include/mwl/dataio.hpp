#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mwl/types.hpp"

namespace mwl::dataio {

/// Instance-level feature table: one row per (subject, condition, index),
/// named columns, binary class labels, synthetic provenance flag.
struct FeatureMatrix {
    struct RowKey {
        int subject_id = 0;
        Condition condition = Condition::Rest;
        std::string index_id;
        bool synthetic = false;
    };
    std::vector<RowKey> rows;
    std::vector<std::string> columns;
    Matrix values;  // rows.size() x columns.size()
    std::vector<WorkloadClass> labels;

    int n_rows() const { return static_cast<int>(rows.size()); }
    int n_cols() const { return static_cast<int>(columns.size()); }
    int column_index(const std::string& name) const;  // -1 if absent
    void validate() const;
};

struct ManifestEntry {
    std::filesystem::path file;
    int subject_id = 0;
    Condition condition = Condition::Rest;
};

struct DatasetManifest {
    std::filesystem::path root;
    std::vector<ManifestEntry> entries;
    std::filesystem::path ratings_file;
    double sampling_rate_hz = 128.0;
    std::vector<std::string> channel_names;

    void validate() const;  // files exist, (subject, condition) unique
};

/// Manifest JSON schema: see docs/formats.md.
DatasetManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const DatasetManifest& m, const std::filesystem::path& path);

/// Scans a directory for the conventional STEW layout
/// (sub{NN}_{lo|hi}.txt + ratings.txt; lo = Rest, hi = Simkap).
DatasetManifest manifest_from_stew_layout(const std::filesystem::path& dir);

/// Plain-text numeric matrix, whitespace- or comma-separated.
Matrix load_matrix_txt(const std::filesystem::path& path);
void save_matrix_txt(const Matrix& m, const std::filesystem::path& path);

/// Ratings file: one line per subject, "subject rest_score simkap_score",
/// comma or whitespace separated. Lines starting with '#' are skipped.
std::vector<Rating> load_ratings(const std::filesystem::path& path);
void save_ratings(const std::vector<Rating>& ratings,
                  const std::filesystem::path& path);

struct Dataset {
    std::vector<EegRecording> recordings;
    std::vector<Rating> ratings;
    std::vector<std::string> warnings;  // e.g. recordings without a rating
};

/// Loads all recordings named by the manifest, joining ratings by
/// (subject, condition). Row-count and shape violations report file and row.
Dataset load_dataset(const DatasetManifest& manifest);

/// CSV round trip at 17 significant digits (lossless for doubles).
void save_feature_matrix(const FeatureMatrix& fm, const std::filesystem::path& path);
FeatureMatrix load_feature_matrix(const std::filesystem::path& path);

/// Index series CSV: subject,condition,index_id,window,value.
void save_index_series(const std::vector<IndexSeries>& series,
                       const std::filesystem::path& path);
std::vector<IndexSeries> load_index_series(const std::filesystem::path& path);

}  // namespace mwl::dataio
