#include "mwl/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace mwl::dataio {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split_fields(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

// Tokenizes on any run of whitespace and/or commas.
std::vector<std::string> tokenize_loose(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ' ' || c == '\t' || c == ',' || c == '\r') {
            if (!cur.empty()) {
                out.push_back(cur);
                cur.clear();
            }
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

double parse_double(const std::string& tok, const std::string& context) {
    try {
        size_t pos = 0;
        double v = std::stod(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw Error("non-numeric value '" + tok + "' " + context);
    }
}

int parse_int(const std::string& tok, const std::string& context) {
    try {
        size_t pos = 0;
        int v = std::stoi(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw Error("non-integer value '" + tok + "' " + context);
    }
}

}  // namespace

int FeatureMatrix::column_index(const std::string& name) const {
    for (size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return static_cast<int>(i);
    return -1;
}

void FeatureMatrix::validate() const {
    if (values.rows() != static_cast<long>(rows.size()) ||
        values.cols() != static_cast<long>(columns.size()))
        throw Error("feature matrix shape mismatch");
    if (labels.size() != rows.size())
        throw Error("feature matrix label count mismatch");
    std::set<std::string> uniq(columns.begin(), columns.end());
    if (uniq.size() != columns.size())
        throw Error("duplicate feature column names");
    if (!values.allFinite()) throw Error("non-finite feature values");
}

void DatasetManifest::validate() const {
    std::set<std::pair<int, int>> seen;
    for (const auto& e : entries) {
        if (!fs::exists(e.file))
            throw Error("manifest entry file missing: " + e.file.string());
        auto key = std::make_pair(e.subject_id, static_cast<int>(e.condition));
        if (!seen.insert(key).second)
            throw Error("duplicate (subject, condition) in manifest: subject " +
                        std::to_string(e.subject_id) + " " + to_string(e.condition));
    }
    if (!ratings_file.empty() && !fs::exists(ratings_file))
        throw Error("ratings file missing: " + ratings_file.string());
    if (sampling_rate_hz <= 0) throw Error("manifest sampling rate must be positive");
}

DatasetManifest load_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open manifest: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error("manifest parse error in " + path.string() + ": " + e.what());
    }
    DatasetManifest m;
    m.root = path.parent_path();
    if (j.contains("root")) m.root = fs::path(j["root"].get<std::string>());
    m.sampling_rate_hz = j.at("sampling_rate_hz").get<double>();
    m.channel_names = j.at("channel_names").get<std::vector<std::string>>();
    if (j.contains("ratings_file"))
        m.ratings_file = m.root / j["ratings_file"].get<std::string>();
    for (const auto& e : j.at("recordings")) {
        ManifestEntry ent;
        ent.file = m.root / e.at("file").get<std::string>();
        ent.subject_id = e.at("subject").get<int>();
        ent.condition = condition_from_string(e.at("condition").get<std::string>());
        m.entries.push_back(ent);
    }
    return m;
}

void save_manifest(const DatasetManifest& m, const fs::path& path) {
    json j;
    j["root"] = m.root.string();
    j["sampling_rate_hz"] = m.sampling_rate_hz;
    j["channel_names"] = m.channel_names;
    if (!m.ratings_file.empty())
        j["ratings_file"] = fs::relative(m.ratings_file, m.root).string();
    j["recordings"] = json::array();
    for (const auto& e : m.entries) {
        j["recordings"].push_back({{"file", fs::relative(e.file, m.root).string()},
                                   {"subject", e.subject_id},
                                   {"condition", to_string(e.condition)}});
    }
    std::ofstream out(path);
    if (!out) throw Error("cannot write manifest: " + path.string());
    out << j.dump(2) << "\n";
}

DatasetManifest manifest_from_stew_layout(const fs::path& dir) {
    DatasetManifest m;
    m.root = dir;
    m.sampling_rate_hz = 128.0;
    m.channel_names = {"AF3", "F7", "F3", "FC5", "T7",  "P7",  "O1",
                       "O2",  "P8", "T8", "FC6", "F4",  "F8",  "AF4"};
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file()) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        std::string name = f.filename().string();
        // sub{NN}_{lo|hi}.txt
        if (name.rfind("sub", 0) != 0 || f.extension() != ".txt") continue;
        auto us = name.find('_');
        if (us == std::string::npos) continue;
        std::string num = name.substr(3, us - 3);
        std::string cond = name.substr(us + 1, name.size() - us - 5);
        if (cond != "lo" && cond != "hi") continue;
        ManifestEntry ent;
        ent.file = f;
        ent.subject_id = parse_int(num, "in file name " + name);
        ent.condition = cond == "lo" ? Condition::Rest : Condition::Simkap;
        m.entries.push_back(ent);
    }
    if (fs::exists(dir / "ratings.txt")) m.ratings_file = dir / "ratings.txt";
    return m;
}

Matrix load_matrix_txt(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open recording file: " + path.string());
    std::vector<std::vector<double>> rows;
    std::string line;
    size_t lineno = 0;
    size_t ncols = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto toks = tokenize_loose(line);
        if (toks.empty()) continue;
        std::vector<double> row;
        row.reserve(toks.size());
        for (const auto& t : toks)
            row.push_back(parse_double(
                t, "in " + path.string() + " row " + std::to_string(lineno)));
        if (ncols == 0) ncols = row.size();
        if (row.size() != ncols)
            throw Error("ragged matrix in " + path.string() + ": row " +
                        std::to_string(lineno) + " has " +
                        std::to_string(row.size()) + " columns, expected " +
                        std::to_string(ncols));
        rows.push_back(std::move(row));
    }
    Matrix m(rows.size(), ncols);
    for (size_t r = 0; r < rows.size(); ++r)
        for (size_t c = 0; c < ncols; ++c) m(r, c) = rows[r][c];
    return m;
}

void save_matrix_txt(const Matrix& m, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write matrix: " + path.string());
    for (long r = 0; r < m.rows(); ++r) {
        for (long c = 0; c < m.cols(); ++c) {
            if (c) out << ' ';
            out << fmt17(m(r, c));
        }
        out << '\n';
    }
}

std::vector<Rating> load_ratings(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open ratings file: " + path.string());
    std::vector<Rating> out;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line[0] == '#') continue;
        auto toks = tokenize_loose(line);
        if (toks.empty()) continue;
        if (toks.size() != 3)
            throw Error("ratings row " + std::to_string(lineno) + " in " +
                        path.string() + ": expected 3 fields, got " +
                        std::to_string(toks.size()));
        std::string ctx = "in " + path.string() + " row " + std::to_string(lineno);
        int subj = parse_int(toks[0], ctx);
        out.push_back({subj, Condition::Rest, parse_int(toks[1], ctx)});
        out.push_back({subj, Condition::Simkap, parse_int(toks[2], ctx)});
    }
    return out;
}

void save_ratings(const std::vector<Rating>& ratings, const fs::path& path) {
    std::map<int, std::pair<int, int>> by_subject;
    for (const auto& r : ratings) {
        auto& e = by_subject[r.subject_id];
        (r.condition == Condition::Rest ? e.first : e.second) = r.score;
    }
    std::ofstream out(path);
    if (!out) throw Error("cannot write ratings: " + path.string());
    out << "# subject rest simkap\n";
    for (const auto& [subj, scores] : by_subject)
        out << subj << ' ' << scores.first << ' ' << scores.second << '\n';
}

Dataset load_dataset(const DatasetManifest& manifest) {
    manifest.validate();
    Dataset ds;
    const size_t expected_cols = manifest.channel_names.size();
    for (const auto& e : manifest.entries) {
        Matrix m = load_matrix_txt(e.file);
        if (static_cast<size_t>(m.cols()) != expected_cols)
            throw Error("recording " + e.file.string() + " has " +
                        std::to_string(m.cols()) + " channels, manifest names " +
                        std::to_string(expected_cols));
        EegRecording rec;
        rec.subject_id = e.subject_id;
        rec.condition = e.condition;
        rec.samples = std::move(m);
        rec.sampling_rate_hz = manifest.sampling_rate_hz;
        rec.channel_names = manifest.channel_names;
        rec.validate();
        ds.recordings.push_back(std::move(rec));
    }
    std::vector<Rating> all_ratings;
    if (!manifest.ratings_file.empty())
        all_ratings = load_ratings(manifest.ratings_file);
    // Keep only ratings matching a loaded recording; warn about recordings
    // with no rating (they are dropped later at the labelling stage).
    for (const auto& rec : ds.recordings) {
        auto it = std::find_if(all_ratings.begin(), all_ratings.end(),
                               [&](const Rating& r) {
                                   return r.subject_id == rec.subject_id &&
                                          r.condition == rec.condition;
                               });
        if (it != all_ratings.end()) {
            ds.ratings.push_back(*it);
        } else {
            ds.warnings.push_back("no rating for subject " +
                                  std::to_string(rec.subject_id) + " " +
                                  to_string(rec.condition) + "; instance dropped");
        }
    }
    return ds;
}

void save_feature_matrix(const FeatureMatrix& fm, const fs::path& path) {
    fm.validate();
    std::ofstream out(path);
    if (!out) throw Error("cannot write feature matrix: " + path.string());
    out << "subject,condition,index,synthetic,label";
    for (const auto& c : fm.columns) out << ',' << c;
    out << '\n';
    for (int r = 0; r < fm.n_rows(); ++r) {
        const auto& k = fm.rows[r];
        out << k.subject_id << ',' << to_string(k.condition) << ',' << k.index_id
            << ',' << (k.synthetic ? 1 : 0) << ',' << to_string(fm.labels[r]);
        for (int c = 0; c < fm.n_cols(); ++c) out << ',' << fmt17(fm.values(r, c));
        out << '\n';
    }
}

FeatureMatrix load_feature_matrix(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open feature matrix: " + path.string());
    std::string line;
    if (!std::getline(in, line))
        throw Error("empty feature matrix file: " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto header = split_fields(line, ',');
    constexpr size_t kMeta = 5;
    if (header.size() < kMeta || header[0] != "subject" || header[4] != "label")
        throw Error("feature matrix schema mismatch in " + path.string());
    FeatureMatrix fm;
    fm.columns.assign(header.begin() + kMeta, header.end());
    std::vector<std::vector<double>> values;
    size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto f = split_fields(line, ',');
        if (f.size() != header.size())
            throw Error("feature matrix row " + std::to_string(lineno) + " in " +
                        path.string() + " has wrong field count");
        std::string ctx = "in " + path.string() + " row " + std::to_string(lineno);
        FeatureMatrix::RowKey k;
        k.subject_id = parse_int(f[0], ctx);
        k.condition = condition_from_string(f[1]);
        k.index_id = f[2];
        k.synthetic = parse_int(f[3], ctx) != 0;
        fm.rows.push_back(k);
        if (f[4] == "Suboptimal")
            fm.labels.push_back(WorkloadClass::Suboptimal);
        else if (f[4] == "SuperOptimal")
            fm.labels.push_back(WorkloadClass::SuperOptimal);
        else
            throw Error("unknown class label '" + f[4] + "' " + ctx);
        std::vector<double> row;
        for (size_t c = kMeta; c < f.size(); ++c)
            row.push_back(parse_double(f[c], ctx));
        values.push_back(std::move(row));
    }
    fm.values.resize(static_cast<long>(values.size()),
                     static_cast<long>(fm.columns.size()));
    for (size_t r = 0; r < values.size(); ++r)
        for (size_t c = 0; c < fm.columns.size(); ++c)
            fm.values(static_cast<long>(r), static_cast<long>(c)) = values[r][c];
    fm.validate();
    return fm;
}

void save_index_series(const std::vector<IndexSeries>& series, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write index series: " + path.string());
    out << "subject,condition,index_id,window,value\n";
    for (const auto& s : series)
        for (size_t w = 0; w < s.values.size(); ++w)
            out << s.subject_id << ',' << to_string(s.condition) << ',' << s.index_id
                << ',' << w << ',' << fmt17(s.values[w]) << '\n';
}

std::vector<IndexSeries> load_index_series(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open index series: " + path.string());
    std::string line;
    if (!std::getline(in, line))
        throw Error("empty index series file: " + path.string());
    std::vector<IndexSeries> out;
    std::map<std::tuple<int, int, std::string>, size_t> pos;
    size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto f = split_fields(line, ',');
        if (f.size() != 5)
            throw Error("index series row " + std::to_string(lineno) +
                        " malformed in " + path.string());
        std::string ctx = "in " + path.string() + " row " + std::to_string(lineno);
        int subj = parse_int(f[0], ctx);
        Condition cond = condition_from_string(f[1]);
        auto key = std::make_tuple(subj, static_cast<int>(cond), f[2]);
        auto it = pos.find(key);
        if (it == pos.end()) {
            IndexSeries s;
            s.subject_id = subj;
            s.condition = cond;
            s.index_id = f[2];
            out.push_back(std::move(s));
            it = pos.emplace(key, out.size() - 1).first;
        }
        out[it->second].values.push_back(parse_double(f[4], ctx));
    }
    return out;
}

}  // namespace mwl::dataio
