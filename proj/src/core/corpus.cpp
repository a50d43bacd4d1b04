#include "corpus.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "error.hpp"

namespace leafscope::corpus {

const char* split_token(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Test: return "test";
        case Split::Unassigned: return "unassigned";
    }
    return "?";
}

Split parse_split(const std::string& token) {
    if (token == "train") return Split::Train;
    if (token == "test") return Split::Test;
    if (token == "unassigned") return Split::Unassigned;
    raise(ErrorCode::Format, "unknown split token '" + token + "'");
}

namespace {

int parse_rotation(const std::string& token) {
    if (token == "r0") return 0;
    if (token == "r90") return 90;
    if (token == "r180") return 180;
    if (token == "r270") return 270;
    raise(ErrorCode::Format, "unknown rotation token '" + token + "'");
}

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> fields;
    size_t start = 0;
    while (true) {
        size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
    return fields;
}

void atomic_write(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) raise(ErrorCode::Io, "cannot open for write: " + path);
        out << content;
        if (!out) raise(ErrorCode::Io, "write failed: " + path);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        raise(ErrorCode::Io, "cannot write " + path);
    }
}

}  // namespace

void Manifest::rebuild_species() {
    species.clear();
    std::set<std::string> seen;
    for (const auto& r : records)
        if (seen.insert(r.label).second) species.push_back(r.label);
}

Manifest load_manifest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::Io, "file not found: " + path);

    std::string line;
    int line_no = 0;
    if (!std::getline(in, line) || line != "leafscope-manifest v1")
        raise(ErrorCode::Format, path + ": missing 'leafscope-manifest v1' header");
    ++line_no;

    Manifest m;
    std::set<std::pair<std::string, int>> seen;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        auto fields = split_tabs(line);
        std::string where = path + ":" + std::to_string(line_no);
        if (fields.size() < 4 || fields.size() > 5)
            raise(ErrorCode::Format, where + ": expected 4 or 5 tab-separated fields, got " +
                                         std::to_string(fields.size()));
        SampleRecord r;
        r.image_path = fields[0];
        r.label = fields[1];
        if (r.image_path.empty() || r.label.empty())
            raise(ErrorCode::Format, where + ": empty path or label");
        try {
            r.split = parse_split(fields[2]);
            r.rotation = parse_rotation(fields[3]);
        } catch (const Error& e) {
            raise(ErrorCode::Format, where + ": " + e.what());
        }
        if (fields.size() == 5) r.deep_feature_id = fields[4];
        if (!seen.insert({r.image_path, r.rotation}).second)
            raise(ErrorCode::Format,
                  where + ": duplicate record " + r.image_path + " r" + std::to_string(r.rotation));
        m.records.push_back(std::move(r));
    }
    m.rebuild_species();
    return m;
}

void save_manifest(const Manifest& m, const std::string& path) {
    std::string out = "leafscope-manifest v1\n";
    for (const auto& r : m.records) {
        out += r.image_path;
        out += '\t';
        out += r.label;
        out += '\t';
        out += split_token(r.split);
        out += "\tr";
        out += std::to_string(r.rotation);
        if (!r.deep_feature_id.empty()) {
            out += '\t';
            out += r.deep_feature_id;
        }
        out += '\n';
    }
    atomic_write(path, out);
}

Manifest augment_rotations(const Manifest& m) {
    for (const auto& r : m.records)
        if (r.rotation != 0)
            raise(ErrorCode::InvalidArgument,
                  "manifest already contains rotated records (" + r.image_path + ")");
    Manifest out;
    out.records.reserve(m.records.size() * 4);
    for (const auto& r : m.records) {
        for (int rot : {0, 90, 180, 270}) {
            SampleRecord copy = r;
            copy.rotation = rot;
            // The sidecar id belongs to the unrotated image; rotated copies
            // fall back to the path#rotation key.
            if (rot != 0) copy.deep_feature_id.clear();
            out.records.push_back(std::move(copy));
        }
    }
    out.rebuild_species();
    return out;
}

int tier_test_count(VariationTier t) {
    switch (t) {
        case VariationTier::Low: return 5;
        case VariationTier::Medium: return 10;
        case VariationTier::High: return 15;
    }
    return 0;
}

const char* tier_token(VariationTier t) {
    switch (t) {
        case VariationTier::Low: return "low";
        case VariationTier::Medium: return "medium";
        case VariationTier::High: return "high";
    }
    return "?";
}

VariationTier parse_tier(const std::string& token) {
    if (token == "low") return VariationTier::Low;
    if (token == "medium") return VariationTier::Medium;
    if (token == "high") return VariationTier::High;
    raise(ErrorCode::Format, "unknown variation tier '" + token + "'");
}

std::map<std::string, VariationTier> load_tiers(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::Io, "file not found: " + path);
    std::string line;
    if (!std::getline(in, line) || line != "leafscope-tiers v1")
        raise(ErrorCode::Format, path + ": missing 'leafscope-tiers v1' header");
    std::map<std::string, VariationTier> tiers;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        auto fields = split_tabs(line);
        std::string where = path + ":" + std::to_string(line_no);
        if (fields.size() != 2) raise(ErrorCode::Format, where + ": expected 'species<TAB>tier'");
        try {
            tiers[fields[0]] = parse_tier(fields[1]);
        } catch (const Error& e) {
            raise(ErrorCode::Format, where + ": " + e.what());
        }
    }
    return tiers;
}

void save_tiers(const std::map<std::string, VariationTier>& tiers, const std::string& path) {
    std::string out = "leafscope-tiers v1\n";
    for (const auto& [species, tier] : tiers) {
        out += species;
        out += '\t';
        out += tier_token(tier);
        out += '\n';
    }
    atomic_write(path, out);
}

namespace {

struct SplitMix64 {
    uint64_t state;
    explicit SplitMix64(uint64_t seed) : state(seed) {}
    uint64_t next() {
        uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
};

}  // namespace

Manifest assign_split(const Manifest& m, const std::map<std::string, VariationTier>& tiers,
                      uint64_t seed) {
    Manifest out = m;
    SplitMix64 rng(seed);
    for (const auto& species : m.species) {
        auto tier_it = tiers.find(species);
        if (tier_it == tiers.end())
            raise(ErrorCode::NotFound, "no variation tier for species '" + species + "'");
        int want = tier_test_count(tier_it->second);

        std::vector<size_t> members;
        for (size_t i = 0; i < out.records.size(); ++i)
            if (out.records[i].label == species) members.push_back(i);
        if (members.size() < static_cast<size_t>(want) + 1)
            raise(ErrorCode::InvalidArgument,
                  "species '" + species + "' has " + std::to_string(members.size()) +
                      " records, needs at least " + std::to_string(want + 1));

        // Partial Fisher-Yates: the first `want` slots become the test draw.
        for (int i = 0; i < want; ++i) {
            size_t j = i + rng.next() % (members.size() - i);
            std::swap(members[i], members[j]);
        }
        for (size_t k = 0; k < members.size(); ++k)
            out.records[members[k]].split = k < static_cast<size_t>(want) ? Split::Test : Split::Train;
    }
    return out;
}

void FeatureTable::add(const std::string& id, std::vector<double> row) {
    if (row.size() != dim)
        raise(ErrorCode::Dimension, "feature row '" + id + "' has " + std::to_string(row.size()) +
                                        " values, table dimension is " + std::to_string(dim));
    if (!index_.emplace(id, ids.size()).second)
        raise(ErrorCode::InvalidArgument, "duplicate feature id '" + id + "'");
    ids.push_back(id);
    rows.push_back(std::move(row));
}

const std::vector<double>* FeatureTable::find(const std::string& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &rows[it->second];
}

FeatureTable load_feature_table(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::Io, "file not found: " + path);
    std::string line;
    if (!std::getline(in, line)) raise(ErrorCode::Format, path + ": empty file");

    size_t dim = 0;
    if (std::sscanf(line.c_str(), "leafscope-features v1 dim=%zu", &dim) != 1)
        raise(ErrorCode::Format, path + ": missing 'leafscope-features v1 dim=<D>' header");

    FeatureTable t;
    t.dim = dim;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::string where = path + ":" + std::to_string(line_no);
        size_t tab = line.find('\t');
        if (tab == std::string::npos) raise(ErrorCode::Format, where + ": expected 'id<TAB>values'");
        std::string id = line.substr(0, tab);
        std::istringstream vals(line.substr(tab + 1));
        std::vector<double> row;
        row.reserve(dim);
        double v;
        while (vals >> v) row.push_back(v);
        if (!vals.eof()) raise(ErrorCode::Format, where + ": non-numeric value in row '" + id + "'");
        if (row.size() != dim)
            raise(ErrorCode::Format, where + ": row '" + id + "' has " +
                                         std::to_string(row.size()) + " values, expected " +
                                         std::to_string(dim));
        try {
            t.add(id, std::move(row));
        } catch (const Error& e) {
            raise(ErrorCode::Format, where + ": " + e.what());
        }
    }
    return t;
}

void save_feature_table(const FeatureTable& t, const std::string& path) {
    std::string out = "leafscope-features v1 dim=" + std::to_string(t.dim) + "\n";
    char buf[40];
    for (size_t i = 0; i < t.ids.size(); ++i) {
        out += t.ids[i];
        out += '\t';
        const auto& row = t.rows[i];
        for (size_t d = 0; d < row.size(); ++d) {
            if (d) out += ' ';
            std::snprintf(buf, sizeof(buf), "%.17g", row[d]);
            out += buf;
        }
        out += '\n';
    }
    atomic_write(path, out);
}

std::string record_row_id(const SampleRecord& r) {
    return r.image_path + "#r" + std::to_string(r.rotation);
}

std::string deep_feature_key(const SampleRecord& r) {
    return r.deep_feature_id.empty() ? record_row_id(r) : r.deep_feature_id;
}

}  // namespace leafscope::corpus
