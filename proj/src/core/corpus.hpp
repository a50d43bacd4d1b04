#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

namespace leafscope::corpus {

enum class Split { Train, Test, Unassigned };

const char* split_token(Split s);
Split parse_split(const std::string& token);

struct SampleRecord {
    std::string image_path;
    std::string label;
    Split split = Split::Unassigned;
    int rotation = 0;  // degrees, one of 0/90/180/270
    std::string deep_feature_id;  // empty = none

    bool operator==(const SampleRecord&) const = default;
};

struct Manifest {
    std::vector<SampleRecord> records;
    std::vector<std::string> species;  // unique labels in first-appearance order

    void rebuild_species();
    bool operator==(const Manifest&) const = default;
};

// Tab-separated text, one record per line, `#` comments, header
// `leafscope-manifest v1`. Rotation tokens r0|r90|r180|r270; a fifth field
// carries the optional deep-feature id.
Manifest load_manifest(const std::string& path);
void save_manifest(const Manifest& m, const std::string& path);

// Expands every record into the four quarter-turn rotations, preserving
// label and split. Input records must all be unrotated.
Manifest augment_rotations(const Manifest& m);

enum class VariationTier { Low, Medium, High };

int tier_test_count(VariationTier t);  // 5 / 10 / 15
const char* tier_token(VariationTier t);
VariationTier parse_tier(const std::string& token);

// `species<TAB>tier` lines under a `leafscope-tiers v1` header.
std::map<std::string, VariationTier> load_tiers(const std::string& path);
void save_tiers(const std::map<std::string, VariationTier>& tiers, const std::string& path);

// Draws the tier's test count per species uniformly without replacement
// (seeded); everything else becomes train.
Manifest assign_split(const Manifest& m, const std::map<std::string, VariationTier>& tiers,
                      uint64_t seed);

// Keyed vectors of one fixed dimension; doubles as the deep-feature sidecar
// store and the extracted-feature file. Header
// `leafscope-features v1 dim=<D>`, rows `id<TAB>v1 v2 ... vD`.
struct FeatureTable {
    size_t dim = 0;
    std::vector<std::string> ids;             // insertion order
    std::vector<std::vector<double>> rows;

    void add(const std::string& id, std::vector<double> row);
    const std::vector<double>* find(const std::string& id) const;
    size_t size() const { return ids.size(); }

private:
    std::unordered_map<std::string, size_t> index_;
};

FeatureTable load_feature_table(const std::string& path);
void save_feature_table(const FeatureTable& t, const std::string& path);

// Id under which a record's extracted features are stored: `path#r<rotation>`.
std::string record_row_id(const SampleRecord& r);

// Key used to look a record up in a deep-feature store: the explicit
// deep_feature_id when present, otherwise the row id above.
std::string deep_feature_key(const SampleRecord& r);

}  // namespace leafscope::corpus
