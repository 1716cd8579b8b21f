#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace commforge {

struct DimEntry {
    int index = 0;
    std::string name;
    std::string description;
    double lo = 0.0;
    double hi = 1.0;
};

/// Per-dimension semantic annotation of a state or observation vector.
/// Feeds prompt text and criterion reports.
struct DimSchema {
    std::vector<DimEntry> dims;

    int width() const { return static_cast<int>(dims.size()); }
    void validate() const;  // indices contiguous from 0, names unique
    int index_of(const std::string& name) const;  // -1 when absent

    std::string to_json() const;
    static DimSchema from_json(const std::string& text);

    /// FNV-1a over the canonical JSON form; used as the dataset schema hash.
    std::uint64_t hash() const;
};

bool operator==(const DimEntry& a, const DimEntry& b);
bool operator==(const DimSchema& a, const DimSchema& b);

}  // namespace commforge
