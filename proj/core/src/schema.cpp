#include "commforge/schema.hpp"

#include <set>
#include <stdexcept>

#include <json.hpp>

namespace commforge {

using nlohmann::json;

void DimSchema::validate() const {
    std::set<std::string> names;
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (dims[i].index != static_cast<int>(i))
            throw std::invalid_argument("DimSchema: indices must be contiguous from 0");
        if (dims[i].name.empty() || !names.insert(dims[i].name).second)
            throw std::invalid_argument("DimSchema: duplicate or empty name '" + dims[i].name + "'");
    }
}

int DimSchema::index_of(const std::string& name) const {
    for (const DimEntry& d : dims)
        if (d.name == name) return d.index;
    return -1;
}

std::string DimSchema::to_json() const {
    json arr = json::array();
    for (const DimEntry& d : dims) {
        arr.push_back({{"index", d.index},
                       {"name", d.name},
                       {"description", d.description},
                       {"range", {d.lo, d.hi}}});
    }
    return arr.dump();
}

DimSchema DimSchema::from_json(const std::string& text) {
    const json arr = json::parse(text);
    DimSchema s;
    for (const json& e : arr) {
        DimEntry d;
        d.index = e.at("index").get<int>();
        d.name = e.at("name").get<std::string>();
        d.description = e.at("description").get<std::string>();
        d.lo = e.at("range").at(0).get<double>();
        d.hi = e.at("range").at(1).get<double>();
        s.dims.push_back(std::move(d));
    }
    s.validate();
    return s;
}

std::uint64_t DimSchema::hash() const {
    const std::string canon = to_json();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : canon) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

bool operator==(const DimEntry& a, const DimEntry& b) {
    return a.index == b.index && a.name == b.name && a.description == b.description &&
           a.lo == b.lo && a.hi == b.hi;
}

bool operator==(const DimSchema& a, const DimSchema& b) { return a.dims == b.dims; }

}  // namespace commforge
