#include "commforge/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace commforge {

static_assert(std::endian::native == std::endian::little,
              "CFT1 container assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'C', 'F', 'T', '1'};

void write_u32(std::ostream& os, std::uint32_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t read_u32(std::istream& is, const char* what) {
    std::uint32_t v = 0;
    if (!is.read(reinterpret_cast<char*>(&v), sizeof v))
        throw IoError(std::string("checkpoint: truncated while reading ") + what);
    return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const std::vector<NamedTensor>& entries) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("checkpoint: cannot open for write: " + path);
    os.write(kMagic, 4);
    write_u32(os, static_cast<std::uint32_t>(entries.size()));
    for (const NamedTensor& e : entries) {
        write_u32(os, static_cast<std::uint32_t>(e.name.size()));
        os.write(e.name.data(), static_cast<std::streamsize>(e.name.size()));
        write_u32(os, static_cast<std::uint32_t>(e.value.rows));
        write_u32(os, static_cast<std::uint32_t>(e.value.cols));
        os.write(reinterpret_cast<const char*>(e.value.data.data()),
                 static_cast<std::streamsize>(e.value.data.size() * sizeof(double)));
    }
    if (!os) throw IoError("checkpoint: write failed: " + path);
}

std::vector<NamedTensor> load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("checkpoint: cannot open: " + path);
    char magic[4] = {};
    if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
        throw IoError("checkpoint: bad magic (expected CFT1): " + path);
    const std::uint32_t count = read_u32(is, "entry count");
    std::vector<NamedTensor> entries;
    entries.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        const std::uint32_t name_len = read_u32(is, "name length");
        std::string name(name_len, '\0');
        if (!is.read(name.data(), name_len)) throw IoError("checkpoint: truncated name");
        const std::uint32_t rows = read_u32(is, "rows");
        const std::uint32_t cols = read_u32(is, "cols");
        Tensor2 t(static_cast<int>(rows), static_cast<int>(cols));
        if (!is.read(reinterpret_cast<char*>(t.data.data()),
                     static_cast<std::streamsize>(t.data.size() * sizeof(double))))
            throw IoError("checkpoint: truncated tensor data for " + name);
        entries.push_back({std::move(name), std::move(t)});
    }
    return entries;
}

}  // namespace commforge
