#pragma once

#include <string>
#include <vector>

#include "commforge/tensor.hpp"

namespace commforge {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NamedTensor {
    std::string name;
    Tensor2 value;
};

/// Versioned binary container: magic "CFT1", little-endian u32 lengths,
/// IEEE-754 doubles. One flat list of named arrays per file.
void save_checkpoint(const std::string& path, const std::vector<NamedTensor>& entries);
std::vector<NamedTensor> load_checkpoint(const std::string& path);

}  // namespace commforge
