#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>

#include "transnet/tensor.hpp"

namespace transnet::compute {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Named parameter values plus a free-form metadata string.
///
/// On disk (little-endian):
///   "TNCKPT01" | u64 metadata length | metadata bytes | u64 tensor count |
///   per tensor: u64 name length | name | u64 rows | u64 cols | rows*cols f64
///   (row-major) | u64 FNV-1a hash of every preceding byte.
struct Checkpoint {
  std::string metadata;
  std::map<std::string, Matrix> tensors;
};

std::string serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint deserialize_checkpoint(const std::string& bytes);

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace transnet::compute
