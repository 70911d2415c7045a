#include "transnet/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

namespace transnet::compute {

namespace {

constexpr char kMagic[8] = {'T', 'N', 'C', 'K', 'P', 'T', '0', '1'};

static_assert(std::endian::native == std::endian::little,
              "checkpoint encoding assumes a little-endian host");

std::uint64_t fnv1a(const char* data, std::size_t size) {
  std::uint64_t hash = 1469598103934665603ull;
  for (std::size_t i = 0; i < size; ++i) {
    hash ^= static_cast<unsigned char>(data[i]);
    hash *= 1099511628211ull;
  }
  return hash;
}

void put_u64(std::string& out, std::uint64_t v) {
  char buf[8];
  std::memcpy(buf, &v, 8);
  out.append(buf, 8);
}

class Reader {
 public:
  explicit Reader(const std::string& bytes, std::size_t end) : bytes_(bytes), end_(end) {}

  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    std::memcpy(&v, bytes_.data() + pos_, 8);
    pos_ += 8;
    return v;
  }
  std::string str(std::uint64_t n) {
    need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  void doubles(double* out, std::uint64_t count) {
    if (count > (end_ - pos_) / 8) throw CheckpointError("checkpoint truncated");
    std::memcpy(out, bytes_.data() + pos_, count * 8);
    pos_ += count * 8;
  }
  bool done() const { return pos_ == end_; }

 private:
  void need(std::uint64_t n) const {
    if (n > end_ - pos_) throw CheckpointError("checkpoint truncated");
  }
  const std::string& bytes_;
  std::size_t end_;
  std::size_t pos_ = sizeof(kMagic);
};

}  // namespace

std::string serialize_checkpoint(const Checkpoint& ckpt) {
  std::string out(kMagic, sizeof(kMagic));
  put_u64(out, ckpt.metadata.size());
  out += ckpt.metadata;
  put_u64(out, ckpt.tensors.size());
  for (const auto& [name, value] : ckpt.tensors) {
    put_u64(out, name.size());
    out += name;
    put_u64(out, static_cast<std::uint64_t>(value.rows()));
    put_u64(out, static_cast<std::uint64_t>(value.cols()));
    out.append(reinterpret_cast<const char*>(value.data()),
               static_cast<std::size_t>(value.size()) * sizeof(double));
  }
  put_u64(out, fnv1a(out.data(), out.size()));
  return out;
}

Checkpoint deserialize_checkpoint(const std::string& bytes) {
  if (bytes.size() < sizeof(kMagic) + 8 || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw CheckpointError("not a checkpoint file (bad magic)");
  }
  const std::size_t body = bytes.size() - 8;
  std::uint64_t stored = 0;
  std::memcpy(&stored, bytes.data() + body, 8);
  if (stored != fnv1a(bytes.data(), body)) throw CheckpointError("checkpoint checksum mismatch");

  Reader in(bytes, body);
  Checkpoint ckpt;
  ckpt.metadata = in.str(in.u64());
  const std::uint64_t count = in.u64();
  for (std::uint64_t i = 0; i < count; ++i) {
    std::string name = in.str(in.u64());
    const std::uint64_t rows = in.u64();
    const std::uint64_t cols = in.u64();
    if (cols != 0 && rows > (std::uint64_t{1} << 40) / cols) {
      throw CheckpointError("checkpoint tensor '" + name + "' has an implausible shape");
    }
    Matrix value(static_cast<Index>(rows), static_cast<Index>(cols));
    in.doubles(value.data(), rows * cols);
    if (!ckpt.tensors.emplace(std::move(name), std::move(value)).second) {
      throw CheckpointError("duplicate tensor name in checkpoint");
    }
  }
  if (!in.done()) throw CheckpointError("trailing bytes in checkpoint");
  return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError("cannot write " + tmp.string());
    const std::string bytes = serialize_checkpoint(ckpt);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw CheckpointError("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_checkpoint(bytes);
}

}  // namespace transnet::compute
