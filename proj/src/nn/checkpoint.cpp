#include "floormatch/nn/checkpoint.hpp"

#include <cstring>
#include <fstream>

namespace floormatch::nn {

namespace {

constexpr char kMagic[4] = {'F', 'M', 'C', 'K'};

void write_u32(std::ostream& os, uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), 4);
}

uint32_t read_u32(std::istream& is) {
  uint32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), 4);
  return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open checkpoint for writing: " + path);
  os.write(kMagic, 4);
  write_u32(os, Checkpoint::kVersion);
  write_u32(os, static_cast<uint32_t>(ckpt.meta.size()));
  os.write(ckpt.meta.data(), static_cast<std::streamsize>(ckpt.meta.size()));
  write_u32(os, static_cast<uint32_t>(ckpt.entries.size()));
  for (const auto& [name, tensor] : ckpt.entries) {
    write_u32(os, static_cast<uint32_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    os.put(0);  // dtype f32
    const auto& shape = tensor.shape();
    write_u32(os, static_cast<uint32_t>(shape.size()));
    for (int d : shape) write_u32(os, static_cast<uint32_t>(d));
    auto data = tensor.data();
    os.write(reinterpret_cast<const char*>(data.data()),
             static_cast<std::streamsize>(data.size() * sizeof(float)));
  }
  if (!os) throw ConfigError("failed writing checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open checkpoint: " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw ConfigError("not a checkpoint file: " + path);
  uint32_t version = read_u32(is);
  if (version != Checkpoint::kVersion)
    throw ConfigError("unsupported checkpoint version " + std::to_string(version));
  Checkpoint ck;
  uint32_t meta_len = read_u32(is);
  ck.meta.resize(meta_len);
  is.read(ck.meta.data(), meta_len);
  uint32_t count = read_u32(is);
  for (uint32_t i = 0; i < count; ++i) {
    uint32_t name_len = read_u32(is);
    std::string name(name_len, '\0');
    is.read(name.data(), name_len);
    int dtype = is.get();
    if (dtype != 0) throw ConfigError("unsupported checkpoint dtype");
    uint32_t ndim = read_u32(is);
    Shape shape(ndim);
    for (uint32_t d = 0; d < ndim; ++d) shape[d] = static_cast<int>(read_u32(is));
    std::vector<float> data(static_cast<size_t>(numel(shape)));
    is.read(reinterpret_cast<char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(float)));
    if (!is) throw ConfigError("truncated checkpoint: " + path);
    ck.entries.emplace_back(std::move(name), Tensor<float>::from_data(shape, std::move(data)));
  }
  return ck;
}

}  // namespace floormatch::nn
