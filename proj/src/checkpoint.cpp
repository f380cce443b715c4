#include <cstring>
#include <fstream>
#include <map>
#include <stdexcept>

#include "jump/nn.hpp"

namespace jump {
namespace nn {

namespace {

void put_u32(std::ostream& os, uint32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); }

uint32_t get_u32(std::istream& is) {
  uint32_t v = 0;
  if (!is.read(reinterpret_cast<char*>(&v), 4))
    throw std::runtime_error("checkpoint: truncated file");
  return v;
}

constexpr char kMagic[4] = {'J', 'G', 'C', 'K'};

}  // namespace

void save_checkpoint(const std::string& path, const std::vector<Tensor*>& tensors,
                     uint32_t version) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("checkpoint: cannot write " + path);
  os.write(kMagic, 4);
  put_u32(os, version);
  put_u32(os, uint32_t(tensors.size()));
  for (const Tensor* t : tensors) {
    put_u32(os, uint32_t(t->name.size()));
    os.write(t->name.data(), std::streamsize(t->name.size()));
    put_u32(os, 2);
    put_u32(os, uint32_t(t->value.rows()));
    put_u32(os, uint32_t(t->value.cols()));
    for (int i = 0; i < t->value.rows(); ++i)
      for (int j = 0; j < t->value.cols(); ++j) {
        const float v = t->value(i, j);
        os.write(reinterpret_cast<const char*>(&v), 4);
      }
  }
  if (!os) throw std::runtime_error("checkpoint: write failed for " + path);
}

namespace {

struct Entry {
  std::vector<uint32_t> dims;
  std::vector<float> data;
};

std::map<std::string, Entry> read_all(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("checkpoint: cannot read " + path);
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("checkpoint: bad magic in " + path);
  get_u32(is);  // version, currently only 1 exists
  const uint32_t count = get_u32(is);
  std::map<std::string, Entry> out;
  for (uint32_t k = 0; k < count; ++k) {
    const uint32_t name_len = get_u32(is);
    std::string name(name_len, '\0');
    if (!is.read(name.data(), name_len)) throw std::runtime_error("checkpoint: truncated file");
    Entry e;
    const uint32_t rank = get_u32(is);
    size_t n = 1;
    for (uint32_t r = 0; r < rank; ++r) {
      e.dims.push_back(get_u32(is));
      n *= e.dims.back();
    }
    e.data.resize(n);
    if (!is.read(reinterpret_cast<char*>(e.data.data()), std::streamsize(n * 4)))
      throw std::runtime_error("checkpoint: truncated file");
    out[name] = std::move(e);
  }
  return out;
}

}  // namespace

void load_checkpoint(const std::string& path, const std::vector<Tensor*>& tensors) {
  const auto entries = read_all(path);
  for (Tensor* t : tensors) {
    const auto it = entries.find(t->name);
    if (it == entries.end())
      throw std::runtime_error("checkpoint: tensor '" + t->name + "' missing from " + path);
    const Entry& e = it->second;
    if (e.dims.size() != 2 || int(e.dims[0]) != t->value.rows() ||
        int(e.dims[1]) != t->value.cols())
      throw std::runtime_error("checkpoint: shape mismatch for '" + t->name + "' in " + path);
    size_t idx = 0;
    for (int i = 0; i < t->value.rows(); ++i)
      for (int j = 0; j < t->value.cols(); ++j) t->value(i, j) = e.data[idx++];
  }
}

std::vector<TensorInfo> checkpoint_manifest(const std::string& path) {
  const auto entries = read_all(path);
  std::vector<TensorInfo> out;
  for (const auto& [name, e] : entries) out.push_back({name, e.dims});
  return out;
}

}  // namespace nn
}  // namespace jump
