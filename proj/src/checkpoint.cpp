#include "dusk/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace dusk {

namespace {

constexpr char kMagic[8] = {'D', 'U', 'S', 'K', 'C', 'K', 'P', '1'};

template <typename T>
void write_pod(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("checkpoint: truncated file");
  return v;
}

}  // namespace

void save_checkpoint(const ParameterStore& store, uint64_t iteration,
                     const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("checkpoint: cannot open " + path);
  os.write(kMagic, sizeof(kMagic));
  write_pod<uint32_t>(os, sizeof(real));
  write_pod<uint64_t>(os, iteration);
  write_pod<uint32_t>(os, static_cast<uint32_t>(store.size()));
  for (int i = 0; i < store.size(); ++i) {
    const ParamBlock& b = store.block(i);
    write_pod<uint32_t>(os, static_cast<uint32_t>(b.name.size()));
    os.write(b.name.data(), static_cast<std::streamsize>(b.name.size()));
    write_pod<uint8_t>(os, b.trainable ? 1 : 0);
    write_pod<uint32_t>(os, static_cast<uint32_t>(b.value.rows()));
    write_pod<uint32_t>(os, static_cast<uint32_t>(b.value.cols()));
    os.write(reinterpret_cast<const char*>(b.value.data()),
             static_cast<std::streamsize>(sizeof(real) * b.value.size()));
  }
  if (!os) throw std::runtime_error("checkpoint: write failed for " + path);
}

uint64_t load_checkpoint(ParameterStore& store, const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("checkpoint: cannot open " + path);
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("checkpoint: bad magic in " + path);
  if (read_pod<uint32_t>(is) != sizeof(real))
    throw std::runtime_error("checkpoint: scalar width mismatch in " + path);
  const uint64_t iteration = read_pod<uint64_t>(is);
  const uint32_t nblocks = read_pod<uint32_t>(is);
  const bool fresh = store.size() == 0;
  for (uint32_t i = 0; i < nblocks; ++i) {
    const uint32_t len = read_pod<uint32_t>(is);
    std::string name(len, '\0');
    is.read(name.data(), len);
    const bool trainable = read_pod<uint8_t>(is) != 0;
    const int rows = static_cast<int>(read_pod<uint32_t>(is));
    const int cols = static_cast<int>(read_pod<uint32_t>(is));
    int id;
    if (fresh) {
      id = store.add(name, rows, cols, trainable);
    } else {
      id = store.find(name);
      if (id < 0) throw std::runtime_error("checkpoint: unknown block " + name);
      const ParamBlock& b = store.block(id);
      if (b.value.rows() != rows || b.value.cols() != cols)
        throw std::runtime_error("checkpoint: shape mismatch for " + name);
    }
    ParamBlock& b = store.block(id);
    is.read(reinterpret_cast<char*>(b.value.data()),
            static_cast<std::streamsize>(sizeof(real) * b.value.size()));
    if (!is) throw std::runtime_error("checkpoint: truncated block " + name);
  }
  return iteration;
}

}  // namespace dusk
