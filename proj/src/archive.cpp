#include "simast/archive.hpp"

#include <fstream>

#include "binary_io.hpp"
#include "simast/error.hpp"

namespace simast {

namespace {
constexpr char kMagic[8] = {'S', 'I', 'M', 'A', 'S', 'T', 'C', 'K'};
}

const ad::Tensor& Archive::get(const std::string& name) const {
  for (const auto& t : tensors) {
    if (t.name == name) return t.tensor;
  }
  throw DataError("checkpoint has no tensor named '" + name + "'");
}

void save_archive(const std::filesystem::path& path, const Archive& archive) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(kMagic, sizeof kMagic);
  binio::write_le<std::uint32_t>(out, kArchiveVersion);
  binio::write_string(out, archive.metadata);
  binio::write_le<std::uint64_t>(out, archive.tensors.size());
  for (const auto& [name, tensor] : archive.tensors) {
    binio::write_string(out, name);
    binio::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(tensor.rank()));
    for (std::size_t d : tensor.shape()) binio::write_le<std::uint64_t>(out, d);
    for (double v : tensor.data()) binio::write_le<double>(out, v);
  }
  if (!out) throw DataError("failed writing " + path.string());
}

Archive load_archive(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  char magic[sizeof kMagic];
  if (!in.read(magic, sizeof magic) || !std::equal(magic, magic + sizeof magic, kMagic)) {
    throw DataError(path.string() + " is not a checkpoint file");
  }
  const auto version = binio::read_le<std::uint32_t>(in, "version");
  if (version != kArchiveVersion) {
    throw DataError("unsupported checkpoint version " + std::to_string(version));
  }
  Archive archive;
  archive.metadata = binio::read_string(in, "metadata");
  const auto count = binio::read_le<std::uint64_t>(in, "tensor count");
  for (std::uint64_t k = 0; k < count; ++k) {
    NamedTensor t;
    t.name = binio::read_string(in, "tensor name", 4096);
    const auto rank = binio::read_le<std::uint32_t>(in, "rank");
    if (rank > 2) throw DataError("tensor '" + t.name + "' has unsupported rank");
    ad::Shape shape;
    std::uint64_t total = 1;
    for (std::uint32_t d = 0; d < rank; ++d) {
      shape.push_back(binio::read_le<std::uint64_t>(in, "dimension"));
      total *= shape.back();
    }
    if (total > (1ull << 32)) throw DataError("tensor '" + t.name + "' is implausibly large");
    std::vector<double> data(total);
    for (auto& v : data) v = binio::read_le<double>(in, "tensor data");
    t.tensor = ad::Tensor::from(std::move(shape), std::move(data), true);
    archive.tensors.push_back(std::move(t));
  }
  return archive;
}

}  // namespace simast
