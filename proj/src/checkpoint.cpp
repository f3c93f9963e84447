#include "emocorr/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "emocorr/errors.hpp"

namespace emocorr::nn {

namespace {

constexpr char kMagic[8] = {'E', 'M', 'O', 'C', 'K', 'P', 'T', '\0'};

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(std::is_unsigned_v<T>);
  unsigned char bytes[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<unsigned char>(value >> (8 * i));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) {
    throw DataError("checkpoint truncated");
  }
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(bytes[i]) << (8 * i);
  return value;
}

}  // namespace

void save_checkpoint(std::ostream& out, const ModelParams& params) {
  params.validate();
  out.write(kMagic, sizeof(kMagic));
  put_le<std::uint32_t>(out, kCheckpointVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(params.variant));
  for (std::size_t v : {params.dims.vocab, params.dims.embedding, params.dims.conv,
                        params.dims.hidden1, params.dims.hidden2, kWindow, kClasses}) {
    put_le<std::uint64_t>(out, v);
  }
  const auto tensors = params.tensors();
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(tensors.size()));
  for (const auto& t : tensors) {
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(t.name.size()));
    out.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
    put_le<std::uint64_t>(out, t.tensor->rows());
    put_le<std::uint64_t>(out, t.tensor->cols());
    for (double v : t.tensor->values()) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
  }
  if (!out) throw IoError("failed writing checkpoint");
}

void save_checkpoint(const std::filesystem::path& path, const ModelParams& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  save_checkpoint(out, params);
}

ModelParams load_checkpoint(std::istream& in) {
  char magic[sizeof(kMagic)];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw DataError("not a checkpoint file (bad magic)");
  }
  const auto version = get_le<std::uint32_t>(in);
  if (version != kCheckpointVersion) {
    throw DataError("unsupported checkpoint version " + std::to_string(version));
  }
  const auto variant_tag = get_le<std::uint32_t>(in);
  if (variant_tag != 1 && variant_tag != 2) {
    throw DataError("unknown model variant " + std::to_string(variant_tag));
  }
  Dimensions dims;
  dims.vocab = get_le<std::uint64_t>(in);
  dims.embedding = get_le<std::uint64_t>(in);
  dims.conv = get_le<std::uint64_t>(in);
  dims.hidden1 = get_le<std::uint64_t>(in);
  dims.hidden2 = get_le<std::uint64_t>(in);
  if (get_le<std::uint64_t>(in) != kWindow || get_le<std::uint64_t>(in) != kClasses) {
    throw DataError("checkpoint window or class count differs from this build");
  }
  if (dims.vocab == 0 || dims.embedding == 0 || dims.conv == 0 || dims.hidden1 == 0 ||
      dims.hidden2 == 0 || dims.vocab > (1u << 26) || dims.embedding > 4096 ||
      dims.conv > 4096 || dims.hidden1 > 4096 || dims.hidden2 > 4096) {
    throw DataError("checkpoint dimensions out of range");
  }

  ModelParams params = ModelParams::zeros(static_cast<ModelVariant>(variant_tag), dims);
  auto tensors = params.tensors();
  const auto count = get_le<std::uint32_t>(in);
  if (count != tensors.size()) {
    throw DataError("checkpoint holds " + std::to_string(count) + " tensors, expected " +
                    std::to_string(tensors.size()));
  }
  for (auto& t : tensors) {
    const auto name_len = get_le<std::uint32_t>(in);
    if (name_len > 256) throw DataError("checkpoint tensor name too long");
    std::string name(name_len, '\0');
    if (!in.read(name.data(), name_len)) throw DataError("checkpoint truncated");
    if (name != t.name) {
      throw DataError("checkpoint tensor '" + name + "' found where '" + std::string(t.name) +
                      "' was expected");
    }
    const auto rows = get_le<std::uint64_t>(in);
    const auto cols = get_le<std::uint64_t>(in);
    if (rows != t.tensor->rows() || cols != t.tensor->cols()) {
      throw DataError("checkpoint tensor '" + name + "' has inconsistent shape");
    }
    for (auto& v : t.tensor->values()) v = std::bit_cast<double>(get_le<std::uint64_t>(in));
  }
  return params;
}

ModelParams load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  return load_checkpoint(in);
}

}  // namespace emocorr::nn
