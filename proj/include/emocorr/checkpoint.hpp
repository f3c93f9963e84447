#ifndef EMOCORR_CHECKPOINT_HPP
#define EMOCORR_CHECKPOINT_HPP

#include <filesystem>
#include <istream>
#include <ostream>

#include "emocorr/nn.hpp"

namespace emocorr::nn {

// Binary checkpoint, all integers and doubles little-endian:
//
//   magic    8 bytes  "EMOCKPT\0"
//   version  u32      1
//   variant  u32      1 = M1, 2 = M2
//   dims     7 x u64  vocab, embedding, conv, hidden1, hidden2, window, classes
//   count    u32      number of tensors
//   tensor   u32 name length, name bytes, u64 rows, u64 cols,
//            rows*cols IEEE-754 binary64 values in row-major order
//
// Loading validates every tensor name and shape; save/load is bit-exact.
inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(std::ostream& out, const ModelParams& params);
void save_checkpoint(const std::filesystem::path& path, const ModelParams& params);
ModelParams load_checkpoint(std::istream& in);
ModelParams load_checkpoint(const std::filesystem::path& path);

}  // namespace emocorr::nn

#endif  // EMOCORR_CHECKPOINT_HPP
