#ifndef EMOCORR_DIGEST_HPP
#define EMOCORR_DIGEST_HPP

#include <filesystem>
#include <string>
#include <string_view>

namespace emocorr {

// Lower-case hex SHA-256.
std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace emocorr

#endif  // EMOCORR_DIGEST_HPP
