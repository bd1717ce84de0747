#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace mgen {

/// Lower-case hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

/// Digest over every regular file below `root`: relative paths (sorted) and contents.
std::string tree_digest(const std::filesystem::path& root);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view data);

}  // namespace mgen
