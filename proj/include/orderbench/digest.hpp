#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace orderbench {

// Lowercase hex SHA-256 of the given bytes.
std::string sha256_hex(std::string_view bytes);

// SHA-256 of a file's raw contents. Throws std::runtime_error if unreadable.
std::string sha256_file(const std::filesystem::path& path);

// Reads a whole file in binary mode. Throws std::runtime_error if unreadable.
std::string read_file(const std::filesystem::path& path);

// Writes via a sibling temp file and rename, so readers never observe a
// partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

// Current UTC wall time as "YYYY-MM-DDTHH:MM:SS.mmmZ".
std::string utc_timestamp();

} // namespace orderbench
