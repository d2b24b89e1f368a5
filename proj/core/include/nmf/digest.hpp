// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>

namespace nmf {

// Lowercase hex SHA-256 of a file's bytes; used to pin inputs in run
// manifests. Throws on I/O errors.
std::string sha256_file(const std::filesystem::path& path);

std::string sha256_string(std::string_view data);

}  // namespace nmf
