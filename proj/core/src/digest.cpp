// SPDX-License-Identifier: Apache-2.0

#include "nmf/digest.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <memory>
#include <stdexcept>

#include "nmf/textio.hpp"

namespace nmf {
namespace {

std::string hex_digest(const unsigned char* bytes, unsigned len) {
  static const char* hexdig = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned i = 0; i < len; ++i) {
    out.push_back(hexdig[bytes[i] >> 4]);
    out.push_back(hexdig[bytes[i] & 0xf]);
  }
  return out;
}

}  // namespace

std::string sha256_string(std::string_view data) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(
      EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx) throw std::runtime_error("sha256: cannot allocate context");
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned len = 0;
  if (EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), md, &len) != 1)
    throw std::runtime_error("sha256: digest computation failed");
  return hex_digest(md, len);
}

std::string sha256_file(const std::filesystem::path& path) {
  return sha256_string(read_text_file(path.string()));
}

}  // namespace nmf
