// Copyright (c) 2026 The roadbev Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "roadbev/error.hpp"

namespace roadbev {

// Little-endian byte packing. All binary file formats in this project are
// written through these helpers so the bytes are identical on every platform.
void put_u16(std::string& out, std::uint16_t v);
void put_u32(std::string& out, std::uint32_t v);
void put_u64(std::string& out, std::uint64_t v);
void put_f32(std::string& out, float v);
void put_f64(std::string& out, double v);

// Sequential reader over a byte buffer; throws ParseError on underrun.
class ByteReader {
 public:
  ByteReader(std::string_view data, std::string context)
      : data_(data), context_(std::move(context)) {}

  std::uint16_t get_u16();
  std::uint32_t get_u32();
  std::uint64_t get_u64();
  float get_f32();
  double get_f64();
  std::string get_bytes(std::size_t n);
  bool at_end() const { return pos_ == data_.size(); }
  std::size_t pos() const { return pos_; }

 private:
  void need(std::size_t n) const;
  std::string_view data_;
  std::string context_;
  std::size_t pos_ = 0;
};

// FNV-1a 64-bit; used for the provenance digests in mapping files.
std::uint64_t fnv1a(const void* data, std::size_t n,
                    std::uint64_t h = 0xcbf29ce484222325ull);
std::uint64_t fnv1a(std::string_view s);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace roadbev
