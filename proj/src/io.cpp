// Copyright (c) 2026 The roadbev Authors
// SPDX-License-Identifier: Apache-2.0

#include "roadbev/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace roadbev {

namespace {

template <typename T>
void put_le(std::string& out, T v) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i)
      std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
  }
  out.append(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get_le(std::string_view data, std::size_t pos) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, data.data() + pos, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i)
      std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
  }
  T v;
  std::memcpy(&v, bytes, sizeof(T));
  return v;
}

}  // namespace

void put_u16(std::string& out, std::uint16_t v) { put_le(out, v); }
void put_u32(std::string& out, std::uint32_t v) { put_le(out, v); }
void put_u64(std::string& out, std::uint64_t v) { put_le(out, v); }
void put_f32(std::string& out, float v) { put_le(out, v); }
void put_f64(std::string& out, double v) { put_le(out, v); }

void ByteReader::need(std::size_t n) const {
  if (pos_ + n > data_.size()) {
    throw ParseError(context_ + ": truncated at byte " + std::to_string(pos_) +
                     ", need " + std::to_string(n) + " more");
  }
}

std::uint16_t ByteReader::get_u16() {
  need(2);
  auto v = get_le<std::uint16_t>(data_, pos_);
  pos_ += 2;
  return v;
}

std::uint32_t ByteReader::get_u32() {
  need(4);
  auto v = get_le<std::uint32_t>(data_, pos_);
  pos_ += 4;
  return v;
}

std::uint64_t ByteReader::get_u64() {
  need(8);
  auto v = get_le<std::uint64_t>(data_, pos_);
  pos_ += 8;
  return v;
}

float ByteReader::get_f32() {
  need(4);
  auto v = get_le<float>(data_, pos_);
  pos_ += 4;
  return v;
}

double ByteReader::get_f64() {
  need(8);
  auto v = get_le<double>(data_, pos_);
  pos_ += 8;
  return v;
}

std::string ByteReader::get_bytes(std::size_t n) {
  need(n);
  std::string s(data_.substr(pos_, n));
  pos_ += n;
  return s;
}

std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t fnv1a(std::string_view s) { return fnv1a(s.data(), s.size()); }

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed on " + path.string());
  return bytes;
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed on " + path.string());
}

}  // namespace roadbev
