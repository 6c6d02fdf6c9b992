#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "authorid/errors.hpp"

namespace authorid {

// Little-endian binary file helpers shared by the FEMB/FMDL/FIDX formats.
// Byte order is explicit so files are identical on every platform.

class BinWriter {
public:
  explicit BinWriter(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) throw Error(errc::io_error, "cannot open for writing: " + path);
  }

  void magic(const char tag[4]) { out_.write(tag, 4); }
  void u8(uint8_t v) { out_.put(static_cast<char>(v)); }
  void u16(uint16_t v) { put_le(v); }
  void u32(uint32_t v) { put_le(v); }
  void u64(uint64_t v) { put_le(v); }
  void f32(float v) {
    uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_le(bits);
  }
  void bytes(const std::string& s) { out_.write(s.data(), static_cast<std::streamsize>(s.size())); }

  void close() {
    out_.close();
    if (!out_) throw Error(errc::io_error, "write failed");
  }

private:
  template <typename T>
  void put_le(T v) {
    unsigned char buf[sizeof(T)];
    for (size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    out_.write(reinterpret_cast<const char*>(buf), sizeof(T));
  }

  std::ofstream out_;
};

class BinReader {
public:
  explicit BinReader(const std::string& path) : in_(path, std::ios::binary), path_(path) {
    if (!in_) throw Error(errc::io_error, "cannot open for reading: " + path);
    in_.seekg(0, std::ios::end);
    size_ = static_cast<uint64_t>(in_.tellg());
    in_.seekg(0, std::ios::beg);
  }

  void expect_magic(const char tag[4]) {
    char buf[4];
    read_raw(buf, 4);
    if (std::memcmp(buf, tag, 4) != 0)
      throw Error(errc::bad_magic, path_ + ": expected magic '" + std::string(tag, 4) + "'");
  }

  uint8_t u8() {
    unsigned char b;
    read_raw(reinterpret_cast<char*>(&b), 1);
    return b;
  }
  uint16_t u16() { return get_le<uint16_t>(); }
  uint32_t u32() { return get_le<uint32_t>(); }
  uint64_t u64() { return get_le<uint64_t>(); }
  float f32() {
    uint32_t bits = get_le<uint32_t>();
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
  }
  std::string bytes(size_t n) {
    std::string s(n, '\0');
    read_raw(s.data(), n);
    return s;
  }
  void f32_array(float* dst, size_t n) {
    read_raw(reinterpret_cast<char*>(dst), n * 4);
    if constexpr (std::endian::native == std::endian::big) {
      for (size_t i = 0; i < n; ++i) {
        uint32_t bits;
        std::memcpy(&bits, dst + i, 4);
        bits = __builtin_bswap32(bits);
        std::memcpy(dst + i, &bits, 4);
      }
    }
  }

  uint64_t consumed() const { return consumed_; }
  uint64_t file_size() const { return size_; }

  // Formats are count-driven; a file with bytes left over is as malformed as
  // one that ends early.
  void expect_done() {
    if (consumed_ != size_)
      throw Error(errc::shape_mismatch,
                  path_ + ": " + std::to_string(size_ - consumed_) + " trailing bytes");
  }

private:
  void read_raw(char* dst, size_t n) {
    in_.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<size_t>(in_.gcount()) != n)
      throw Error(errc::truncated_file, path_ + ": unexpected end of file");
    consumed_ += n;
  }

  template <typename T>
  T get_le() {
    unsigned char buf[sizeof(T)];
    read_raw(reinterpret_cast<char*>(buf), sizeof(T));
    T v = 0;
    for (size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(buf[i]) << (8 * i);
    return v;
  }

  std::ifstream in_;
  std::string path_;
  uint64_t consumed_ = 0;
  uint64_t size_ = 0;
};

}  // namespace authorid
