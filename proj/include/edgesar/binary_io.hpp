#pragma once

// Little-endian primitive read/write helpers shared by the binary formats.

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "edgesar/errors.hpp"

namespace edgesar::binio {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

template <typename T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
  if (!out) throw IoError("write failed");
}

/// Reads one value, tracking the byte offset so errors can name it.
class Reader {
 public:
  Reader(std::istream& in, std::string what, std::uint64_t offset = 0)
      : in_(in), what_(std::move(what)), offset_(offset) {}

  template <typename T>
  T get() {
    T value{};
    in_.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (in_.gcount() != static_cast<std::streamsize>(sizeof(T))) {
      throw IoError(what_ + ": truncated at byte offset " + std::to_string(offset_));
    }
    offset_ += sizeof(T);
    return value;
  }

  /// True when no bytes remain.
  bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }
  std::uint64_t offset() const { return offset_; }
  [[noreturn]] void fail(const std::string& msg) const {
    throw IoError(what_ + ": " + msg + " at byte offset " + std::to_string(offset_));
  }

 private:
  std::istream& in_;
  std::string what_;
  std::uint64_t offset_ = 0;
};

}  // namespace edgesar::binio
