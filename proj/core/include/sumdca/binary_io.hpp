#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sumdca {

/// Little-endian writer; doubles are stored as their IEEE-754 bit pattern.
class BinaryWriter {
 public:
  explicit BinaryWriter(std::ostream& out) : out_(out) {}

  void u8(std::uint8_t v);
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void f64(double v);
  void bytes(std::span<const std::uint8_t> data);
  void raw(std::string_view text);
  /// u32 length prefix followed by the bytes.
  void string(std::string_view text);

 private:
  std::ostream& out_;
};

/// Counterpart of BinaryWriter. Running out of input raises
/// DataError(kTruncated) naming the source and the current section.
class BinaryReader {
 public:
  BinaryReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  void section(std::string name) { section_ = std::move(name); }
  const std::string& current_section() const { return section_; }
  const std::string& source() const { return source_; }

  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  double f64();
  std::vector<std::uint8_t> bytes(std::size_t n);
  std::string raw(std::size_t n);
  std::string string();
  bool at_end();

 private:
  void read(void* dst, std::size_t n);

  std::istream& in_;
  std::string source_;
  std::string section_ = "header";
};

}  // namespace sumdca
