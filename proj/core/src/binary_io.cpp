#include "sumdca/binary_io.hpp"

#include <bit>
#include <istream>
#include <ostream>

#include "sumdca/errors.hpp"

namespace sumdca {

void BinaryWriter::u8(std::uint8_t v) { out_.put(static_cast<char>(v)); }

void BinaryWriter::u32(std::uint32_t v) {
  char buf[4];
  for (int i = 0; i < 4; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFFu);
  out_.write(buf, 4);
}

void BinaryWriter::u64(std::uint64_t v) {
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFFu);
  out_.write(buf, 8);
}

void BinaryWriter::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void BinaryWriter::bytes(std::span<const std::uint8_t> data) {
  out_.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
}

void BinaryWriter::raw(std::string_view text) {
  out_.write(text.data(), static_cast<std::streamsize>(text.size()));
}

void BinaryWriter::string(std::string_view text) {
  u32(static_cast<std::uint32_t>(text.size()));
  raw(text);
}

void BinaryReader::read(void* dst, std::size_t n) {
  in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in_.gcount()) != n)
    throw DataError(DataErrorKind::kTruncated,
                    source_ + ": truncated while reading section '" + section_ + "'");
}

std::uint8_t BinaryReader::u8() {
  unsigned char c;
  read(&c, 1);
  return c;
}

std::uint32_t BinaryReader::u32() {
  unsigned char buf[4];
  read(buf, 4);
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | buf[i];
  return v;
}

std::uint64_t BinaryReader::u64() {
  unsigned char buf[8];
  read(buf, 8);
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | buf[i];
  return v;
}

double BinaryReader::f64() { return std::bit_cast<double>(u64()); }

std::vector<std::uint8_t> BinaryReader::bytes(std::size_t n) {
  std::vector<std::uint8_t> out(n);
  if (n > 0) read(out.data(), n);
  return out;
}

std::string BinaryReader::raw(std::size_t n) {
  std::string out(n, '\0');
  if (n > 0) read(out.data(), n);
  return out;
}

std::string BinaryReader::string() { return raw(u32()); }

bool BinaryReader::at_end() { return in_.peek() == std::char_traits<char>::eof(); }

}  // namespace sumdca
