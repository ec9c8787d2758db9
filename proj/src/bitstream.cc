#include "vvfc/bitstream.h"

#include "vvfc/errors.h"

namespace vvfc {

void BitWriter::Write(std::uint32_t value, int bits) {
  for (int b = bits - 1; b >= 0; --b) {
    if (used_bits_ == 0) out_.push_back(0);
    if ((value >> b) & 1u) out_.back() |= static_cast<std::uint8_t>(0x80u >> used_bits_);
    used_bits_ = (used_bits_ + 1) % 8;
  }
}

void BitWriter::AlignToByte() { used_bits_ = 0; }

void BitWriter::WriteByte(std::uint8_t value) {
  AlignToByte();
  out_.push_back(value);
}

std::uint32_t BitReader::Read(int bits) {
  if (bit_pos_ + static_cast<std::size_t>(bits) > in_.size() * 8) {
    throw FormatError("truncated bit stream");
  }
  std::uint32_t value = 0;
  for (int b = 0; b < bits; ++b) {
    const std::uint8_t byte = in_[bit_pos_ / 8];
    value = (value << 1) | ((byte >> (7 - bit_pos_ % 8)) & 1u);
    ++bit_pos_;
  }
  return value;
}

void BitReader::AlignToByte() { bit_pos_ = (bit_pos_ + 7) / 8 * 8; }

std::uint8_t BitReader::ReadByte() {
  AlignToByte();
  return static_cast<std::uint8_t>(Read(8));
}

int bits_for(std::uint64_t n) {
  int bits = 0;
  while ((std::uint64_t{1} << bits) < n) ++bits;
  return bits;
}

void put_u32_be(std::vector<std::uint8_t>& out, std::uint32_t value) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(value >> shift));
}

std::uint32_t get_u32_be(std::span<const std::uint8_t> in) {
  if (in.size() < 4) throw FormatError("truncated 32-bit field");
  return (std::uint32_t{in[0]} << 24) | (std::uint32_t{in[1]} << 16) | (std::uint32_t{in[2]} << 8) |
         std::uint32_t{in[3]};
}

}  // namespace vvfc
