#ifndef VVFC_BITSTREAM_H_
#define VVFC_BITSTREAM_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace vvfc {

// Packs unsigned fields most-significant-bit first into a byte buffer.
class BitWriter {
 public:
  explicit BitWriter(std::vector<std::uint8_t>& out) : out_(out) {}

  void Write(std::uint32_t value, int bits);
  // Zero-fills up to the next byte boundary.
  void AlignToByte();
  void WriteByte(std::uint8_t value);

 private:
  std::vector<std::uint8_t>& out_;
  int used_bits_ = 0;  // bits already used in out_.back(); 0 means aligned
};

class BitReader {
 public:
  explicit BitReader(std::span<const std::uint8_t> in) : in_(in) {}

  // Throws FormatError when the stream runs out.
  std::uint32_t Read(int bits);
  void AlignToByte();
  std::uint8_t ReadByte();

  std::size_t bit_position() const { return bit_pos_; }
  std::size_t bytes_remaining() const { return in_.size() - (bit_pos_ + 7) / 8; }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t bit_pos_ = 0;
};

// ceil(log2(n)) for n >= 1; 0 for n == 1.
int bits_for(std::uint64_t n);

void put_u32_be(std::vector<std::uint8_t>& out, std::uint32_t value);
std::uint32_t get_u32_be(std::span<const std::uint8_t> in);

}  // namespace vvfc

#endif  // VVFC_BITSTREAM_H_
