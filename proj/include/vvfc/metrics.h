#ifndef VVFC_METRICS_H_
#define VVFC_METRICS_H_

#include <cstddef>
#include <string>

#include "vvfc/imaging.h"

namespace vvfc {

// PSNR in dB against peak 255; identical images give the infinite sentinel
// rather than a floating-point overflow.
class Psnr {
 public:
  static Psnr Infinite() { return Psnr(0.0, true); }
  static Psnr Finite(double db) { return Psnr(db, false); }

  bool is_infinite() const { return infinite_; }
  // Meaningless when is_infinite().
  double db() const { return db_; }
  std::string ToString() const;

  bool operator==(const Psnr&) const = default;

 private:
  Psnr(double db, bool infinite) : db_(db), infinite_(infinite) {}
  double db_;
  bool infinite_;
};

double mse(const PixelImage& a, const PixelImage& b);
Psnr psnr_from_mse(double mse);
Psnr psnr(const PixelImage& a, const PixelImage& b);
double compression_ratio(std::size_t raw_bytes, std::size_t payload_bytes);

struct QualityReport {
  double mse = 0.0;
  Psnr psnr = Psnr::Infinite();
  std::size_t payload_bytes = 0;
  double compression_ratio = 0.0;

  // "mse,psnr_db,payload_bytes,ratio"
  std::string ToCsvRow() const;
};

QualityReport make_report(const PixelImage& original, const PixelImage& reconstructed, std::size_t payload_bytes);

}  // namespace vvfc

#endif  // VVFC_METRICS_H_
