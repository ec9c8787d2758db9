#include "vvfc/metrics.h"

#include <cmath>
#include <cstdio>

#include "vvfc/errors.h"

namespace vvfc {

namespace {

std::string format_real(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  return buf;
}

}  // namespace

std::string Psnr::ToString() const { return infinite_ ? "inf" : format_real(db_); }

double mse(const PixelImage& a, const PixelImage& b) {
  if (a.depth() != b.depth()) throw InvalidArgument("images differ in size");
  const auto pa = a.pixels();
  const auto pb = b.pixels();
  double sum = 0.0;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    const double d = static_cast<double>(pa[i]) - static_cast<double>(pb[i]);
    sum += d * d;
  }
  return sum / static_cast<double>(pa.size());
}

Psnr psnr_from_mse(double mse) {
  if (mse < 0.0) throw InvalidArgument("negative mse");
  if (mse == 0.0) return Psnr::Infinite();
  return Psnr::Finite(10.0 * std::log10(255.0 * 255.0 / mse));
}

Psnr psnr(const PixelImage& a, const PixelImage& b) { return psnr_from_mse(mse(a, b)); }

double compression_ratio(std::size_t raw_bytes, std::size_t payload_bytes) {
  if (payload_bytes == 0) throw InvalidArgument("payload size must be positive");
  return static_cast<double>(raw_bytes) / static_cast<double>(payload_bytes);
}

std::string QualityReport::ToCsvRow() const {
  return format_real(mse) + "," + psnr.ToString() + "," + std::to_string(payload_bytes) + "," +
         format_real(compression_ratio);
}

QualityReport make_report(const PixelImage& original, const PixelImage& reconstructed, std::size_t payload_bytes) {
  QualityReport r;
  r.mse = mse(original, reconstructed);
  r.psnr = psnr_from_mse(r.mse);
  r.payload_bytes = payload_bytes;
  r.compression_ratio = compression_ratio(original.size(), payload_bytes);
  return r;
}

}  // namespace vvfc
