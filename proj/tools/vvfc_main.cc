// Command-line front end for the V-variable and fractal block codecs.
//
// Exit codes: 0 success, 1 invalid arguments, 2 I/O failure, 3 corrupt input.

#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vvfc/errors.h"
#include "vvfc/fbc.h"
#include "vvfc/fractalgen.h"
#include "vvfc/imaging.h"
#include "vvfc/metrics.h"
#include "vvfc/vvar.h"

namespace {

using namespace vvfc;

constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;
constexpr int kExitCorrupt = 3;

struct CliConfig {
  std::string input;
  std::string input2;
  std::string output;
  int v = 0;
  std::uint64_t seed = 0;
  int restarts = 5;
  int max_iterations = 100;
  int small_size = 8;
  int iterations = 10;
  int depth = kDefaultDepth;
  int n = 4;
  bool all_levels = false;
  std::string skeleton_path;
  std::string labels_path;
  std::vector<int> values;
};

void write_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  write_file_atomic(path, bytes);
}

std::string read_text(const std::string& path) {
  const auto bytes = read_file(path);
  return std::string(bytes.begin(), bytes.end());
}

EncodeOptions encode_options(const CliConfig& cfg) {
  EncodeOptions opts;
  opts.cluster.seed = cfg.seed;
  opts.cluster.restarts = cfg.restarts;
  opts.cluster.max_iterations = cfg.max_iterations;
  return opts;
}

void check_cluster_flags(const CliConfig& cfg) {
  if (cfg.restarts < 1) throw InvalidArgument("--restarts must be >= 1");
  if (cfg.max_iterations < 1) throw InvalidArgument("--max-iter must be >= 1");
}

void check_iterations(const CliConfig& cfg) {
  if (cfg.iterations < 1) throw InvalidArgument("--iters must be >= 1");
}

int run_vv_encode(const CliConfig& cfg) {
  check_cluster_flags(cfg);
  const PixelImage img = read_pgm_file(cfg.input);
  check_v_range(cfg.v, img.depth());
  const VVarCode code = encode(img, cfg.v, encode_options(cfg));
  const auto bytes = serialize(code);
  write_bytes(cfg.output, bytes);
  std::cout << make_report(img, decode(code), bytes.size() - kVvcHeaderSize).ToCsvRow() << '\n';
  return 0;
}

int run_vv_decode(const CliConfig& cfg) {
  const VVarCode code = deserialize(read_file(cfg.input));
  write_bytes(cfg.output, save_pgm(decode(code)));
  return 0;
}

int run_fbc_encode(const CliConfig& cfg) {
  check_iterations(cfg);
  const PixelImage img = read_pgm_file(cfg.input);
  check_fbc_geometry(img.depth(), cfg.small_size);
  const FbcParams params{cfg.small_size, cfg.iterations};
  const FbcCode code = fbc_encode(img, params);
  write_bytes(cfg.output, fbc_serialize(code));
  std::cout << make_report(img, fbc_decode(code, params), fbc_payload_bytes(code)).ToCsvRow() << '\n';
  return 0;
}

int run_fbc_decode(const CliConfig& cfg) {
  check_iterations(cfg);
  const FbcCode code = fbc_deserialize(read_file(cfg.input));
  const FbcParams params{code.small_size, cfg.iterations};
  write_bytes(cfg.output, save_pgm(fbc_decode(code, params)));
  return 0;
}

int run_psnr(const CliConfig& cfg) {
  const PixelImage a = read_pgm_file(cfg.input);
  const PixelImage b = read_pgm_file(cfg.input2);
  if (a.depth() != b.depth()) throw InvalidArgument("images differ in size");
  const double m = mse(a, b);
  std::ostringstream row;
  row.precision(6);
  row << std::fixed << m << ',' << psnr_from_mse(m).ToString();
  std::cout << row.str() << '\n';
  return 0;
}

void emit_levels(const CliConfig& cfg, const auto& intervals_at) {
  if (!cfg.all_levels) {
    write_intervals_csv(std::cout, intervals_at(cfg.n));
    return;
  }
  for (int level = 0; level <= cfg.n; ++level) {
    std::ostringstream rows;
    write_intervals_csv(rows, intervals_at(level));
    std::istringstream lines(rows.str());
    for (std::string line; std::getline(lines, line);) std::cout << level << ',' << line << '\n';
  }
}

int run_cantor(const CliConfig& cfg) {
  if (cfg.n < 0 || cfg.n > 20) throw InvalidArgument("--n must be in 0..20");
  const Ifs ifs = cantor_ifs();
  emit_levels(cfg, [&](int n) { return attractor_intervals(ifs, n); });
  return 0;
}

int run_codetree(const CliConfig& cfg) {
  const SkeletonMatrix skeleton = cfg.skeleton_path.empty()
                                      ? demo_skeleton()
                                      : SkeletonMatrix::FromRows(parse_int_grid(read_text(cfg.skeleton_path)), 2);
  const LabelMatrix labels =
      cfg.labels_path.empty() ? demo_labels() : LabelMatrix(parse_int_grid(read_text(cfg.labels_path)));
  const CodeTreeLevels tree = expand_skeleton(skeleton, labels);
  if (cfg.n < 0 || cfg.n > tree.depth()) {
    throw InvalidArgument("--n must be in 0.." + std::to_string(tree.depth()) + " for this code tree");
  }
  const IfsFamily family = demo_family();
  emit_levels(cfg, [&](int n) { return code_tree_intervals(family, tree, n); });
  return 0;
}

int run_vsquare(const CliConfig& cfg) {
  if (cfg.depth < 0 || cfg.depth > kMaxDepth) throw InvalidArgument("--depth out of range");
  SkeletonMatrix skeleton(1, 4, std::max(1, cfg.depth));
  std::vector<std::uint8_t> values;
  if (!cfg.skeleton_path.empty()) {
    skeleton = SkeletonMatrix::FromRows(parse_int_grid(read_text(cfg.skeleton_path)), 4);
    for (int value : cfg.values) {
      if (value < 0 || value > 255) throw InvalidArgument("--values entries must be in 0..255");
      values.push_back(static_cast<std::uint8_t>(value));
    }
    if (values.size() != static_cast<std::size_t>(skeleton.v())) {
      throw InvalidArgument("--values needs " + std::to_string(skeleton.v()) + " gray values");
    }
  } else {
    if (cfg.v < 1 || cfg.v > 1 << 16) throw InvalidArgument("--v must be in 1..65536");
    skeleton = random_skeleton(cfg.v, 4, std::max(1, cfg.depth), cfg.seed);
    for (int j = 0; j < cfg.v; ++j) {
      values.push_back(cfg.v == 1 ? 128 : round_to_gray(255.0 * j / (cfg.v - 1)));
    }
  }
  write_bytes(cfg.output, save_pgm(render_vvariable_square(skeleton, values, cfg.depth)));
  return 0;
}

int run_table(const CliConfig& cfg) {
  check_cluster_flags(cfg);
  const PixelImage img = read_pgm_file(cfg.input);
  if (img.depth() != kDefaultDepth) throw InvalidArgument("the size table needs a 512x512 image");
  std::cout << "V,payload_bytes,psnr_db,ratio\n";
  for (int n = 0, v = 1; n <= 5; ++n, v *= 4) {
    const VVarCode code = encode(img, v, encode_options(cfg));
    const std::size_t payload = serialize(code).size() - kVvcHeaderSize;
    const QualityReport r = make_report(img, decode(code), payload);
    char ratio[32];
    std::snprintf(ratio, sizeof ratio, "%.1f", r.compression_ratio);
    std::cout << v << ',' << payload << ',' << r.psnr.ToString() << ',' << ratio << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"V-variable fractal image codec and fractal block coding baseline"};
  app.require_subcommand(1);
  CliConfig cfg;
  int (*handler)(const CliConfig&) = nullptr;

  auto* vv_encode = app.add_subcommand("vv-encode", "Encode a PGM as a V-variable code (VVC1)");
  vv_encode->add_option("input", cfg.input, "Input PGM")->required();
  vv_encode->add_option("output", cfg.output, "Output .vvc")->required();
  vv_encode->add_option("--v", cfg.v, "Number of distinct pieces per level")->required();
  vv_encode->add_option("--seed", cfg.seed, "k-means seed");
  vv_encode->add_option("--restarts", cfg.restarts, "k-means restarts per level");
  vv_encode->add_option("--max-iter", cfg.max_iterations, "k-means iteration cap");
  vv_encode->callback([&] { handler = run_vv_encode; });

  auto* vv_decode = app.add_subcommand("vv-decode", "Decode a VVC1 file to PGM");
  vv_decode->add_option("input", cfg.input, "Input .vvc")->required();
  vv_decode->add_option("output", cfg.output, "Output PGM")->required();
  vv_decode->callback([&] { handler = run_vv_decode; });

  auto* fbc_enc = app.add_subcommand("fbc-encode", "Encode a PGM with fractal block coding (FBC1)");
  fbc_enc->add_option("input", cfg.input, "Input PGM")->required();
  fbc_enc->add_option("output", cfg.output, "Output .fbc")->required();
  fbc_enc->add_option("--small", cfg.small_size, "Small block side (power of two)");
  fbc_enc->add_option("--iters", cfg.iterations, "Decoder iterations for the reported PSNR");
  fbc_enc->callback([&] { handler = run_fbc_encode; });

  auto* fbc_dec = app.add_subcommand("fbc-decode", "Decode an FBC1 file to PGM");
  fbc_dec->add_option("input", cfg.input, "Input .fbc")->required();
  fbc_dec->add_option("output", cfg.output, "Output PGM")->required();
  fbc_dec->add_option("--iters", cfg.iterations, "Decoder iterations");
  fbc_dec->callback([&] { handler = run_fbc_decode; });

  auto* psnr_cmd = app.add_subcommand("psnr", "Print mse,psnr_db of two PGM images");
  psnr_cmd->add_option("a", cfg.input, "First PGM")->required();
  psnr_cmd->add_option("b", cfg.input2, "Second PGM")->required();
  psnr_cmd->callback([&] { handler = run_psnr; });

  auto* fractal = app.add_subcommand("fractal", "Fractal generator demos");
  fractal->require_subcommand(1);
  auto* cantor = fractal->add_subcommand("cantor", "Intervals of the n-th Cantor set approximant");
  cantor->add_option("--n", cfg.n, "Level");
  cantor->add_flag("--all-levels", cfg.all_levels, "Emit levels 0..n with a level column");
  cantor->callback([&] { handler = run_cantor; });
  auto* codetree = fractal->add_subcommand("codetree", "Intervals of a V-variable code tree fractal");
  codetree->add_option("--n", cfg.n, "Level");
  codetree->add_option("--skeleton", cfg.skeleton_path, "Skeleton matrix file (M = 2)");
  codetree->add_option("--labels", cfg.labels_path, "Label matrix file");
  codetree->add_flag("--all-levels", cfg.all_levels, "Emit levels 0..n with a level column");
  codetree->callback([&] { handler = run_codetree; });
  auto* vsquare = fractal->add_subcommand("vsquare", "Render a coloured V-variable square as PGM");
  vsquare->add_option("output", cfg.output, "Output PGM")->required();
  vsquare->add_option("--skeleton", cfg.skeleton_path, "Skeleton matrix file (M = 4)");
  vsquare->add_option("--values", cfg.values, "Gray value per type")->delimiter(',');
  vsquare->add_option("--v", cfg.v, "Random skeleton with V types")->excludes("--skeleton");
  vsquare->add_option("--seed", cfg.seed, "Random skeleton seed");
  vsquare->add_option("--depth", cfg.depth, "Image depth (side 2^depth)");
  vsquare->callback([&] { handler = run_vsquare; });

  auto* table = app.add_subcommand("table", "Payload/PSNR table for V = 1, 4, ..., 1024");
  table->add_option("input", cfg.input, "512x512 PGM")->required();
  table->add_option("--seed", cfg.seed, "k-means seed");
  table->add_option("--restarts", cfg.restarts, "k-means restarts per level");
  table->add_option("--max-iter", cfg.max_iterations, "k-means iteration cap");
  table->callback([&] { handler = run_table; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    return handler(cfg);
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitCorrupt;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: corrupt input: " << e.what() << '\n';
    return kExitCorrupt;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
}
