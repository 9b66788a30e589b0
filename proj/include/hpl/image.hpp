#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "hpl/point_cloud.hpp"
#include "hpl/random.hpp"

namespace hpl {

// Grayscale intensity field in [0,1], row-major. Dynamic range is fixed at
// L = 1 for the quality metrics; 8-bit files are divided by their maxval on
// load.
struct ImageGrid {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> v;

  ImageGrid() = default;
  ImageGrid(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), v(r * c, fill) {}

  double& at(std::size_t i, std::size_t j) { return v[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return v[i * cols + j]; }
  std::size_t pixel_count() const { return rows * cols; }

  void clamp01() {
    for (double& x : v) x = std::clamp(x, 0.0, 1.0);
  }
};

// Observed pixel set of a partially sampled image.
struct PixelMask {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<char> flags;  // row-major observation flags

  PixelMask() = default;
  PixelMask(std::size_t r, std::size_t c) : rows(r), cols(c), flags(r * c, 0) {}

  bool contains(std::size_t i, std::size_t j) const {
    return flags[i * cols + j] != 0;
  }
  void add(std::size_t i, std::size_t j) {
    if (i >= rows || j >= cols)
      throw std::invalid_argument("PixelMask: coordinate out of range");
    flags[i * cols + j] = 1;
  }
  std::size_t count() const {
    std::size_t c = 0;
    for (char f : flags) c += f != 0;
    return c;
  }
  bool empty() const { return count() == 0; }
};

// Exact-count random mask: round(rate * pixels) distinct pixels chosen by a
// seeded shuffle.
inline PixelMask sample_mask(std::size_t rows, std::size_t cols, double rate,
                             std::uint64_t seed) {
  if (!(rate > 0.0 && rate <= 1.0))
    throw std::invalid_argument("sample_mask: rate must be in (0, 1]");
  PixelMask mask(rows, cols);
  const std::size_t n = rows * cols;
  const auto want = static_cast<std::size_t>(
      std::min<double>(static_cast<double>(n),
                       std::llround(rate * static_cast<double>(n))));
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  Rng rng(seed);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const std::size_t j = i + rng.index(n - i);
    std::swap(idx[i], idx[j]);
  }
  for (std::size_t t = 0; t < want; ++t) mask.flags[idx[t]] = 1;
  if (mask.empty()) throw std::invalid_argument("sample_mask: empty mask");
  return mask;
}

// Mask CSV: rows "i,j".
inline PixelMask load_mask(const std::filesystem::path& path, std::size_t rows,
                           std::size_t cols) {
  PixelMask mask(rows, cols);
  detail::for_each_csv_row(
      path, [&](std::size_t row, const std::vector<double>& fields) {
        if (fields.size() != 2)
          throw std::invalid_argument("parse error at row " +
                                      std::to_string(row) +
                                      ": expected \"i,j\"");
        const auto i = static_cast<long long>(fields[0]);
        const auto j = static_cast<long long>(fields[1]);
        if (i < 0 || j < 0 || static_cast<std::size_t>(i) >= rows ||
            static_cast<std::size_t>(j) >= cols)
          throw std::invalid_argument("mask row " + std::to_string(row) +
                                      ": pixel out of range");
        mask.add(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      });
  if (mask.empty()) throw std::invalid_argument("empty mask: " + path.string());
  return mask;
}

inline void save_mask(const PixelMask& mask, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (std::size_t i = 0; i < mask.rows; ++i)
    for (std::size_t j = 0; j < mask.cols; ++j)
      if (mask.contains(i, j)) out << i << "," << j << "\n";
}

// ---------------------------------------------------------------------------
// PGM I/O (P2 ASCII and P5 binary, 8 bit)
// ---------------------------------------------------------------------------

namespace detail {

inline int pgm_next_token(std::istream& in, std::string& tok) {
  tok.clear();
  int c = in.get();
  for (;;) {
    while (c == '#') {  // comment to end of line
      while (c != '\n' && c != EOF) c = in.get();
      c = in.get();
    }
    if (c == EOF) return EOF;
    if (!std::isspace(c)) break;
    c = in.get();
  }
  while (c != EOF && !std::isspace(c) && c != '#') {
    tok.push_back(static_cast<char>(c));
    c = in.get();
  }
  if (c == '#') in.unget();
  return 0;
}

}  // namespace detail

inline ImageGrid load_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open file: " + path.string());
  std::string tok;
  if (detail::pgm_next_token(in, tok) == EOF || (tok != "P2" && tok != "P5"))
    throw std::invalid_argument("not a P2/P5 PGM file: " + path.string());
  const bool binary = tok == "P5";
  long long w = 0, h = 0, maxval = 0;
  for (long long* field : {&w, &h, &maxval}) {
    if (detail::pgm_next_token(in, tok) == EOF)
      throw std::invalid_argument("truncated PGM header: " + path.string());
    *field = std::stoll(tok);
  }
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255)
    throw std::invalid_argument("unsupported PGM header (8-bit only): " +
                                path.string());
  ImageGrid img(static_cast<std::size_t>(h), static_cast<std::size_t>(w));
  const double scale = 1.0 / static_cast<double>(maxval);
  if (binary) {
    std::vector<unsigned char> buf(img.pixel_count());
    in.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(buf.size()));
    if (static_cast<std::size_t>(in.gcount()) != buf.size())
      throw std::invalid_argument("truncated PGM data: " + path.string());
    for (std::size_t t = 0; t < buf.size(); ++t) img.v[t] = buf[t] * scale;
  } else {
    for (std::size_t t = 0; t < img.pixel_count(); ++t) {
      if (detail::pgm_next_token(in, tok) == EOF)
        throw std::invalid_argument("truncated PGM data: " + path.string());
      img.v[t] = std::stod(tok) * scale;
    }
  }
  img.clamp01();
  return img;
}

inline void save_pgm(const ImageGrid& img, const std::filesystem::path& path,
                     bool binary = true) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << (binary ? "P5" : "P2") << "\n"
      << img.cols << " " << img.rows << "\n255\n";
  auto quantize = [](double x) {
    const long q = std::lround(std::clamp(x, 0.0, 1.0) * 255.0);
    return static_cast<unsigned char>(std::clamp<long>(q, 0, 255));
  };
  if (binary) {
    std::vector<unsigned char> buf(img.pixel_count());
    for (std::size_t t = 0; t < buf.size(); ++t) buf[t] = quantize(img.v[t]);
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size()));
  } else {
    for (std::size_t i = 0; i < img.rows; ++i) {
      for (std::size_t j = 0; j < img.cols; ++j)
        out << static_cast<int>(quantize(img.at(i, j)))
            << (j + 1 == img.cols ? "" : " ");
      out << "\n";
    }
  }
}

// ---------------------------------------------------------------------------
// Mirror extension and quality metrics
// ---------------------------------------------------------------------------

// Reflection padding that excludes the boundary pixel: f[-1] = f[1],
// f[N] = f[N-2], applied on both axes.
inline ImageGrid mirror_extend(const ImageGrid& img, int pad_i, int pad_j) {
  if (pad_i < 0 || pad_j < 0 ||
      static_cast<std::size_t>(pad_i) >= img.rows ||
      static_cast<std::size_t>(pad_j) >= img.cols)
    throw std::invalid_argument("mirror_extend: pad must be in [0, dim)");
  auto reflect = [](long t, long n) {
    if (t < 0) return -t;
    if (t >= n) return 2 * n - 2 - t;
    return t;
  };
  ImageGrid out(img.rows + 2 * static_cast<std::size_t>(pad_i),
                img.cols + 2 * static_cast<std::size_t>(pad_j));
  for (std::size_t i = 0; i < out.rows; ++i) {
    const auto si = static_cast<std::size_t>(
        reflect(static_cast<long>(i) - pad_i, static_cast<long>(img.rows)));
    for (std::size_t j = 0; j < out.cols; ++j) {
      const auto sj = static_cast<std::size_t>(
          reflect(static_cast<long>(j) - pad_j, static_cast<long>(img.cols)));
      out.at(i, j) = img.at(si, sj);
    }
  }
  return out;
}

// 10*log10(1/MSE) with unit dynamic range; identical images give +inf
// (tables cap it at 99 dB).
inline double psnr(const ImageGrid& a, const ImageGrid& b) {
  if (a.rows != b.rows || a.cols != b.cols)
    throw std::invalid_argument("psnr: shape mismatch");
  double mse = 0.0;
  for (std::size_t t = 0; t < a.v.size(); ++t) {
    const double d = a.v[t] - b.v[t];
    mse += d * d;
  }
  mse /= static_cast<double>(a.v.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

// Mean structural similarity with the standard 11x11 Gaussian window
// (stdev 1.5), C1 = (0.01)^2, C2 = (0.03)^2, averaged over windows that fit
// entirely inside the image.
inline double ssim(const ImageGrid& a, const ImageGrid& b) {
  if (a.rows != b.rows || a.cols != b.cols)
    throw std::invalid_argument("ssim: shape mismatch");
  constexpr int W = 11;
  constexpr int H = W / 2;
  if (a.rows < W || a.cols < W)
    throw std::invalid_argument("ssim: image smaller than the 11x11 window");
  double kernel[W][W];
  double ksum = 0.0;
  for (int di = -H; di <= H; ++di)
    for (int dj = -H; dj <= H; ++dj) {
      const double g = std::exp(-(di * di + dj * dj) / (2.0 * 1.5 * 1.5));
      kernel[di + H][dj + H] = g;
      ksum += g;
    }
  for (auto& row : kernel)
    for (double& g : row) g /= ksum;

  constexpr double C1 = 0.01 * 0.01;
  constexpr double C2 = 0.03 * 0.03;
  double total = 0.0;
  std::size_t windows = 0;
  for (std::size_t ci = H; ci + H < a.rows; ++ci) {
    for (std::size_t cj = H; cj + H < a.cols; ++cj) {
      double ma = 0, mb = 0, saa = 0, sbb = 0, sab = 0;
      for (int di = -H; di <= H; ++di)
        for (int dj = -H; dj <= H; ++dj) {
          const double g = kernel[di + H][dj + H];
          const double xa = a.at(ci + di, cj + dj);
          const double xb = b.at(ci + di, cj + dj);
          ma += g * xa;
          mb += g * xb;
          saa += g * xa * xa;
          sbb += g * xb * xb;
          sab += g * xa * xb;
        }
      const double va = saa - ma * ma;
      const double vb = sbb - mb * mb;
      const double cov = sab - ma * mb;
      total += ((2 * ma * mb + C1) * (2 * cov + C2)) /
               ((ma * ma + mb * mb + C1) * (va + vb + C2));
      ++windows;
    }
  }
  return total / static_cast<double>(windows);
}

}  // namespace hpl
