#include "fepinn/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace fepinn {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void radix2(double* re, double* im, std::size_t n, int sign) {
  // bit reversal
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) {
      std::swap(re[i], re[j]);
      std::swap(im[i], im[j]);
    }
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = sign * kTwoPi / static_cast<double>(len);
    const double wr = std::cos(ang), wi = std::sin(ang);
    for (std::size_t i = 0; i < n; i += len) {
      double cr = 1.0, ci = 0.0;
      for (std::size_t j = 0; j < len / 2; ++j) {
        const std::size_t a = i + j, b = i + j + len / 2;
        const double tr = re[b] * cr - im[b] * ci;
        const double ti = re[b] * ci + im[b] * cr;
        re[b] = re[a] - tr;
        im[b] = im[a] - ti;
        re[a] += tr;
        im[a] += ti;
        const double ncr = cr * wr - ci * wi;
        ci = cr * wi + ci * wr;
        cr = ncr;
      }
    }
  }
}

void dense_dft(double* re, double* im, std::size_t n, int sign) {
  // twiddle table over jk mod n
  std::vector<double> tr(n), ti(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double ang = sign * kTwoPi * static_cast<double>(k) / static_cast<double>(n);
    tr[k] = std::cos(ang);
    ti[k] = std::sin(ang);
  }
  std::vector<double> or_(n), oi(n);
  for (std::size_t k = 0; k < n; ++k) {
    double sr = 0.0, si = 0.0;
    std::size_t idx = 0;
    for (std::size_t j = 0; j < n; ++j) {
      sr += re[j] * tr[idx] - im[j] * ti[idx];
      si += re[j] * ti[idx] + im[j] * tr[idx];
      idx += k;
      if (idx >= n) idx -= n;
    }
    or_[k] = sr;
    oi[k] = si;
  }
  for (std::size_t k = 0; k < n; ++k) {
    re[k] = or_[k];
    im[k] = oi[k];
  }
}

}  // namespace

bool is_power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

long long signed_mode(std::size_t k, std::size_t n) {
  const long long kk = static_cast<long long>(k);
  const long long nn = static_cast<long long>(n);
  return 2 * kk < nn ? kk : kk - nn;
}

void dft_inplace(std::span<double> re, std::span<double> im, int sign) {
  const std::size_t n = re.size();
  if (n != im.size()) throw std::invalid_argument("dft_inplace: re/im length mismatch");
  if (n == 0) throw std::invalid_argument("dft_inplace: empty input");
  if (n == 1) return;
  if (is_power_of_two(n))
    radix2(re.data(), im.data(), n, sign);
  else
    dense_dft(re.data(), im.data(), n, sign);
}

void dft_forward_raw(std::span<const double> x, std::span<double> re, std::span<double> im) {
  const std::size_t n = x.size();
  if (re.size() != n || im.size() != n)
    throw std::invalid_argument("dft_forward_raw: output length mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    re[i] = x[i];
    im[i] = 0.0;
  }
  dft_inplace(re, im, -1);
}

void idft_inplace(std::span<double> re, std::span<double> im) {
  dft_inplace(re, im, +1);
  const double inv = 1.0 / static_cast<double>(re.size());
  for (std::size_t i = 0; i < re.size(); ++i) {
    re[i] *= inv;
    im[i] *= inv;
  }
}

void dft_rows(std::span<double> re, std::span<double> im, std::size_t rows, std::size_t n,
              int sign) {
  if (re.size() != rows * n || im.size() != rows * n)
    throw std::invalid_argument("dft_rows: field size mismatch");
  for (std::size_t r = 0; r < rows; ++r)
    dft_inplace(re.subspan(r * n, n), im.subspan(r * n, n), sign);
}

void dft_2d(std::span<double> re, std::span<double> im, std::size_t ny, std::size_t nx,
            int sign) {
  dft_rows(re, im, ny, nx, sign);
  std::vector<double> cr(ny), ci(ny);
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t y = 0; y < ny; ++y) {
      cr[y] = re[y * nx + x];
      ci[y] = im[y * nx + x];
    }
    dft_inplace(cr, ci, sign);
    for (std::size_t y = 0; y < ny; ++y) {
      re[y * nx + x] = cr[y];
      im[y * nx + x] = ci[y];
    }
  }
}

}  // namespace fepinn
