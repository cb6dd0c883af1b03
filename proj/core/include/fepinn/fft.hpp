#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace fepinn {

/// Unnormalized discrete Fourier transforms on split real/imaginary arrays.
///
/// Convention: sign = -1 is the forward analysis transform
///   X[k] = sum_j x[j] e^{-2 pi i jk/N},
/// sign = +1 the unnormalized synthesis direction. The inverse transform is
/// the +1 direction scaled by 1/N. Power-of-two lengths take an iterative
/// radix-2 path; other lengths fall back to a dense O(n^2) evaluation with a
/// precomputed twiddle table (desk-scale grids keep that affordable).
void dft_inplace(std::span<double> re, std::span<double> im, int sign);

void dft_forward_raw(std::span<const double> x, std::span<double> re, std::span<double> im);

/// In-place inverse with the 1/N factor applied.
void idft_inplace(std::span<double> re, std::span<double> im);

/// Row-wise transforms on a (rows x n) field, each row independent.
void dft_rows(std::span<double> re, std::span<double> im, std::size_t rows, std::size_t n,
              int sign);

/// 2-D transform on an (ny x nx) field (rows then columns).
void dft_2d(std::span<double> re, std::span<double> im, std::size_t ny, std::size_t nx,
            int sign);

bool is_power_of_two(std::size_t n);

/// Signed mode index for position k in a length-n DFT (standard ordering:
/// 0, 1, ..., then negatives; for even n the Nyquist bin maps to -n/2).
long long signed_mode(std::size_t k, std::size_t n);

}  // namespace fepinn
