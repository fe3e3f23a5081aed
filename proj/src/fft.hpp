#pragma once

#include <complex>
#include <cstddef>

#include "cpcl/matrix.hpp"

namespace cpcl::detail {

enum class FftAxis { Rows, Cols };
enum class FftDirection { Forward, Inverse };

/// Unitary (1/sqrt(N)) DFT of every line of `data` along `axis`, in place.
/// Axis::Cols transforms each column (length rows()), Axis::Rows each row.
/// Forward uses exp(-j2pi nk/N), Inverse exp(+j2pi nk/N).
void unitary_dft(Matrix<std::complex<double>>& data, FftAxis axis, FftDirection direction);

}  // namespace cpcl::detail
