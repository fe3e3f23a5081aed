#include "fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <memory>

namespace cpcl::detail {

namespace {

struct FftwFree {
    void operator()(fftw_complex* p) const { fftw_free(p); }
};
struct PlanDestroy {
    void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};

}  // namespace

void unitary_dft(Matrix<std::complex<double>>& data, FftAxis axis, FftDirection direction) {
    if (data.empty()) return;
    const int rows = static_cast<int>(data.rows());
    const int cols = static_cast<int>(data.cols());
    const int n = axis == FftAxis::Cols ? rows : cols;
    const int howmany = axis == FftAxis::Cols ? cols : rows;
    const int stride = axis == FftAxis::Cols ? cols : 1;
    const int dist = axis == FftAxis::Cols ? 1 : cols;

    // Plans are built against an fftw_malloc'd buffer every call so the chosen
    // codelets (and hence the rounding) never depend on the caller's alignment.
    std::unique_ptr<fftw_complex, FftwFree> buf(
        static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * data.size())));
    const int sign = direction == FftDirection::Forward ? FFTW_FORWARD : FFTW_BACKWARD;
    std::unique_ptr<fftw_plan_s, PlanDestroy> plan(fftw_plan_many_dft(
        1, &n, howmany, buf.get(), nullptr, stride, dist, buf.get(), nullptr, stride, dist, sign,
        FFTW_ESTIMATE));

    auto* raw = reinterpret_cast<std::complex<double>*>(buf.get());
    std::copy(data.values().begin(), data.values().end(), raw);
    fftw_execute(plan.get());
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t i = 0; i < data.size(); ++i) data.values()[i] = raw[i] * scale;
}

}  // namespace cpcl::detail
