#include "mkdv/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace mkdv {
namespace fft {

namespace {

struct PlanPair {
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;
};

std::mutex g_plan_mutex;

// Plans are created once per size with FFTW_UNALIGNED so they can execute on
// arbitrary caller buffers via the new-array interface.
const PlanPair& plans_for(int n) {
    static std::map<int, PlanPair> cache;
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    std::vector<double> re(n);
    std::vector<std::complex<double>> cx(n / 2 + 1);
    PlanPair p;
    p.r2c = fftw_plan_dft_r2c_1d(n, re.data(), reinterpret_cast<fftw_complex*>(cx.data()),
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
    p.c2r = fftw_plan_dft_c2r_1d(n, reinterpret_cast<fftw_complex*>(cx.data()), re.data(),
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!p.r2c || !p.c2r) throw std::runtime_error("fftw plan creation failed");
    return cache.emplace(n, p).first->second;
}

}  // namespace

void forward(int n, const double* in, std::complex<double>* out) {
    const PlanPair& p = plans_for(n);
    fftw_execute_dft_r2c(p.r2c, const_cast<double*>(in), reinterpret_cast<fftw_complex*>(out));
}

void inverse(int n, const std::complex<double>* in, double* out) {
    const PlanPair& p = plans_for(n);
    // 1d c2r overwrites its input, so run on a scratch copy.
    std::vector<std::complex<double>> scratch(in, in + n / 2 + 1);
    fftw_execute_dft_c2r(p.c2r, reinterpret_cast<fftw_complex*>(scratch.data()), out);
}

}  // namespace fft
}  // namespace mkdv
