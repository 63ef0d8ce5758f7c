#include "dpfbmc/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

namespace dpfbmc {
namespace {

// fftw_plan creation is not thread-safe; execution with the new-array
// interface is. ESTIMATE keeps the chosen algorithm (and thus the rounding)
// identical between runs.
class PlanCache {
  public:
    ~PlanCache() {
        for (auto& [key, plan] : plans_)
            fftw_destroy_plan(plan);
    }

    fftw_plan get(std::size_t n, int sign) {
        std::lock_guard lock(mutex_);
        auto key = std::make_pair(n, sign);
        if (auto it = plans_.find(key); it != plans_.end())
            return it->second;
        auto* buf = fftw_alloc_complex(n);
        fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, sign,
                                          FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(buf);
        plans_.emplace(key, plan);
        return plan;
    }

  private:
    std::mutex mutex_;
    std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

PlanCache& cache() {
    static PlanCache instance;
    return instance;
}

void run(std::span<Complex> data, int sign) {
    if (data.empty())
        return;
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(cache().get(data.size(), sign), p, p);
}

} // namespace

void fft_forward(std::span<Complex> data) { run(data, FFTW_FORWARD); }
void fft_inverse(std::span<Complex> data) { run(data, FFTW_BACKWARD); }

} // namespace dpfbmc
