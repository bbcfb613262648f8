#include "fft_backend.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <vector>

namespace qmnls::detail {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

class PlanCache {
public:
  ~PlanCache() {
    std::lock_guard lock(planner_mutex());
    for (auto& [n, p] : plans_) {
      fftw_destroy_plan(p.forward);
      fftw_destroy_plan(p.backward);
    }
  }

  const PlanPair& get(std::size_t n) {
    auto it = plans_.find(n);
    if (it != plans_.end()) return it->second;
    std::vector<fftw_complex> scratch(n);
    const int len = static_cast<int>(n);
    PlanPair p;
    {
      // FFTW_ESTIMATE keeps plan selection (and hence results) reproducible.
      std::lock_guard lock(planner_mutex());
      const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
      p.forward = fftw_plan_dft_1d(len, scratch.data(), scratch.data(), FFTW_FORWARD, flags);
      p.backward = fftw_plan_dft_1d(len, scratch.data(), scratch.data(), FFTW_BACKWARD, flags);
    }
    return plans_.emplace(n, p).first->second;
  }

private:
  std::map<std::size_t, PlanPair> plans_;
};

PlanCache& cache() {
  thread_local PlanCache c;
  return c;
}

fftw_complex* as_fftw(std::span<std::complex<double>> data) {
  return reinterpret_cast<fftw_complex*>(data.data());
}

}  // namespace

void dft_forward(std::span<std::complex<double>> data) {
  fftw_execute_dft(cache().get(data.size()).forward, as_fftw(data), as_fftw(data));
}

void dft_backward(std::span<std::complex<double>> data) {
  fftw_execute_dft(cache().get(data.size()).backward, as_fftw(data), as_fftw(data));
}

}  // namespace qmnls::detail
