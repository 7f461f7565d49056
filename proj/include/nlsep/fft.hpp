#ifndef NLSEP_FFT_HPP
#define NLSEP_FFT_HPP

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <span>

namespace nlsep {

// Thin RAII wrapper over a pair of in-place FFTW plans of one length.
// Plan creation and destruction go through a process-wide mutex because the
// FFTW planner is not reentrant; fftw_execute_dft on caller-owned arrays is.
class FftPlan {
 public:
  static std::shared_ptr<const FftPlan> ForSize(std::size_t n) {
    std::lock_guard<std::mutex> lock(PlannerMutex());
    auto& cache = Cache();
    auto it = cache.find(n);
    if (it != cache.end()) {
      if (auto existing = it->second.lock()) return existing;
    }
    std::shared_ptr<const FftPlan> plan(new FftPlan(n));
    cache[n] = plan;
    return plan;
  }

  ~FftPlan() {
    std::lock_guard<std::mutex> lock(PlannerMutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }

  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  std::size_t size() const { return n_; }

  /// data[q] <- sum_p data[p] exp(-2 pi i p q / n), in place.
  void Forward(std::span<std::complex<double>> data) const {
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(forward_, p, p);
  }

  /// data[q] <- sum_p data[p] exp(+2 pi i p q / n), in place.
  void Backward(std::span<std::complex<double>> data) const {
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(backward_, p, p);
  }

 private:
  explicit FftPlan(std::size_t n) : n_(n) {
    // Caller holds the planner mutex.
    auto* buf = fftw_alloc_complex(n);
    const int len = static_cast<int>(n);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    forward_ = fftw_plan_dft_1d(len, buf, buf, FFTW_FORWARD, flags);
    backward_ = fftw_plan_dft_1d(len, buf, buf, FFTW_BACKWARD, flags);
    fftw_free(buf);
  }

  static std::mutex& PlannerMutex() {
    static std::mutex m;
    return m;
  }

  static std::map<std::size_t, std::weak_ptr<const FftPlan>>& Cache() {
    static std::map<std::size_t, std::weak_ptr<const FftPlan>> cache;
    return cache;
  }

  std::size_t n_;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

}  // namespace nlsep

#endif  // NLSEP_FFT_HPP
