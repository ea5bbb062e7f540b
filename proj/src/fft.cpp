#include "nsda/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <memory>
#include <mutex>
#include <unordered_map>

#include "nsda/errors.hpp"

namespace nsda::fft {
namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class Plan {
 public:
  explicit Plan(int n) : n_(n), size_(static_cast<std::size_t>(n) * n) {
    in_ = fftw_alloc_complex(size_);
    out_ = fftw_alloc_complex(size_);
    std::lock_guard lock(planner_mutex());
    fwd_ = fftw_plan_dft_2d(n, n, in_, out_, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_2d(n, n, in_, out_, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  ~Plan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(in_);
    fftw_free(out_);
  }

  std::span<cplx> input() { return {reinterpret_cast<cplx*>(in_), size_}; }
  std::span<const cplx> output() const { return {reinterpret_cast<const cplx*>(out_), size_}; }
  void run_forward() { fftw_execute(fwd_); }
  void run_backward() { fftw_execute(bwd_); }

 private:
  int n_;
  std::size_t size_;
  fftw_complex* in_ = nullptr;
  fftw_complex* out_ = nullptr;
  fftw_plan fwd_ = nullptr;
  fftw_plan bwd_ = nullptr;
};

Plan& plan_for(int n) {
  thread_local std::unordered_map<int, std::unique_ptr<Plan>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<Plan>(n);
  return *slot;
}

void check_sizes(const Grid& grid, std::size_t in, std::size_t out) {
  if (in != grid.size() || out != grid.size()) {
    throw ConfigError("transform buffer does not match grid size");
  }
}

}  // namespace

void forward(const Grid& grid, std::span<const cplx> in, std::span<cplx> out) {
  check_sizes(grid, in.size(), out.size());
  Plan& plan = plan_for(grid.n());
  std::copy(in.begin(), in.end(), plan.input().begin());
  plan.run_forward();
  const double scale = 1.0 / static_cast<double>(grid.size());
  auto res = plan.output();
  for (std::size_t i = 0; i < res.size(); ++i) out[i] = res[i] * scale;
}

void backward(const Grid& grid, std::span<const cplx> in, std::span<cplx> out) {
  check_sizes(grid, in.size(), out.size());
  Plan& plan = plan_for(grid.n());
  std::copy(in.begin(), in.end(), plan.input().begin());
  plan.run_backward();
  auto res = plan.output();
  std::copy(res.begin(), res.end(), out.begin());
}

void forward_real(const Grid& grid, std::span<const double> in, std::span<cplx> out) {
  check_sizes(grid, in.size(), out.size());
  Plan& plan = plan_for(grid.n());
  auto buf = plan.input();
  for (std::size_t i = 0; i < in.size(); ++i) buf[i] = cplx(in[i], 0.0);
  plan.run_forward();
  const double scale = 1.0 / static_cast<double>(grid.size());
  auto res = plan.output();
  for (std::size_t i = 0; i < res.size(); ++i) out[i] = res[i] * scale;
}

}  // namespace nsda::fft
