#include "tfblur/fft.h"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>
#include <vector>

namespace tfblur::fft {
namespace {

// FFTW planning is not thread safe, execution with fftw_execute_dft is.
// Plans live for the lifetime of the process.
class PlanCache {
 public:
  fftw_plan Get(std::size_t n, int sign) {
    std::lock_guard<std::mutex> lock(mu_);
    auto key = std::make_pair(n, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::vector<cplx> scratch(n);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mu_;
  std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

PlanCache& Cache() {
  static PlanCache cache;
  return cache;
}

void Execute(std::span<cplx> data, int sign) {
  if (data.size() <= 1) return;
  fftw_plan plan = Cache().Get(data.size(), sign);
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, buf, buf);
}

}  // namespace

void Forward(std::span<cplx> data) { Execute(data, FFTW_FORWARD); }
void Inverse(std::span<cplx> data) { Execute(data, FFTW_BACKWARD); }

void Forward2D(std::span<cplx> grid, std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) Forward(grid.subspan(r * cols, cols));
  std::vector<cplx> column(rows);
  for (std::size_t c = 0; c < cols; ++c) {
    for (std::size_t r = 0; r < rows; ++r) column[r] = grid[r * cols + c];
    Forward(column);
    for (std::size_t r = 0; r < rows; ++r) grid[r * cols + c] = column[r];
  }
}

}  // namespace tfblur::fft
