#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>
#include <vector>

namespace afdm::fft {
namespace {

// Plans are created once per (size, direction) under a lock; fftw_execute_dft
// on an existing plan is thread safe.
std::mutex plan_mutex;
std::map<std::pair<int, int>, fftw_plan>& plans() {
  static std::map<std::pair<int, int>, fftw_plan> p;
  return p;
}

fftw_plan get_plan(int n, int sign) {
  std::lock_guard<std::mutex> lock(plan_mutex);
  auto key = std::make_pair(n, sign);
  auto it = plans().find(key);
  if (it != plans().end()) return it->second;
  fftw_complex* a = fftw_alloc_complex(n);
  fftw_complex* b = fftw_alloc_complex(n);
  fftw_plan p = fftw_plan_dft_1d(n, a, b, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(a);
  fftw_free(b);
  plans()[key] = p;
  return p;
}

void run(const cd* in, cd* out, int n, int sign) {
  fftw_plan p = get_plan(n, sign);
  if (in == out) {
    std::vector<cd> tmp(in, in + n);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(tmp.data()),
                     reinterpret_cast<fftw_complex*>(out));
    return;
  }
  // FFTW never writes to the input of an out-of-place complex DFT.
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(const_cast<cd*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

}  // namespace

void forward(const cd* in, cd* out, int n) { run(in, out, n, FFTW_FORWARD); }
void backward(const cd* in, cd* out, int n) { run(in, out, n, FFTW_BACKWARD); }

}  // namespace afdm::fft
