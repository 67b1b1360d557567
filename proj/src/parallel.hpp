#pragma once

#include <cstddef>
#include <exception>

namespace ncclab::detail {

/// OpenMP loop over [0, n) that carries the first exception out of the
/// parallel region. fn(i) must only write state owned by index i.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  std::exception_ptr error;
  const auto count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(ncclab_parallel_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace ncclab::detail
