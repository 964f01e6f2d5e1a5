#pragma once

#include <complex>
#include <cstddef>
#include <cstdlib>
#include <new>
#include <utility>
#include <vector>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

namespace pnpf {

/// Cache-line aligned allocator. Every real and spectral buffer in the
/// library uses it so FFT plans and SIMD kernels can assume 64-byte alignment.
template <class T, std::size_t Alignment = 64>
struct AlignedAllocator {
  using value_type = T;

  template <class U>
  struct rebind {
    using other = AlignedAllocator<U, Alignment>;
  };

  AlignedAllocator() noexcept = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U, Alignment>&) noexcept {}

  T* allocate(std::size_t n) {
    if (n == 0) return nullptr;
    std::size_t bytes = n * sizeof(T);
    bytes = (bytes + Alignment - 1) / Alignment * Alignment;
    void* p = std::aligned_alloc(Alignment, bytes);
    if (p == nullptr) throw std::bad_alloc();
    return static_cast<T*>(p);
  }

  void deallocate(T* p, std::size_t) noexcept { std::free(p); }

  // Default-initialize instead of value-initialize: buffers are overwritten
  // by transforms and kernels, so zero-filling them first is wasted work.
  template <class U>
  void construct(U* p) noexcept(noexcept(::new(static_cast<void*>(p)) U)) {
    ::new (static_cast<void*>(p)) U;
  }
  template <class U, class... Args>
  void construct(U* p, Args&&... args) {
    ::new (static_cast<void*>(p)) U(std::forward<Args>(args)...);
  }

  template <class U>
  bool operator==(const AlignedAllocator<U, Alignment>&) const noexcept {
    return true;
  }
};

using Complex = std::complex<double>;
using RealVector = std::vector<double, AlignedAllocator<double>>;
using ComplexVector = std::vector<Complex, AlignedAllocator<Complex>>;

/// Keeps freed field buffers in the heap instead of returning them to the
/// kernel. Field temporaries on 32^3 grids sit above glibc's mmap threshold,
/// and the resulting page-fault churn roughly doubles the cost of a step.
/// Process-wide, so only executables call it.
inline void retain_freed_buffers() noexcept {
#if defined(__GLIBC__)
  mallopt(M_MMAP_THRESHOLD, 64 << 20);
  mallopt(M_TRIM_THRESHOLD, 256 << 20);
#endif
}

}  // namespace pnpf
