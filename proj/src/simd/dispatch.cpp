#include <atomic>
#include <cstdlib>
#include <string_view>

#include "kernels_impl.hpp"

namespace pnpf::simd {
namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelTable* find(std::string_view name) {
  for (const KernelTable* t : available_kernels()) {
    if (name == t->name) return t;
  }
  return nullptr;
}

const KernelTable* initial_choice() {
  if (const char* forced = std::getenv("PNPF_SIMD")) {
    if (const KernelTable* t = find(forced)) return t;
  }
  return available_kernels().back();
}

std::atomic<const KernelTable*>& active() {
  static std::atomic<const KernelTable*> table{initial_choice()};
  return table;
}

}  // namespace

const KernelTable& scalar_kernels() { return detail::scalar_table(); }

std::vector<const KernelTable*> available_kernels() {
  std::vector<const KernelTable*> out{&detail::scalar_table()};
  if (const KernelTable* t = detail::avx2_table(); t && cpu_has_avx2()) {
    out.push_back(t);
  }
  if (const KernelTable* t = detail::neon_table()) out.push_back(t);
  return out;
}

const KernelTable& kernels() { return *active().load(std::memory_order_relaxed); }

bool select_kernels(std::string_view name) {
  const KernelTable* t = find(name);
  if (t == nullptr) return false;
  active().store(t, std::memory_order_relaxed);
  return true;
}

}  // namespace pnpf::simd
