#include <cstdlib>
#include <cstring>

#include "aigc/kernels.hpp"

namespace aigc::kernels {

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "unknown";
}

bool isa_available(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(AIGC_HAVE_AVX2_KERNEL)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() noexcept {
  static const Isa chosen = [] {
    const char* forced = std::getenv("AIGC_KERNEL");
    if (forced != nullptr && std::strcmp(forced, "scalar") == 0) return Isa::Scalar;
    return isa_available(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar;
  }();
  return chosen;
}

void chosen_cells(Isa isa, const HmacMidstates& key, std::uint64_t gamma,
                  std::uint64_t first, std::span<std::uint8_t> out) noexcept {
#if defined(AIGC_HAVE_AVX2_KERNEL)
  if (isa == Isa::Avx2 && isa_available(Isa::Avx2)) {
    chosen_cells_avx2(key, gamma, first, out);
    return;
  }
#else
  (void)isa;
#endif
  chosen_cells_scalar(key, gamma, first, out);
}

#if !defined(AIGC_HAVE_AVX2_KERNEL)
void chosen_cells_avx2(const HmacMidstates& key, std::uint64_t gamma,
                       std::uint64_t first, std::span<std::uint8_t> out) noexcept {
  chosen_cells_scalar(key, gamma, first, out);
}
#endif

}  // namespace aigc::kernels
