#pragma once

#include <cstdint>

namespace zofd::instrumentation {

// Scalar multiplication counters in the direction generators. They only
// count when the library is compiled with ZOFD_INSTRUMENTED; otherwise
// multiplications() always returns 0.

bool enabled() noexcept;
std::uint64_t multiplications() noexcept;
void reset() noexcept;

}  // namespace zofd::instrumentation
