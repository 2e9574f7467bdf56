#pragma once

#include <cstdint>

#ifdef ZOFD_INSTRUMENTED
namespace zofd::detail {
extern thread_local std::uint64_t multiplication_counter;
}
#define ZOFD_COUNT_MULS(n) (::zofd::detail::multiplication_counter += static_cast<std::uint64_t>(n))
#else
#define ZOFD_COUNT_MULS(n) ((void)0)
#endif
