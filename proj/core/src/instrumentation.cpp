#include "zofd/instrumentation.hpp"

#include "op_count.hpp"

namespace zofd {

#ifdef ZOFD_INSTRUMENTED
namespace detail {
thread_local std::uint64_t multiplication_counter = 0;
}

namespace instrumentation {
bool enabled() noexcept { return true; }
std::uint64_t multiplications() noexcept { return detail::multiplication_counter; }
void reset() noexcept { detail::multiplication_counter = 0; }
}  // namespace instrumentation
#else
namespace instrumentation {
bool enabled() noexcept { return false; }
std::uint64_t multiplications() noexcept { return 0; }
void reset() noexcept {}
}  // namespace instrumentation
#endif

}  // namespace zofd
