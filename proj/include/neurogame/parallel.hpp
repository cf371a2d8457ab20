#pragma once

#include <cstddef>
#include <functional>

namespace neurogame {

// Name of the environment variable that overrides the automatic thread hint.
inline constexpr const char* kThreadsEnvVar = "NEUROGAME_THREADS";

// hint > 0 is used as-is; hint <= 0 means auto: NEUROGAME_THREADS if set,
// otherwise std::thread::hardware_concurrency().
int resolve_thread_count(int hint);

// Runs body(i) for i in [0, count) over `threads` workers using contiguous
// static blocks. Each index must write only its own outputs, which makes the
// result independent of the thread count. The exception thrown for the lowest
// failing index is rethrown.
void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace neurogame
