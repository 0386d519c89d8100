#pragma once

#include <cstddef>
#include <functional>

namespace wcm {

/// Number of worker threads used by data-parallel loops (default: hardware concurrency).
void set_thread_count(unsigned n) noexcept;
unsigned thread_count() noexcept;

/// Fixed chunk length for deterministic reductions. Results are reduced per chunk and
/// then combined in chunk order, so they do not depend on the thread count.
inline constexpr std::size_t kReductionChunk = 4096;

/// Calls body(chunk_index, begin, end) for [0, n) split into chunks of `chunk` items,
/// distributing chunks over the worker threads. Chunk boundaries depend only on n and chunk.
void parallel_chunks(std::size_t n, std::size_t chunk,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& body);

inline std::size_t chunk_count(std::size_t n, std::size_t chunk) noexcept {
  return (n + chunk - 1) / chunk;
}

}  // namespace wcm
