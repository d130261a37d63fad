#pragma once

#include <cstddef>
#include <functional>

namespace pixshuf::parallel {

// Worker cap for all parallel loops. 0 = hardware concurrency.
void set_max_threads(int n);
int max_threads();

// Splits [0, total) into fixed-size chunks and runs fn(chunk_index, begin, end)
// over them. Chunk boundaries depend only on `total` and `chunk_size`, never on
// the thread count, so per-chunk results can be merged in chunk order to give
// thread-count-independent (bitwise) results.
void for_chunks(std::size_t total, std::size_t chunk_size,
                const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

std::size_t chunk_count(std::size_t total, std::size_t chunk_size);

} // namespace pixshuf::parallel
