#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace g2forge {

// Number of worker threads: hardware concurrency, capped by G2FORGE_THREADS.
std::size_t worker_count();

// Runs body(i) for i in [0, n), split into contiguous chunks across workers.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

// Pairwise-tree summation; the order depends only on the length.
double pairwise_sum(std::span<const double> v);

}  // namespace g2forge
