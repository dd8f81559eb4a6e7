#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace coordterm {

// mt19937_64 plus modulo indexing instead of std::uniform_int_distribution /
// std::shuffle, whose outputs are implementation-defined; artifact files must
// be reproducible byte for byte from the seed alone.

inline std::size_t pick_index(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(rng() % n);
}

template <typename T>
void seeded_shuffle(std::vector<T>& items, std::mt19937_64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = pick_index(rng, i);
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace coordterm
