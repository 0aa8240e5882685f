#pragma once

#include <cstdint>
#include <string_view>

namespace isr {

/// Splittable seed derivation: every consumer of randomness takes a sub-seed
/// named by a tag and an index, so adding a consumer never shifts the others.
std::uint64_t derive_seed(std::uint64_t base, std::string_view tag, std::uint64_t index = 0);

}  // namespace isr
