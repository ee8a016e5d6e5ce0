#pragma once

#include <cstdint>
#include <span>
#include <string_view>

namespace synimp::lexicon {

// Bundled English word list in three frequency strata. Content is part of the
// versioned behavior of the mock generator and the builtin fill-mask provider.
std::span<const std::string_view> high();
std::span<const std::string_view> mid();
std::span<const std::string_view> low();

// Stratified pick: 60% high, 30% mid, 10% low, selected by the bits of `key`.
std::string_view pick(std::uint64_t key);

}  // namespace synimp::lexicon
