#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace isr {

std::string base64_encode(std::span<const std::uint8_t> bytes);

/// Throws Error(Data) on characters outside the standard alphabet or bad padding.
std::vector<std::uint8_t> base64_decode(std::string_view text);

/// Little-endian IEEE-754 binary32 packing used by the plugin protocol.
std::string encode_float32_le(std::span<const float> values);
std::vector<float> decode_float32_le(std::string_view base64);

}  // namespace isr
