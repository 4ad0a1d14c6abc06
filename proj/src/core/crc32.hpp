#pragma once

#include <cstddef>
#include <cstdint>

namespace vcnn {

// CRC-32 (IEEE 802.3 polynomial, reflected), the zlib convention.
uint32_t crc32(const void* data, size_t size, uint32_t seed = 0);

}  // namespace vcnn
