#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "moon/raster.hpp"

namespace moon {

enum class ImageFormat { PpmP6, Png };

/// PPM P6 is byte-exact: "P6\n<w> <h>\n255\n" then raw RGB rows.
/// PNG carries no golden guarantee.
std::vector<std::uint8_t> encode_image(const RasterImage& img,
                                       ImageFormat format);

ImageFormat parse_image_format(std::string_view name);

void write_file(const std::filesystem::path& path,
                const std::vector<std::uint8_t>& bytes);

}  // namespace moon
