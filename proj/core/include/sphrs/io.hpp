#pragma once

#include <filesystem>
#include <vector>

#include "sphrs/image.hpp"

namespace sphrs {

enum class ImageFileFormat : std::uint8_t { PNG, PGM };

/// Format implied by the file extension (.png, .pgm); throws FormatError otherwise.
ImageFileFormat format_for_path(const std::filesystem::path& path);

/// Decoded planes of an image file: one for grayscale, three for RGB. Alpha is
/// dropped and palettes are expanded. v_max is 2^depth - 1 (PNG) or the PGM maxval.
struct ImageChannels {
    std::vector<ImageBuffer> planes;
};

/// Reads PNG (1 to 16 bit) or binary PGM (P5). The container is detected from
/// the file signature. Throws IoError when the file cannot be read and
/// FormatError when it is malformed, truncated or unsupported.
ImageChannels load_channels(const std::filesystem::path& path);

/// Single-plane image; color input becomes BT.601 luma 0.299 R + 0.587 G + 0.114 B
/// (not rounded).
ImageBuffer load_image(const std::filesystem::path& path);

/// Writes one plane (gray) or three planes (RGB, PNG only) losslessly, the
/// container chosen by extension. Samples are rounded half away from zero.
/// PNG requires v_max 255 or 65535; PGM accepts any integral v_max up to 65535.
void save_channels(const ImageChannels& image, const std::filesystem::path& path);

void save_image(const ImageBuffer& img, const std::filesystem::path& path);

/// BT.601 luma of three equally sized planes.
ImageBuffer luma(const ImageChannels& image);

}  // namespace sphrs
