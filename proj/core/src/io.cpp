#include "sphrs/io.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "sphrs/errors.hpp"

namespace sphrs {

namespace {

constexpr std::array<unsigned char, 8> kPngSignature{0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};

std::vector<unsigned char> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("error reading '" + path.string() + "'");
    return bytes;
}

void write_file(const std::filesystem::path& path, const std::vector<unsigned char>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw IoError("error writing '" + path.string() + "'");
}

unsigned quantize(double v) { return static_cast<unsigned>(std::round(v)); }

// ---------------------------------------------------------------------------
// PGM

struct PgmCursor {
    const std::vector<unsigned char>& bytes;
    std::size_t pos{0};

    void skip_space_and_comments() {
        while (pos < bytes.size()) {
            if (bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            } else if (std::isspace(bytes[pos]) != 0) {
                ++pos;
            } else {
                break;
            }
        }
    }

    long number() {
        skip_space_and_comments();
        long v = 0;
        std::size_t digits = 0;
        while (pos < bytes.size() && std::isdigit(bytes[pos]) != 0 && digits < 9) {
            v = v * 10 + (bytes[pos] - '0');
            ++pos;
            ++digits;
        }
        if (digits == 0) throw FormatError("PGM: malformed header");
        return v;
    }
};

ImageChannels decode_pgm(const std::vector<unsigned char>& bytes) {
    PgmCursor c{bytes, 2};
    const long w = c.number();
    const long h = c.number();
    const long maxval = c.number();
    if (w <= 0 || h <= 0 || w > 1'000'000 || h > 1'000'000) throw FormatError("PGM: invalid dimensions");
    if (maxval < 1 || maxval > 65535) throw FormatError("PGM: maxval must be in [1, 65535]");
    if (c.pos >= bytes.size() || std::isspace(bytes[c.pos]) == 0) throw FormatError("PGM: malformed header");
    ++c.pos;
    const std::size_t sample_bytes = maxval < 256 ? 1 : 2;
    const std::size_t count = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
    if (bytes.size() - c.pos < count * sample_bytes) throw FormatError("PGM: truncated pixel data");
    std::vector<double> data(count);
    const unsigned char* p = bytes.data() + c.pos;
    for (std::size_t i = 0; i < count; ++i) {
        const unsigned v = sample_bytes == 1 ? p[i] : (static_cast<unsigned>(p[2 * i]) << 8) | p[2 * i + 1];
        if (v > static_cast<unsigned>(maxval)) throw FormatError("PGM: sample exceeds maxval");
        data[i] = v;
    }
    ImageChannels out;
    out.planes.emplace_back(static_cast<int>(w), static_cast<int>(h), static_cast<double>(maxval), std::move(data));
    return out;
}

std::vector<unsigned char> encode_pgm(const ImageBuffer& img) {
    const double v_max = img.v_max();
    if (v_max != std::floor(v_max) || v_max > 65535.0) throw FormatError("PGM: v_max must be an integer <= 65535");
    const std::string header =
        "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n" +
        std::to_string(static_cast<unsigned>(v_max)) + "\n";
    std::vector<unsigned char> bytes(header.begin(), header.end());
    const bool wide = v_max > 255.0;
    bytes.reserve(bytes.size() + img.size() * (wide ? 2 : 1));
    for (double v : img.data()) {
        const unsigned q = quantize(v);
        if (wide) bytes.push_back(static_cast<unsigned char>(q >> 8));
        bytes.push_back(static_cast<unsigned char>(q & 0xFF));
    }
    return bytes;
}

// ---------------------------------------------------------------------------
// PNG

struct PngState {
    const std::vector<unsigned char>* input{nullptr};
    std::size_t pos{0};
    std::vector<unsigned char>* output{nullptr};
    char message[256]{};
};

void png_fail(png_structp png, png_const_charp msg) {
    auto* st = static_cast<PngState*>(png_get_error_ptr(png));
    std::snprintf(st->message, sizeof st->message, "%s", msg);
    png_longjmp(png, 1);
}

void png_warn(png_structp, png_const_charp) {}

void png_read_bytes(png_structp png, png_bytep dst, png_size_t n) {
    auto* st = static_cast<PngState*>(png_get_io_ptr(png));
    if (st->input->size() - st->pos < n) png_error(png, "truncated file");
    std::memcpy(dst, st->input->data() + st->pos, n);
    st->pos += n;
}

void png_write_bytes(png_structp png, png_bytep src, png_size_t n) {
    auto* st = static_cast<PngState*>(png_get_io_ptr(png));
    st->output->insert(st->output->end(), src, src + n);
}

void png_flush_noop(png_structp) {}

ImageChannels decode_png(const std::vector<unsigned char>& bytes) {
    PngState st;
    st.input = &bytes;
    std::vector<unsigned char> pixels;
    std::vector<png_bytep> rows;
    png_uint_32 width = 0;
    png_uint_32 height = 0;
    int depth = 0;
    int channels = 0;

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &st, png_fail, png_warn);
    if (png == nullptr) throw FormatError("PNG: cannot initialize decoder");
    png_infop info = png_create_info_struct(png);
    if (info == nullptr || setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError(std::string("PNG: ") + (st.message[0] != '\0' ? st.message : "decoding failed"));
    }
    png_set_read_fn(png, &st, png_read_bytes);
    png_read_info(png, info);
    const int color = png_get_color_type(png, info);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8) png_set_expand_gray_1_2_4_to_8(png);
    if ((color & PNG_COLOR_MASK_ALPHA) != 0) png_set_strip_alpha(png);
    png_read_update_info(png, info);
    width = png_get_image_width(png, info);
    height = png_get_image_height(png, info);
    depth = png_get_bit_depth(png, info);
    channels = png_get_channels(png, info);
    pixels.resize(png_get_rowbytes(png, info) * height);
    rows.resize(height);
    for (png_uint_32 y = 0; y < height; ++y) rows[y] = pixels.data() + y * png_get_rowbytes(png, info);
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    if (channels != 1 && channels != 3) throw FormatError("PNG: unsupported channel layout");
    const double v_max = depth == 16 ? 65535.0 : 255.0;
    const std::size_t count = static_cast<std::size_t>(width) * height;
    std::vector<std::vector<double>> planes(static_cast<std::size_t>(channels), std::vector<double>(count));
    for (std::size_t i = 0; i < count; ++i) {
        for (int c = 0; c < channels; ++c) {
            const std::size_t k = i * static_cast<std::size_t>(channels) + static_cast<std::size_t>(c);
            planes[static_cast<std::size_t>(c)][i] =
                depth == 16 ? (static_cast<unsigned>(pixels[2 * k]) << 8) | pixels[2 * k + 1] : pixels[k];
        }
    }
    ImageChannels out;
    for (auto& p : planes) out.planes.emplace_back(static_cast<int>(width), static_cast<int>(height), v_max, std::move(p));
    return out;
}

std::vector<unsigned char> encode_png(const ImageChannels& image) {
    const ImageBuffer& first = image.planes.front();
    const double v_max = first.v_max();
    if (v_max != 255.0 && v_max != 65535.0) throw FormatError("PNG: v_max must be 255 or 65535");
    const int depth = v_max == 255.0 ? 8 : 16;
    const int channels = static_cast<int>(image.planes.size());
    const auto width = static_cast<std::size_t>(first.width());
    const auto height = static_cast<std::size_t>(first.height());
    const std::size_t row_bytes = width * static_cast<std::size_t>(channels) * (depth / 8);

    std::vector<unsigned char> pixels(row_bytes * height);
    for (std::size_t i = 0; i < width * height; ++i) {
        for (int c = 0; c < channels; ++c) {
            const unsigned q = quantize(image.planes[static_cast<std::size_t>(c)].data()[i]);
            const std::size_t k = i * static_cast<std::size_t>(channels) + static_cast<std::size_t>(c);
            if (depth == 16) {
                pixels[2 * k] = static_cast<unsigned char>(q >> 8);
                pixels[2 * k + 1] = static_cast<unsigned char>(q & 0xFF);
            } else {
                pixels[k] = static_cast<unsigned char>(q);
            }
        }
    }
    std::vector<png_bytep> rows(height);
    for (std::size_t y = 0; y < height; ++y) rows[y] = pixels.data() + y * row_bytes;

    std::vector<unsigned char> bytes;
    PngState st;
    st.output = &bytes;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &st, png_fail, png_warn);
    if (png == nullptr) throw FormatError("PNG: cannot initialize encoder");
    png_infop info = png_create_info_struct(png);
    if (info == nullptr || setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw FormatError(std::string("PNG: ") + (st.message[0] != '\0' ? st.message : "encoding failed"));
    }
    png_set_write_fn(png, &st, png_write_bytes, png_flush_noop);
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), depth,
                 channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return bytes;
}

}  // namespace

ImageFileFormat format_for_path(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (ext == ".png") return ImageFileFormat::PNG;
    if (ext == ".pgm") return ImageFileFormat::PGM;
    throw FormatError("unsupported image extension '" + ext + "' (expected .png or .pgm)");
}

ImageChannels load_channels(const std::filesystem::path& path) {
    const std::vector<unsigned char> bytes = read_file(path);
    if (bytes.size() >= kPngSignature.size() && std::equal(kPngSignature.begin(), kPngSignature.end(), bytes.begin())) {
        return decode_png(bytes);
    }
    if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5') return decode_pgm(bytes);
    throw FormatError("'" + path.string() + "' is neither PNG nor binary PGM");
}

ImageBuffer luma(const ImageChannels& image) {
    if (image.planes.size() == 1) return image.planes.front();
    if (image.planes.size() != 3) throw ConfigError("luma needs one or three planes");
    const auto& r = image.planes[0];
    const auto& g = image.planes[1];
    const auto& b = image.planes[2];
    std::vector<double> y(r.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        y[i] = clamp_sample(0.299 * r.data()[i] + 0.587 * g.data()[i] + 0.114 * b.data()[i], r.v_max());
    }
    return {r.width(), r.height(), r.v_max(), std::move(y)};
}

ImageBuffer load_image(const std::filesystem::path& path) { return luma(load_channels(path)); }

void save_channels(const ImageChannels& image, const std::filesystem::path& path) {
    const ImageFileFormat fmt = format_for_path(path);
    if (image.planes.size() != 1 && image.planes.size() != 3) throw ConfigError("images have one or three planes");
    for (const auto& p : image.planes) {
        if (p.width() != image.planes.front().width() || p.height() != image.planes.front().height() ||
            p.v_max() != image.planes.front().v_max()) {
            throw ConfigError("image planes differ in size or range");
        }
    }
    if (fmt == ImageFileFormat::PGM) {
        if (image.planes.size() != 1) throw FormatError("PGM holds a single gray plane");
        write_file(path, encode_pgm(image.planes.front()));
    } else {
        write_file(path, encode_png(image));
    }
}

void save_image(const ImageBuffer& img, const std::filesystem::path& path) {
    ImageChannels c;
    c.planes.push_back(img);
    save_channels(c, path);
}

}  // namespace sphrs
