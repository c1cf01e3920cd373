#include "nlh/image_io.hpp"

#include <png.h>

#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <vector>

namespace nlh {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw std::runtime_error(path + ": " + what);
}

bool ends_with(const std::string& s, const char* suf) {
    const size_t n = std::strlen(suf);
    return s.size() >= n && s.compare(s.size() - n, n, suf) == 0;
}

// ---- PNM (PGM P5 / PPM P6) ----

int pnm_token(std::istream& in) {
    // skips whitespace and '#' comments, returns the next integer
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            c = in.get();
        } else {
            break;
        }
    }
    if (c == EOF || !std::isdigit(c)) return -1;
    int v = 0;
    while (c != EOF && std::isdigit(c)) {
        v = v * 10 + (c - '0');
        c = in.get();
    }
    return v;
}

LoadedImage load_pnm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "cannot open");
    char m0 = static_cast<char>(in.get());
    char m1 = static_cast<char>(in.get());
    if (m0 != 'P' || (m1 != '5' && m1 != '6')) fail(path, "not a binary PGM/PPM");
    const bool color = (m1 == '6');
    const int w = pnm_token(in);
    const int h = pnm_token(in);
    const int maxval = pnm_token(in);
    if (w <= 0 || h <= 0) fail(path, "bad dimensions");
    if (maxval != 255) fail(path, "only maxval 255 is supported");
    // header ends with exactly one whitespace byte (already consumed by tokenizer)

    const size_t n = static_cast<size_t>(w) * h * (color ? 3 : 1);
    std::vector<unsigned char> raw(n);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(n));
    if (static_cast<size_t>(in.gcount()) != n) fail(path, "truncated pixel data");

    LoadedImage out;
    out.is_color = color;
    if (color) {
        out.color.space = ColorSpace::RGB;
        for (auto& p : out.color.planes) p = Plane(h, w);
        for (size_t i = 0; i < static_cast<size_t>(w) * h; ++i)
            for (int c = 0; c < 3; ++c) out.color.planes[c].data[i] = raw[3 * i + c] / 255.0;
    } else {
        out.gray = Plane(h, w);
        for (size_t i = 0; i < out.gray.size(); ++i) out.gray.data[i] = raw[i] / 255.0;
    }
    return out;
}

void save_pnm(const std::string& path, const Plane* gray, const ColorImage* rgb) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(path, "cannot open for writing");
    const int h = gray ? gray->height : rgb->height();
    const int w = gray ? gray->width : rgb->width();
    out << (gray ? "P5\n" : "P6\n") << w << " " << h << "\n255\n";
    std::vector<unsigned char> raw(static_cast<size_t>(w) * h * (gray ? 1 : 3));
    if (gray) {
        for (size_t i = 0; i < gray->size(); ++i)
            raw[i] = static_cast<unsigned char>(quantize8(gray->data[i]));
    } else {
        for (size_t i = 0; i < static_cast<size_t>(w) * h; ++i)
            for (int c = 0; c < 3; ++c)
                raw[3 * i + c] = static_cast<unsigned char>(quantize8(rgb->planes[c].data[i]));
    }
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out) fail(path, "write failed");
}

// ---- PNG via libpng ----

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};

LoadedImage load_png(const std::string& path) {
    std::unique_ptr<std::FILE, FileCloser> fp(std::fopen(path.c_str(), "rb"));
    if (!fp) fail(path, "cannot open");

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) fail(path, "libpng init failed");
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "PNG decode error");
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);

    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    const int depth = png_get_bit_depth(png, info);
    const int type = png_get_color_type(png, info);
    if (depth == 16) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "16-bit PNG is not supported");
    }
    if (type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (type == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    png_set_strip_alpha(png);
    png_read_update_info(png, info);

    const int channels = png_get_channels(png, info);
    const bool color = (channels == 3);
    if (channels != 1 && channels != 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "unsupported PNG channel layout");
    }

    std::vector<unsigned char> raw(static_cast<size_t>(w) * h * channels);
    std::vector<png_bytep> rows(h);
    for (png_uint_32 r = 0; r < h; ++r) rows[r] = raw.data() + static_cast<size_t>(r) * w * channels;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    LoadedImage out;
    out.is_color = color;
    if (color) {
        out.color.space = ColorSpace::RGB;
        for (auto& p : out.color.planes) p = Plane(static_cast<int>(h), static_cast<int>(w));
        for (size_t i = 0; i < static_cast<size_t>(w) * h; ++i)
            for (int c = 0; c < 3; ++c) out.color.planes[c].data[i] = raw[3 * i + c] / 255.0;
    } else {
        out.gray = Plane(static_cast<int>(h), static_cast<int>(w));
        for (size_t i = 0; i < out.gray.size(); ++i) out.gray.data[i] = raw[i] / 255.0;
    }
    return out;
}

void save_png(const std::string& path, const Plane* gray, const ColorImage* rgb) {
    std::unique_ptr<std::FILE, FileCloser> fp(std::fopen(path.c_str(), "wb"));
    if (!fp) fail(path, "cannot open for writing");

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) fail(path, "libpng init failed");
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        fail(path, "PNG encode error");
    }
    png_init_io(png, fp.get());

    const int h = gray ? gray->height : rgb->height();
    const int w = gray ? gray->width : rgb->width();
    const int channels = gray ? 1 : 3;
    png_set_IHDR(png, info, w, h, 8, gray ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    std::vector<unsigned char> row(static_cast<size_t>(w) * channels);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (gray) {
                row[c] = static_cast<unsigned char>(quantize8(gray->at(r, c)));
            } else {
                for (int k = 0; k < 3; ++k)
                    row[3 * c + k] = static_cast<unsigned char>(quantize8(rgb->planes[k].at(r, c)));
            }
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

bool sniff_png(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    unsigned char sig[4] = {0, 0, 0, 0};
    in.read(reinterpret_cast<char*>(sig), 4);
    return in && sig[0] == 0x89 && sig[1] == 'P' && sig[2] == 'N' && sig[3] == 'G';
}

}  // namespace

LoadedImage load_image(const std::string& path) {
    if (ends_with(path, ".png") || sniff_png(path)) return load_png(path);
    return load_pnm(path);
}

void save_gray(const std::string& path, const Plane& img) {
    if (ends_with(path, ".png"))
        save_png(path, &img, nullptr);
    else if (ends_with(path, ".pgm"))
        save_pnm(path, &img, nullptr);
    else if (ends_with(path, ".ppm")) {
        ColorImage c;
        c.space = ColorSpace::RGB;
        c.planes = {img, img, img};
        save_pnm(path, nullptr, &c);
    } else
        fail(path, "unsupported output extension (use .pgm/.ppm/.png)");
}

void save_color(const std::string& path, const ColorImage& img) {
    if (img.space != ColorSpace::RGB)
        throw std::invalid_argument("save_color: image must be RGB");
    if (ends_with(path, ".png"))
        save_png(path, nullptr, &img);
    else if (ends_with(path, ".ppm"))
        save_pnm(path, nullptr, &img);
    else
        fail(path, "unsupported output extension for color (use .ppm/.png)");
}

}  // namespace nlh
