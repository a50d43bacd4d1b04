#include "image_io.hpp"

#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <vector>

#include <jpeglib.h>

#include "error.hpp"

namespace leafscope {

namespace {

struct FileHandle {
    FILE* f = nullptr;
    explicit FileHandle(const std::string& path, const char* mode) : f(std::fopen(path.c_str(), mode)) {}
    ~FileHandle() {
        if (f) std::fclose(f);
    }
    FileHandle(const FileHandle&) = delete;
    FileHandle& operator=(const FileHandle&) = delete;
};

struct JpegError {
    jpeg_error_mgr pub;
    std::jmp_buf jump;
    char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
    auto* err = reinterpret_cast<JpegError*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, err->message);
    std::longjmp(err->jump, 1);
}

// Plain-C body so no destructors sit between setjmp and a potential longjmp.
bool decode_jpeg(FILE* f, RasterImage* out, std::string* errmsg) {
    jpeg_decompress_struct cinfo;
    JpegError jerr;
    cinfo.err = jpeg_std_error(&jerr.pub);
    jerr.pub.error_exit = jpeg_error_exit;
    if (setjmp(jerr.jump)) {
        *errmsg = jerr.message;
        jpeg_destroy_decompress(&cinfo);
        return false;
    }
    jpeg_create_decompress(&cinfo);
    jpeg_stdio_src(&cinfo, f);
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);
    *out = RasterImage(static_cast<int>(cinfo.output_width), static_cast<int>(cinfo.output_height));
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = out->at(0, static_cast<int>(cinfo.output_scanline));
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return true;
}

bool encode_mask_png(FILE* f, png_bytep* rows, int width, int height, std::string* errmsg) {
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) {
        *errmsg = "png_create_write_struct failed";
        return false;
    }
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        *errmsg = "png_create_info_struct failed";
        return false;
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        *errmsg = "png write error";
        return false;
    }
    png_init_io(png, f);
    png_set_IHDR(png, info, width, height, 1, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_set_packing(png);  // rows arrive one pixel per byte
    png_write_image(png, rows);
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return true;
}

void atomic_rename(const std::string& tmp, const std::string& path) {
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        raise(ErrorCode::Io, "cannot write " + path + ": " + ec.message());
    }
}

}  // namespace

RasterImage load_image(const std::string& path) {
    if (!std::filesystem::exists(path)) raise(ErrorCode::Io, "file not found: " + path);

    unsigned char magic[3] = {0, 0, 0};
    {
        FileHandle fh(path, "rb");
        if (!fh.f) raise(ErrorCode::Io, "cannot open: " + path);
        if (std::fread(magic, 1, 3, fh.f) != 3)
            raise(ErrorCode::Format, "cannot decode (file too short): " + path);
    }

    if (magic[0] == 0x89 && magic[1] == 'P' && magic[2] == 'N') {
        png_image image;
        std::memset(&image, 0, sizeof(image));
        image.version = PNG_IMAGE_VERSION;
        if (!png_image_begin_read_from_file(&image, path.c_str()))
            raise(ErrorCode::Format, "cannot decode PNG " + path + ": " + image.message);
        image.format = PNG_FORMAT_RGB;
        RasterImage out(static_cast<int>(image.width), static_cast<int>(image.height));
        if (!png_image_finish_read(&image, nullptr, out.pixels.data(), 0, nullptr)) {
            std::string msg = image.message;
            png_image_free(&image);
            raise(ErrorCode::Format, "cannot decode PNG " + path + ": " + msg);
        }
        return out;
    }
    if (magic[0] == 0xFF && magic[1] == 0xD8) {
        FileHandle fh(path, "rb");
        if (!fh.f) raise(ErrorCode::Io, "cannot open: " + path);
        RasterImage out;
        std::string errmsg;
        if (!decode_jpeg(fh.f, &out, &errmsg))
            raise(ErrorCode::Format, "cannot decode JPEG " + path + ": " + errmsg);
        return out;
    }
    raise(ErrorCode::Format, "cannot decode (not PNG or JPEG): " + path);
}

void save_png(const RasterImage& img, const std::string& path) {
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(img.width);
    image.height = static_cast<png_uint_32>(img.height);
    image.format = PNG_FORMAT_RGB;
    std::string tmp = path + ".tmp";
    if (!png_image_write_to_file(&image, tmp.c_str(), 0, img.pixels.data(), 0, nullptr))
        raise(ErrorCode::Io, "cannot write PNG " + path + ": " + image.message);
    atomic_rename(tmp, path);
}

void save_mask_png(const BinaryMask& mask, const std::string& path) {
    std::vector<uint8_t> buf(static_cast<size_t>(mask.width) * mask.height);
    std::vector<png_bytep> rows(mask.height);
    for (int y = 0; y < mask.height; ++y) {
        rows[y] = buf.data() + static_cast<size_t>(y) * mask.width;
        for (int x = 0; x < mask.width; ++x) rows[y][x] = mask.at(x, y) ? 1 : 0;
    }
    std::string tmp = path + ".tmp";
    std::string errmsg;
    bool ok;
    {
        FileHandle fh(tmp, "wb");
        if (!fh.f) raise(ErrorCode::Io, "cannot open for write: " + path);
        ok = encode_mask_png(fh.f, rows.data(), mask.width, mask.height, &errmsg);
    }
    if (!ok) {
        std::filesystem::remove(tmp);
        raise(ErrorCode::Io, "cannot write mask PNG " + path + ": " + errmsg);
    }
    atomic_rename(tmp, path);
}

BinaryMask load_mask_png(const std::string& path) {
    if (!std::filesystem::exists(path)) raise(ErrorCode::Io, "file not found: " + path);
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.c_str()))
        raise(ErrorCode::Format, "cannot decode PNG " + path + ": " + image.message);
    if (image.format & PNG_FORMAT_FLAG_COLOR) {
        png_image_free(&image);
        raise(ErrorCode::Format, "not a mask (color image): " + path);
    }
    image.format = PNG_FORMAT_GRAY;
    std::vector<uint8_t> buf(static_cast<size_t>(image.width) * image.height);
    if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr)) {
        std::string msg = image.message;
        png_image_free(&image);
        raise(ErrorCode::Format, "cannot decode PNG " + path + ": " + msg);
    }
    BinaryMask mask(static_cast<int>(image.width), static_cast<int>(image.height));
    for (size_t i = 0; i < buf.size(); ++i) {
        if (buf[i] != 0 && buf[i] != 255)
            raise(ErrorCode::Format, "not a mask (gray value " + std::to_string(buf[i]) + "): " + path);
        mask.bits[i] = buf[i] ? 1 : 0;
    }
    return mask;
}

}  // namespace leafscope
