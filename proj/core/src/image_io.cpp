#include "midas/image_io.hpp"

#include "midas/errors.hpp"

#include <png.h>

#include <cstring>

namespace midas {

ImageBuffer read_png(const std::string& path) {
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.c_str())) {
        throw IoError("cannot read PNG '" + path + "': " + image.message);
    }
    image.format = PNG_FORMAT_RGB;
    ImageBuffer out(image.width, image.height);
    if (!png_image_finish_read(&image, nullptr, out.data.data(), 0, nullptr)) {
        std::string msg = image.message;
        png_image_free(&image);
        throw IoError("cannot decode PNG '" + path + "': " + msg);
    }
    return out;
}

void write_png(const std::string& path, const ImageBuffer& img) {
    if (img.data.size() != img.width * img.height * 3) throw DimensionError("image buffer size mismatch");
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(img.width);
    image.height = static_cast<png_uint_32>(img.height);
    image.format = PNG_FORMAT_RGB;
    if (!png_image_write_to_file(&image, path.c_str(), 0, img.data.data(), 0, nullptr)) {
        throw IoError("cannot write PNG '" + path + "': " + image.message);
    }
}

} // namespace midas
