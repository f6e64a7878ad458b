#pragma once

#include "midas/tensor.hpp"

#include <string>

namespace midas {

/// Reads any PNG libpng understands and converts it to 8-bit RGB.
ImageBuffer read_png(const std::string& path);
void write_png(const std::string& path, const ImageBuffer& img);

} // namespace midas
