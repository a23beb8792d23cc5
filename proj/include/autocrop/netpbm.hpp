#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "autocrop/tensor.hpp"
#include "autocrop/window_search.hpp"

namespace autocrop {

// 8-bit interleaved image (channels = 1 for PGM, 3 for PPM).
struct ImageU8 {
    std::size_t w = 0, h = 0, channels = 0;
    std::vector<std::uint8_t> pixels;  // row-major, interleaved

    std::uint8_t& at(std::size_t x, std::size_t y, std::size_t c) {
        return pixels[(y * w + x) * channels + c];
    }
    std::uint8_t at(std::size_t x, std::size_t y, std::size_t c) const {
        return pixels[(y * w + x) * channels + c];
    }
};

ImageU8 read_ppm(const std::string& path);   // binary P6, maxval <= 255
void write_ppm(const std::string& path, const ImageU8& img);
ImageU8 read_pgm(const std::string& path);   // binary P5, maxval <= 255
void write_pgm(const std::string& path, const ImageU8& img);

// [3,H,W] tensor with values in [0,1].
Tensor to_tensor(const ImageU8& img);
ImageU8 from_tensor(const Tensor& t);

// PGM grey levels divided by maxval.
AttentionMap read_attention_map(const std::string& path);
void write_attention_map(const std::string& path, const AttentionMap& map);

}  // namespace autocrop
