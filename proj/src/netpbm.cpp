#include "autocrop/netpbm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace autocrop {

namespace {

int next_token(std::istream& is) {
    // skips whitespace and '#' comments, returns the next integer
    while (true) {
        int c = is.peek();
        if (c == '#') {
            std::string line;
            std::getline(is, line);
        } else if (std::isspace(c)) {
            is.get();
        } else {
            break;
        }
    }
    int v;
    if (!(is >> v)) throw std::runtime_error("netpbm: malformed header");
    return v;
}

ImageU8 read_pnm(const std::string& path, const char* magic, std::size_t channels) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("netpbm: cannot open '" + path + "'");
    char m[2];
    is.read(m, 2);
    if (!is || m[0] != magic[0] || m[1] != magic[1]) {
        throw std::runtime_error("netpbm: '" + path + "' is not a " + magic + " file");
    }
    ImageU8 img;
    img.w = static_cast<std::size_t>(next_token(is));
    img.h = static_cast<std::size_t>(next_token(is));
    const int maxval = next_token(is);
    if (img.w == 0 || img.h == 0 || maxval <= 0 || maxval > 255) {
        throw std::runtime_error("netpbm: unsupported header in '" + path + "'");
    }
    is.get();  // single whitespace after maxval
    img.channels = channels;
    img.pixels.resize(img.w * img.h * channels);
    is.read(reinterpret_cast<char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
    if (!is) throw std::runtime_error("netpbm: truncated pixel data in '" + path + "'");
    if (maxval != 255) {
        for (auto& p : img.pixels) {
            p = static_cast<std::uint8_t>(std::lround(p * 255.0 / maxval));
        }
    }
    return img;
}

void write_pnm(const std::string& path, const ImageU8& img, const char* magic,
               std::size_t channels) {
    if (img.channels != channels || img.pixels.size() != img.w * img.h * channels) {
        throw std::invalid_argument("netpbm: inconsistent image for " + std::string(magic));
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("netpbm: cannot open '" + path + "' for writing");
    os << magic << "\n" << img.w << " " << img.h << "\n255\n";
    os.write(reinterpret_cast<const char*>(img.pixels.data()),
             static_cast<std::streamsize>(img.pixels.size()));
    if (!os) throw std::runtime_error("netpbm: write failed for '" + path + "'");
}

}  // namespace

ImageU8 read_ppm(const std::string& path) { return read_pnm(path, "P6", 3); }
void write_ppm(const std::string& path, const ImageU8& img) { write_pnm(path, img, "P6", 3); }
ImageU8 read_pgm(const std::string& path) { return read_pnm(path, "P5", 1); }
void write_pgm(const std::string& path, const ImageU8& img) { write_pnm(path, img, "P5", 1); }

Tensor to_tensor(const ImageU8& img) {
    if (img.channels != 3) throw std::invalid_argument("to_tensor: expected 3-channel image");
    Tensor t({3, img.h, img.w});
    for (std::size_t c = 0; c < 3; ++c) {
        for (std::size_t y = 0; y < img.h; ++y) {
            for (std::size_t x = 0; x < img.w; ++x) {
                t[(c * img.h + y) * img.w + x] = img.at(x, y, c) / 255.0;
            }
        }
    }
    return t;
}

ImageU8 from_tensor(const Tensor& t) {
    if (t.rank() != 3 || t.extent(0) != 3) {
        throw std::invalid_argument("from_tensor: expected [3,H,W], got " + t.shape_str());
    }
    ImageU8 img;
    img.channels = 3;
    img.h = t.extent(1);
    img.w = t.extent(2);
    img.pixels.resize(img.w * img.h * 3);
    for (std::size_t c = 0; c < 3; ++c) {
        for (std::size_t y = 0; y < img.h; ++y) {
            for (std::size_t x = 0; x < img.w; ++x) {
                const double v = std::clamp(t[(c * img.h + y) * img.w + x], 0.0, 1.0);
                img.at(x, y, c) = static_cast<std::uint8_t>(std::lround(v * 255.0));
            }
        }
    }
    return img;
}

AttentionMap read_attention_map(const std::string& path) {
    const ImageU8 img = read_pgm(path);
    AttentionMap map(img.w, img.h);
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
        map.values[i] = img.pixels[i] / 255.0;
    }
    return map;
}

void write_attention_map(const std::string& path, const AttentionMap& map) {
    ImageU8 img;
    img.w = map.w;
    img.h = map.h;
    img.channels = 1;
    img.pixels.resize(map.values.size());
    for (std::size_t i = 0; i < map.values.size(); ++i) {
        img.pixels[i] =
            static_cast<std::uint8_t>(std::lround(std::clamp(map.values[i], 0.0, 1.0) * 255.0));
    }
    write_pgm(path, img);
}

}  // namespace autocrop
