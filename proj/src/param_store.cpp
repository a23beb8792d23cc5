#include "autocrop/param_store.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

namespace autocrop {

namespace {

void write_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    if (!is) throw std::runtime_error("ParamStore: truncated file");
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void write_f32(std::ostream& os, float f) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    write_u32(os, bits);
}

float read_f32(std::istream& is) {
    std::uint32_t bits = read_u32(is);
    float f;
    std::memcpy(&f, &bits, 4);
    return f;
}

}  // namespace

void ParamStore::snap_to_float32() {
    for (auto& [name, t] : entries_) {
        for (double& v : t.values()) v = static_cast<double>(static_cast<float>(v));
    }
}

void ParamStore::save(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("ParamStore: cannot open '" + path + "' for writing");
    os.write(kMagic, 8);
    for (const auto& [name, t] : entries_) {
        write_u32(os, static_cast<std::uint32_t>(name.size()));
        os.write(name.data(), static_cast<std::streamsize>(name.size()));
        write_u32(os, static_cast<std::uint32_t>(t.rank()));
        for (std::size_t e : t.shape()) write_u32(os, static_cast<std::uint32_t>(e));
        for (double v : t.values()) write_f32(os, static_cast<float>(v));
    }
    if (!os) throw std::runtime_error("ParamStore: write failed for '" + path + "'");
}

ParamStore ParamStore::load(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("ParamStore: cannot open '" + path + "'");
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kMagic, 8) != 0) {
        throw std::runtime_error("ParamStore: '" + path + "' is not a weight file (bad magic)");
    }
    ParamStore store;
    while (true) {
        is.peek();
        if (is.eof()) break;
        const std::uint32_t name_len = read_u32(is);
        std::string name(name_len, '\0');
        is.read(name.data(), name_len);
        const std::uint32_t rank = read_u32(is);
        std::vector<std::size_t> shape(rank);
        std::size_t numel = 1;
        for (std::uint32_t i = 0; i < rank; ++i) {
            shape[i] = read_u32(is);
            numel *= shape[i];
        }
        std::vector<double> data(numel);
        for (std::size_t i = 0; i < numel; ++i) data[i] = static_cast<double>(read_f32(is));
        if (!is) throw std::runtime_error("ParamStore: truncated entry '" + name + "'");
        store.insert(name, Tensor(std::move(shape), std::move(data)));
    }
    return store;
}

}  // namespace autocrop
