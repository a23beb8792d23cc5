#include <algorithm>
#include <cmath>
#include <random>

#include "autocrop/harness.hpp"

namespace autocrop {

namespace {

struct Rgb {
    double r, g, b;
};

ImageU8 render_base(std::size_t w, std::size_t h, const Rgb& top, const Rgb& bottom) {
    ImageU8 img;
    img.w = w;
    img.h = h;
    img.channels = 3;
    img.pixels.resize(w * h * 3);
    for (std::size_t y = 0; y < h; ++y) {
        const double t = static_cast<double>(y) / static_cast<double>(h - 1);
        const Rgb c{top.r + t * (bottom.r - top.r), top.g + t * (bottom.g - top.g),
                    top.b + t * (bottom.b - top.b)};
        for (std::size_t x = 0; x < w; ++x) {
            img.at(x, y, 0) = static_cast<std::uint8_t>(std::lround(c.r * 255));
            img.at(x, y, 1) = static_cast<std::uint8_t>(std::lround(c.g * 255));
            img.at(x, y, 2) = static_cast<std::uint8_t>(std::lround(c.b * 255));
        }
    }
    return img;
}

void blend_disc(ImageU8& img, double cx, double cy, double radius, const Rgb& color) {
    const int x0 = std::max(0, static_cast<int>(std::floor(cx - radius - 2)));
    const int x1 = std::min(static_cast<int>(img.w), static_cast<int>(std::ceil(cx + radius + 2)));
    const int y0 = std::max(0, static_cast<int>(std::floor(cy - radius - 2)));
    const int y1 = std::min(static_cast<int>(img.h), static_cast<int>(std::ceil(cy + radius + 2)));
    for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
            const double d = std::hypot(x + 0.5 - cx, y + 0.5 - cy);
            const double a = std::clamp(radius - d + 1.0, 0.0, 1.0);  // soft 1px edge
            if (a <= 0.0) continue;
            const double src[3] = {color.r, color.g, color.b};
            for (int c = 0; c < 3; ++c) {
                const double base = img.at(x, y, c) / 255.0;
                img.at(static_cast<std::size_t>(x), static_cast<std::size_t>(y),
                       static_cast<std::size_t>(c)) = static_cast<std::uint8_t>(
                    std::lround(std::clamp(base * (1 - a) + src[c] * a, 0.0, 1.0) * 255));
            }
        }
    }
}

}  // namespace

AttentionSample gen_synthetic_attention(const SyntheticSpec& spec, std::uint64_t seed) {
    if (spec.width < 8 || spec.height < 8 || spec.min_blobs < 1 ||
        spec.max_blobs < spec.min_blobs || !(spec.min_sigma > 0) ||
        spec.max_sigma < spec.min_sigma) {
        throw std::invalid_argument("gen_synthetic_attention: invalid spec");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto w = static_cast<double>(spec.width);
    const auto h = static_cast<double>(spec.height);

    AttentionSample sample;
    sample.image = render_base(spec.width, spec.height,
                               {0.10 + 0.15 * unit(rng), 0.10 + 0.15 * unit(rng),
                                0.10 + 0.15 * unit(rng)},
                               {0.10 + 0.15 * unit(rng), 0.10 + 0.15 * unit(rng),
                                0.10 + 0.15 * unit(rng)});
    sample.map = AttentionMap(spec.width, spec.height);

    std::uniform_int_distribution<int> blob_count(spec.min_blobs, spec.max_blobs);
    const int blobs = blob_count(rng);
    double first_cx = 0, first_cy = 0;
    for (int b = 0; b < blobs; ++b) {
        std::uniform_real_distribution<double> sigma_dist(spec.min_sigma, spec.max_sigma);
        const double sigma = sigma_dist(rng);
        // keep centers away from the border by one sigma so the bulk of the
        // mass stays inside the map; secondary blobs cluster around the first
        // so the attention region stays a single salient area
        std::uniform_real_distribution<double> cx_dist(sigma, w - sigma);
        std::uniform_real_distribution<double> cy_dist(sigma, h - sigma);
        double cx = cx_dist(rng), cy = cy_dist(rng);
        if (b == 0) {
            first_cx = cx;
            first_cy = cy;
        } else {
            std::uniform_real_distribution<double> offset(-1.2 * sigma, 1.2 * sigma);
            cx = std::clamp(first_cx + offset(rng), sigma, w - sigma);
            cy = std::clamp(first_cy + offset(rng), sigma, h - sigma);
        }
        for (std::size_t y = 0; y < spec.height; ++y) {
            for (std::size_t x = 0; x < spec.width; ++x) {
                const double dx = (x + 0.5 - cx) / sigma;
                const double dy = (y + 0.5 - cy) / sigma;
                const double v = std::exp(-0.5 * (dx * dx + dy * dy));
                sample.map.at(x, y) = std::min(1.0, sample.map.at(x, y) + v);
            }
        }
        const Rgb color{0.5 + 0.5 * unit(rng), 0.5 + 0.5 * unit(rng), 0.5 + 0.5 * unit(rng)};
        blend_disc(sample.image, cx, cy, 1.5 * sigma, color);
    }
    sample.gt_box = min_area_window_fast(sample.map, {spec.lambda});
    return sample;
}

AestheticsSample gen_synthetic_aesthetics(const SyntheticSpec& spec, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto w = static_cast<double>(spec.width);
    const auto h = static_cast<double>(spec.height);

    AestheticsSample sample;
    sample.label = unit(rng) < 0.5 ? 1 : 0;
    sample.image = render_base(spec.width, spec.height,
                               {0.2 + 0.3 * unit(rng), 0.2 + 0.3 * unit(rng),
                                0.2 + 0.3 * unit(rng)},
                               {0.2 + 0.3 * unit(rng), 0.2 + 0.3 * unit(rng),
                                0.2 + 0.3 * unit(rng)});
    const Rgb disc{0.6 + 0.4 * unit(rng), 0.6 + 0.4 * unit(rng), 0.6 + 0.4 * unit(rng)};
    std::uniform_real_distribution<double> radius_dist(0.08 * std::min(w, h),
                                                       0.16 * std::min(w, h));
    const double radius = radius_dist(rng);

    if (sample.label == 1) {
        // disc centered on one of the four rule-of-thirds intersections
        const double tx[2] = {w / 3.0, 2.0 * w / 3.0};
        const double ty[2] = {h / 3.0, 2.0 * h / 3.0};
        std::uniform_int_distribution<int> pick(0, 1);
        std::uniform_real_distribution<double> jitter(-4.0, 4.0);
        blend_disc(sample.image, tx[pick(rng)] + jitter(rng), ty[pick(rng)] + jitter(rng), radius,
                   disc);
    } else {
        // disc flush against a random border, plus clutter rectangles
        std::uniform_int_distribution<int> side_dist(0, 3);
        const int side = side_dist(rng);
        std::uniform_real_distribution<double> along_w(radius, w - radius);
        std::uniform_real_distribution<double> along_h(radius, h - radius);
        double cx = 0, cy = 0;
        switch (side) {
            case 0: cx = along_w(rng); cy = 0.3 * radius; break;
            case 1: cx = along_w(rng); cy = h - 0.3 * radius; break;
            case 2: cx = 0.3 * radius; cy = along_h(rng); break;
            default: cx = w - 0.3 * radius; cy = along_h(rng); break;
        }
        blend_disc(sample.image, cx, cy, radius, disc);
        std::uniform_int_distribution<int> clutter_count(4, 8);
        const int clutter = clutter_count(rng);
        for (int i = 0; i < clutter; ++i) {
            const int rw = 4 + static_cast<int>(unit(rng) * 0.08 * w);
            const int rh = 4 + static_cast<int>(unit(rng) * 0.08 * h);
            const int rx = static_cast<int>(unit(rng) * (w - rw));
            const int ry = static_cast<int>(unit(rng) * (h - rh));
            const Rgb cc{unit(rng), unit(rng), unit(rng)};
            for (int y = ry; y < ry + rh; ++y) {
                for (int x = rx; x < rx + rw; ++x) {
                    sample.image.at(x, y, 0) = static_cast<std::uint8_t>(std::lround(cc.r * 255));
                    sample.image.at(x, y, 1) = static_cast<std::uint8_t>(std::lround(cc.g * 255));
                    sample.image.at(x, y, 2) = static_cast<std::uint8_t>(std::lround(cc.b * 255));
                }
            }
        }
    }
    return sample;
}

}  // namespace autocrop
