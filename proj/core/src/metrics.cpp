#include "sphrs/metrics.hpp"

#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <tuple>

#include "sphrs/errors.hpp"

namespace sphrs {

namespace {

constexpr int kWindow = 11;
constexpr int kRadius = kWindow / 2;
constexpr double kSigma = 1.5;

void check_pair(const ImageBuffer& a, const ImageBuffer& b) {
    if (a.width() != b.width() || a.height() != b.height()) {
        throw ConfigError("images differ in size: " + std::to_string(a.width()) + "x" + std::to_string(a.height()) +
                          " vs " + std::to_string(b.width()) + "x" + std::to_string(b.height()));
    }
    if (a.v_max() != b.v_max()) throw ConfigError("images differ in bit depth");
    if (a.empty()) throw ConfigError("empty image");
}

double to_db(double v_max, double mse) {
    if (mse == 0.0) return kIdenticalPsnr;
    return 10.0 * std::log10(v_max * v_max / mse);
}

std::array<double, kWindow> gaussian_taps() {
    std::array<double, kWindow> w{};
    double sum = 0.0;
    for (int i = 0; i < kWindow; ++i) {
        const double x = i - kRadius;
        w[static_cast<std::size_t>(i)] = std::exp(-x * x / (2.0 * kSigma * kSigma));
        sum += w[static_cast<std::size_t>(i)];
    }
    for (double& v : w) v /= sum;
    return w;
}

// Separable Gaussian filter evaluated only where the window fits.
std::vector<double> filter_valid(const std::vector<double>& img, int w, int h) {
    static const auto taps = gaussian_taps();
    const int vw = w - 2 * kRadius;
    const int vh = h - 2 * kRadius;
    std::vector<double> rows(static_cast<std::size_t>(vw) * static_cast<std::size_t>(h));
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < vw; ++x) {
            double acc = 0.0;
            for (int k = 0; k < kWindow; ++k) {
                acc += taps[static_cast<std::size_t>(k)] * img[static_cast<std::size_t>(y) * w + x + k];
            }
            rows[static_cast<std::size_t>(y) * vw + x] = acc;
        }
    }
    std::vector<double> out(static_cast<std::size_t>(vw) * static_cast<std::size_t>(vh));
    for (int y = 0; y < vh; ++y) {
        for (int x = 0; x < vw; ++x) {
            double acc = 0.0;
            for (int k = 0; k < kWindow; ++k) {
                acc += taps[static_cast<std::size_t>(k)] * rows[static_cast<std::size_t>(y + k) * vw + x];
            }
            out[static_cast<std::size_t>(y) * vw + x] = acc;
        }
    }
    return out;
}

std::shared_ptr<const WeightMap> build_weights(const ProjectionFormat& fmt) {
    auto map = std::make_shared<WeightMap>();
    map->kind = fmt.kind();
    map->width = fmt.width();
    map->height = fmt.height();
    map->weights.resize(fmt.pixel_count());
    const int w = fmt.width();
    const int h = fmt.height();
    if (fmt.kind() == ProjectionKind::ERP) {
        for (int y = 0; y < h; ++y) {
            const double wy = std::cos((y + 0.5 - 0.5 * h) * std::numbers::pi / h);
            for (int x = 0; x < w; ++x) map->weights[static_cast<std::size_t>(y) * w + x] = wy;
        }
    } else {
        const int f = fmt.face_size();
        for (int y = 0; y < h; ++y) {
            const double b = 2.0 * ((y % f) + 0.5) / f - 1.0;
            for (int x = 0; x < w; ++x) {
                const double a = 2.0 * ((x % f) + 0.5) / f - 1.0;
                map->weights[static_cast<std::size_t>(y) * w + x] = std::pow(1.0 + a * a + b * b, -1.5);
            }
        }
    }
    return map;
}

}  // namespace

std::shared_ptr<const WeightMap> weight_map(const ProjectionFormat& fmt) {
    static std::mutex mutex;
    static std::map<std::tuple<int, int, int>, std::shared_ptr<const WeightMap>> cache;
    const auto key = std::make_tuple(static_cast<int>(fmt.kind()), fmt.width(), fmt.height());
    const std::lock_guard lock(mutex);
    auto& slot = cache[key];
    if (!slot) slot = build_weights(fmt);
    return slot;
}

double psnr(const ImageBuffer& a, const ImageBuffer& b) {
    check_pair(a, b);
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double e = a.data()[i] - b.data()[i];
        sum += e * e;
    }
    return to_db(a.v_max(), sum / static_cast<double>(a.size()));
}

double weighted_psnr(const ImageBuffer& a, const ImageBuffer& b, const std::vector<double>& weights) {
    check_pair(a, b);
    if (weights.size() != a.size()) throw ConfigError("weight map does not match the image size");
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double e = a.data()[i] - b.data()[i];
        num += weights[i] * e * e;
        den += weights[i];
    }
    if (!(den > 0.0)) throw ConfigError("weight map has no positive weight");
    return to_db(a.v_max(), num / den);
}

double ws_psnr(const ImageBuffer& a, const ImageBuffer& b, const ProjectionFormat& fmt) {
    if (a.width() != fmt.width() || a.height() != fmt.height()) {
        throw ConfigError("image size does not match the projection format");
    }
    return weighted_psnr(a, b, weight_map(fmt)->weights);
}

double ssim(const ImageBuffer& a, const ImageBuffer& b) {
    check_pair(a, b);
    const int w = a.width();
    const int h = a.height();
    if (w < kWindow || h < kWindow) throw ConfigError("SSIM needs images of at least 11x11 pixels");
    const std::vector<double> va(a.data().begin(), a.data().end());
    const std::vector<double> vb(b.data().begin(), b.data().end());
    std::vector<double> aa(va.size());
    std::vector<double> bb(va.size());
    std::vector<double> ab(va.size());
    for (std::size_t i = 0; i < va.size(); ++i) {
        aa[i] = va[i] * va[i];
        bb[i] = vb[i] * vb[i];
        ab[i] = va[i] * vb[i];
    }
    const auto mu_a = filter_valid(va, w, h);
    const auto mu_b = filter_valid(vb, w, h);
    const auto e_aa = filter_valid(aa, w, h);
    const auto e_bb = filter_valid(bb, w, h);
    const auto e_ab = filter_valid(ab, w, h);
    const double c1 = (0.01 * a.v_max()) * (0.01 * a.v_max());
    const double c2 = (0.03 * a.v_max()) * (0.03 * a.v_max());
    double sum = 0.0;
    for (std::size_t i = 0; i < mu_a.size(); ++i) {
        const double ma = mu_a[i];
        const double mb = mu_b[i];
        const double saa = e_aa[i] - ma * ma;
        const double sbb = e_bb[i] - mb * mb;
        const double sab = e_ab[i] - ma * mb;
        sum += ((2.0 * ma * mb + c1) * (2.0 * sab + c2)) / ((ma * ma + mb * mb + c1) * (saa + sbb + c2));
    }
    return sum / static_cast<double>(mu_a.size());
}

}  // namespace sphrs
