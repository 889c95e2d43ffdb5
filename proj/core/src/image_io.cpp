#include "splatcolor/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include <json.hpp>

#include "splatcolor/errors.hpp"

namespace splatcolor {

namespace {

cv::Mat read_unchanged(const std::string& path) {
    cv::Mat m = cv::imread(path, cv::IMREAD_UNCHANGED | cv::IMREAD_ANYDEPTH);
    if (m.empty()) throw DataError("cannot read image: " + path);
    return m;
}

double scale_for_depth_of(const cv::Mat& m, const std::string& path) {
    switch (m.depth()) {
        case CV_8U: return 1.0 / 255.0;
        case CV_16U: return 1.0 / 65535.0;
        default: throw DataError("unsupported bit depth (want 8 or 16): " + path);
    }
}

uint16_t quant(double v, int maxval) {
    const double c = std::clamp(v, 0.0, 1.0);
    return static_cast<uint16_t>(std::lround(c * maxval));
}

void write_png(const cv::Mat& m, const std::string& path) {
    if (!cv::imwrite(path, m)) throw DataError("cannot write image: " + path);
}

}  // namespace

ImageRGB load_image(const std::string& path) {
    cv::Mat m = read_unchanged(path);
    const double s = scale_for_depth_of(m, path);
    ImageRGB img(m.cols, m.rows);
    const int ch = m.channels();
    if (ch != 1 && ch != 3 && ch != 4)
        throw DataError("unsupported channel count in " + path);
    for (int y = 0; y < m.rows; ++y) {
        for (int x = 0; x < m.cols; ++x) {
            double r, g, b;
            if (ch == 1) {
                double v = (m.depth() == CV_8U) ? m.at<uint8_t>(y, x) : m.at<uint16_t>(y, x);
                r = g = b = v * s;
            } else if (m.depth() == CV_8U) {
                const uint8_t* p = m.ptr<uint8_t>(y) + x * ch;
                b = p[0] * s, g = p[1] * s, r = p[2] * s;  // OpenCV is BGR
            } else {
                const uint16_t* p = m.ptr<uint16_t>(y) + x * ch;
                b = p[0] * s, g = p[1] * s, r = p[2] * s;
            }
            img.set(x, y, {r, g, b});
        }
    }
    return img;
}

ImageGray load_gray(const std::string& path) {
    ImageRGB rgb = load_image(path);
    return to_luminance(rgb);
}

ImageMask load_mask(const std::string& path) {
    cv::Mat m = read_unchanged(path);
    ImageMask mask(m.cols, m.rows);
    const int ch = m.channels();
    for (int y = 0; y < m.rows; ++y) {
        for (int x = 0; x < m.cols; ++x) {
            double v = (m.depth() == CV_8U) ? *(m.ptr<uint8_t>(y) + x * ch)
                                            : *(m.ptr<uint16_t>(y) + x * ch);
            mask.set(x, y, v != 0.0);
        }
    }
    return mask;
}

void save_image(const ImageRGB& img, const std::string& path, int bits) {
    if (bits != 8 && bits != 16) throw InvalidInputError("save_image: bits must be 8 or 16");
    const int maxval = (bits == 8) ? 255 : 65535;
    cv::Mat m(img.height, img.width, bits == 8 ? CV_8UC3 : CV_16UC3);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const Vec3 c = img.at(x, y);
            if (bits == 8) {
                uint8_t* p = m.ptr<uint8_t>(y) + x * 3;
                p[0] = static_cast<uint8_t>(quant(c[2], maxval));
                p[1] = static_cast<uint8_t>(quant(c[1], maxval));
                p[2] = static_cast<uint8_t>(quant(c[0], maxval));
            } else {
                uint16_t* p = m.ptr<uint16_t>(y) + x * 3;
                p[0] = quant(c[2], maxval);
                p[1] = quant(c[1], maxval);
                p[2] = quant(c[0], maxval);
            }
        }
    }
    write_png(m, path);
}

void save_gray(const ImageGray& img, const std::string& path, int bits) {
    if (bits != 8 && bits != 16) throw InvalidInputError("save_gray: bits must be 8 or 16");
    const int maxval = (bits == 8) ? 255 : 65535;
    cv::Mat m(img.height, img.width, bits == 8 ? CV_8UC1 : CV_16UC1);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            if (bits == 8)
                m.at<uint8_t>(y, x) = static_cast<uint8_t>(quant(img.at(x, y), maxval));
            else
                m.at<uint16_t>(y, x) = quant(img.at(x, y), maxval);
        }
    write_png(m, path);
}

void save_mask(const ImageMask& mask, const std::string& path) {
    cv::Mat m(mask.height, mask.width, CV_8UC1);
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x) m.at<uint8_t>(y, x) = mask.at(x, y) ? 255 : 0;
    write_png(m, path);
}

void save_depth_raw(const ImageGray& depth, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open for writing: " + path);
    std::vector<float> row(depth.width);
    for (int y = 0; y < depth.height; ++y) {
        for (int x = 0; x < depth.width; ++x) row[x] = static_cast<float>(depth.at(x, y));
        f.write(reinterpret_cast<const char*>(row.data()), row.size() * sizeof(float));
    }
    if (!f) throw DataError("write failed: " + path);
}

ImageGray load_depth_raw(const std::string& path, int width, int height) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot read: " + path);
    ImageGray depth(width, height);
    std::vector<float> row(width);
    for (int y = 0; y < height; ++y) {
        f.read(reinterpret_cast<char*>(row.data()), row.size() * sizeof(float));
        if (!f) throw DataError("truncated depth file: " + path);
        for (int x = 0; x < width; ++x) depth.at(x, y) = row[x];
    }
    return depth;
}

void save_depth_png(const ImageGray& depth, const std::string& png_path,
                    const std::string& sidecar_path) {
    double lo = 0.0, hi = 0.0;
    bool any = false;
    for (double v : depth.data) {
        if (v <= 0.0) continue;
        if (!any) {
            lo = hi = v;
            any = true;
        } else {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (!any) lo = 0.0, hi = 1.0;
    const double span = (hi > lo) ? (hi - lo) : 1.0;
    // Code 0 is reserved for "no depth", so valid values occupy codes 1..65535.
    ImageGray scaled(depth.width, depth.height, 0.0);
    for (size_t i = 0; i < depth.data.size(); ++i)
        if (depth.data[i] > 0.0)
            scaled.data[i] = (1.0 + (depth.data[i] - lo) / span * 65534.0) / 65535.0;
    save_gray(scaled, png_path, 16);

    nlohmann::json j{{"min", lo}, {"max", lo + span}};
    std::ofstream f(sidecar_path);
    if (!f) throw DataError("cannot write depth sidecar: " + sidecar_path);
    f << j.dump(2) << "\n";
}

ImageGray load_depth_png(const std::string& png_path, const std::string& sidecar_path) {
    std::ifstream f(sidecar_path);
    if (!f) throw DataError("cannot read depth sidecar: " + sidecar_path);
    nlohmann::json j;
    f >> j;
    const double lo = j.at("min").get<double>();
    const double hi = j.at("max").get<double>();
    cv::Mat m = read_unchanged(png_path);
    if (m.depth() != CV_16U || m.channels() != 1)
        throw DataError("depth PNG must be 16-bit single channel: " + png_path);
    ImageGray depth(m.cols, m.rows);
    for (int y = 0; y < m.rows; ++y)
        for (int x = 0; x < m.cols; ++x) {
            const uint16_t code = m.at<uint16_t>(y, x);
            depth.at(x, y) = (code == 0) ? 0.0 : lo + (code - 1) / 65534.0 * (hi - lo);
        }
    return depth;
}

}  // namespace splatcolor
