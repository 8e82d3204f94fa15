#include "uwoam/detector.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "uwoam/rng.hpp"

namespace uwoam {

void DetectorSpec::validate() const {
    if (pixels < 32) throw std::invalid_argument("DetectorSpec: pixels must be >= 32");
    if (!(pitch > 0.0)) throw std::invalid_argument("DetectorSpec: pitch must be positive");
    if (!(exposure > 0.0)) throw std::invalid_argument("DetectorSpec: exposure must be positive");
    if (!(qe >= 0.0 && qe <= 1.0)) throw std::invalid_argument("DetectorSpec: qe must be in [0,1]");
    if (!(background >= 0.0)) throw std::invalid_argument("DetectorSpec: background must be >= 0");
}

uint64_t Frame::total() const {
    uint64_t s = 0;
    for (uint32_t c : counts) s += c;
    return s;
}

namespace {

// Bilinear sample of |field|^2 at physical position (x, y); zero outside.
double intensity_at(const ComplexField& field, double x, double y) {
    const int n = field.grid.n;
    const double pitch = field.grid.pitch();
    const double gx = x / pitch + n / 2;
    const double gy = y / pitch + n / 2;
    const int ix = static_cast<int>(std::floor(gx));
    const int iy = static_cast<int>(std::floor(gy));
    if (ix < 0 || iy < 0 || ix + 1 >= n || iy + 1 >= n) return 0.0;
    const double fx = gx - ix;
    const double fy = gy - iy;
    const double i00 = std::norm(field.at(ix, iy));
    const double i10 = std::norm(field.at(ix + 1, iy));
    const double i01 = std::norm(field.at(ix, iy + 1));
    const double i11 = std::norm(field.at(ix + 1, iy + 1));
    return (1 - fx) * (1 - fy) * i00 + fx * (1 - fy) * i10 + (1 - fx) * fy * i01 + fx * fy * i11;
}

}  // namespace

Frame capture_frame(const ComplexField& field, const DetectorSpec& det, double expected_photons,
                    int frame_index) {
    det.validate();
    if (!(expected_photons >= 0.0))
        throw std::invalid_argument("capture_frame: expected_photons must be >= 0");

    const int np = det.pixels;
    Frame frame;
    frame.pixels = np;
    frame.exposure = det.exposure;
    frame.index = frame_index;
    frame.timestamp = frame_index * det.exposure;
    frame.counts.assign(static_cast<size_t>(np) * np, 0);

    // Pixel share of the carried power, sampled at pixel centers.
    std::vector<double> share(frame.counts.size(), 0.0);
    const double power = field.norm2();
    if (power > 0.0) {
        const double cell = det.pitch * det.pitch / power;
        for (int iy = 0; iy < np; ++iy) {
            const double y = (iy - np / 2) * det.pitch;
            for (int ix = 0; ix < np; ++ix) {
                const double x = (ix - np / 2) * det.pitch;
                share[static_cast<size_t>(iy) * np + ix] = intensity_at(field, x, y) * cell;
            }
        }
    }

    Rng rng(det.seed, static_cast<uint64_t>(frame_index));
    for (size_t i = 0; i < frame.counts.size(); ++i) {
        const double mu = det.qe * expected_photons * share[i] + det.background;
        frame.counts[i] = rng.poisson(mu);
    }
    return frame;
}

std::vector<Frame> capture_sequence(const std::function<ComplexField(int)>& field_source,
                                    const DetectorSpec& det, double expected_photons,
                                    int n_frames) {
    if (n_frames < 1) throw std::invalid_argument("capture_sequence: n_frames must be >= 1");
    std::vector<Frame> frames;
    frames.reserve(n_frames);
    for (int i = 0; i < n_frames; ++i)
        frames.push_back(capture_frame(field_source(i), det, expected_photons, i));
    return frames;
}

void write_pgm16(const std::string& path, const Frame& frame) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_pgm16: cannot open " + path);
    out << "P5\n" << frame.pixels << " " << frame.pixels << "\n65535\n";
    std::vector<unsigned char> row(static_cast<size_t>(frame.pixels) * 2);
    for (int iy = 0; iy < frame.pixels; ++iy) {
        for (int ix = 0; ix < frame.pixels; ++ix) {
            const uint32_t v = std::min<uint32_t>(frame.at(ix, iy), 65535u);
            row[2 * ix] = static_cast<unsigned char>(v >> 8);
            row[2 * ix + 1] = static_cast<unsigned char>(v & 0xff);
        }
        out.write(reinterpret_cast<const char*>(row.data()), row.size());
    }
    if (!out) throw std::runtime_error("write_pgm16: write failed for " + path);
}

Frame read_pgm16(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_pgm16: cannot open " + path);
    std::string magic;
    int w = 0, h = 0, maxval = 0;
    in >> magic >> w >> h >> maxval;
    if (magic != "P5" || maxval != 65535 || w != h || w <= 0)
        throw std::runtime_error("read_pgm16: " + path + " is not a square 16-bit P5 PGM");
    in.get();  // single whitespace after maxval
    Frame frame;
    frame.pixels = w;
    frame.counts.resize(static_cast<size_t>(w) * h);
    std::vector<unsigned char> buf(frame.counts.size() * 2);
    in.read(reinterpret_cast<char*>(buf.data()), buf.size());
    if (!in) throw std::runtime_error("read_pgm16: truncated file " + path);
    for (size_t i = 0; i < frame.counts.size(); ++i)
        frame.counts[i] = (static_cast<uint32_t>(buf[2 * i]) << 8) | buf[2 * i + 1];
    return frame;
}

}  // namespace uwoam
