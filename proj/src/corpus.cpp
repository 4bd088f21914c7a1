#include "seislabel/corpus.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace seislabel {

namespace {

void check_pixel_range(const PatchImage& img, const std::string& what) {
    for (int r = 0; r < img.rows(); ++r)
        for (int c = 0; c < img.cols(); ++c) {
            float v = img(r, c);
            if (!std::isfinite(v) || v < 0.0f || v > 1.0f) {
                std::ostringstream os;
                os << what << ": pixel (" << r << "," << c << ") = " << v
                   << " outside [0,1]";
                throw DataError(os.str());
            }
        }
}

// ---- little-endian byte-level serialization -------------------------------

void put_u32(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_u16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_f32(std::string& out, float v) {
    put_u32(out, std::bit_cast<std::uint32_t>(v));
}

struct ByteReader {
    std::string data;
    std::size_t pos = 0;
    std::string path;

    void need(std::size_t n, const char* what) const {
        if (pos + n > data.size()) {
            std::ostringstream os;
            os << path << ": truncated file reading " << what << " at offset "
               << pos << " (need " << n << " bytes, " << (data.size() - pos)
               << " left)";
            throw DataError(os.str());
        }
    }
    std::uint32_t u32(const char* what) {
        need(4, what);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data[pos + i])) << (8 * i);
        pos += 4;
        return v;
    }
    std::uint16_t u16(const char* what) {
        need(2, what);
        std::uint16_t v = static_cast<std::uint16_t>(
            static_cast<unsigned char>(data[pos]) |
            (static_cast<unsigned char>(data[pos + 1]) << 8));
        pos += 2;
        return v;
    }
    float f32(const char* what) { return std::bit_cast<float>(u32(what)); }
    std::uint8_t u8(const char* what) {
        need(1, what);
        return static_cast<std::uint8_t>(data[pos++]);
    }
};

ByteReader read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(path + ": cannot open for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return ByteReader{buf.str(), 0, path};
}

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError(path + ": cannot open for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError(path + ": short write");
}

void check_magic(ByteReader& r, const std::string& expect) {
    r.need(4, "magic");
    std::string got = r.data.substr(r.pos, 4);
    if (got != expect) {
        std::ostringstream os;
        os << r.path << ": bad magic at offset 0: expected \"" << expect
           << "\", found \"";
        for (char ch : got)
            os << (std::isprint(static_cast<unsigned char>(ch)) ? ch : '?');
        os << "\"";
        throw DataError(os.str());
    }
    r.pos += 4;
}

}  // namespace

// ---- type invariants ------------------------------------------------------

void Patch::validate() const {
    if (width < 1 || height < 1)
        throw DataError("patch: non-positive dimensions");
    if (pixels.rows() != height || pixels.cols() != width)
        throw DataError("patch: pixel buffer does not match declared dimensions");
    check_pixel_range(pixels, "patch");
}

void PatchCorpus::validate() const {
    if (width < 1 || height < 1)
        throw DataError("corpus: non-positive patch dimensions");
    for (std::size_t i = 0; i < patches.size(); ++i) {
        if (patches[i].rows() != height || patches[i].cols() != width) {
            std::ostringstream os;
            os << "corpus: patch " << i << " is " << patches[i].cols() << "x"
               << patches[i].rows() << ", expected " << width << "x" << height;
            throw DataError(os.str());
        }
        check_pixel_range(patches[i], "corpus patch " + std::to_string(i));
    }
    if (n_classes == 0) {
        if (!class_labels.empty())
            throw DataError("corpus: class labels present but n_classes = 0");
    } else {
        if (class_labels.size() != patches.size())
            throw DataError("corpus: label count does not match patch count");
        for (std::size_t i = 0; i < class_labels.size(); ++i)
            if (class_labels[i] < 1 || class_labels[i] > n_classes) {
                std::ostringstream os;
                os << "corpus: label " << class_labels[i] << " of patch " << i
                   << " outside {1.." << n_classes << "}";
                throw DataError(os.str());
            }
    }
}

void LabelField::validate() const {
    if (Y.rows() != C.rows() || Y.cols() != C.cols())
        throw DataError("label field: Y and C dimensions differ");
    for (Eigen::Index c = 0; c < Y.cols(); ++c)
        for (Eigen::Index r = 0; r < Y.rows(); ++r) {
            if (Y(r, c) > n_classes)
                throw DataError("label field: label exceeds n_classes");
            if (!(C(r, c) >= 0.0))
                throw DataError("label field: negative or NaN confidence");
        }
}

void RasterVolume::validate() const {
    if (n_inline < 1 || n_crossline < 1 || n_depth < 1)
        throw DataError("volume: non-positive dimension");
    std::size_t expect = static_cast<std::size_t>(n_inline) * n_crossline * n_depth;
    if (samples.size() != expect)
        throw DataError("volume: sample count does not match dimensions");
}

// ---- volume operations ----------------------------------------------------

RasterVolume normalize_volume(const RasterVolume& volume) {
    volume.validate();
    auto [mn_it, mx_it] = std::minmax_element(volume.samples.begin(), volume.samples.end());
    float mn = *mn_it, mx = *mx_it;
    if (!(mx > mn))
        throw NumericError("normalize_volume: constant volume (max == min)");
    RasterVolume out = volume;
    float inv = 1.0f / (mx - mn);
    for (float& s : out.samples) s = (s - mn) * inv;
    return out;
}

PatchCorpus sample_patches(const RasterVolume& volume, int count, int size,
                           std::uint64_t seed) {
    volume.validate();
    if (count < 1) throw ConfigError("sample_patches: count must be >= 1");
    if (size < 1) throw ConfigError("sample_patches: size must be >= 1");
    // Sections are vertical slices: an inline section spans crossline x depth,
    // a crossline section spans inline x depth.  Sample from whichever
    // orientations the patch fits into.
    bool inline_ok = size <= volume.n_crossline && size <= volume.n_depth;
    bool crossline_ok = size <= volume.n_inline && size <= volume.n_depth;
    if (!inline_ok && !crossline_ok) {
        std::ostringstream os;
        os << "sample_patches: patch size " << size << " exceeds every section of a "
           << volume.n_inline << "x" << volume.n_crossline << "x" << volume.n_depth
           << " volume";
        throw DataError(os.str());
    }

    PatchCorpus corpus;
    corpus.width = size;
    corpus.height = size;
    corpus.patches.reserve(static_cast<std::size_t>(count));

    auto rng = make_rng(seed, 0);
    std::uniform_int_distribution<int> axis_pick(0, 1);
    for (int n = 0; n < count; ++n) {
        int axis = inline_ok && crossline_ok ? axis_pick(rng) : (inline_ok ? 0 : 1);
        PatchImage img(size, size);
        if (axis == 0) {
            int il = std::uniform_int_distribution<int>(0, volume.n_inline - 1)(rng);
            int c0 = std::uniform_int_distribution<int>(0, volume.n_crossline - size)(rng);
            int r0 = std::uniform_int_distribution<int>(0, volume.n_depth - size)(rng);
            for (int r = 0; r < size; ++r)
                for (int c = 0; c < size; ++c)
                    img(r, c) = volume.at(il, c0 + c, r0 + r);
        } else {
            int xl = std::uniform_int_distribution<int>(0, volume.n_crossline - 1)(rng);
            int c0 = std::uniform_int_distribution<int>(0, volume.n_inline - size)(rng);
            int r0 = std::uniform_int_distribution<int>(0, volume.n_depth - size)(rng);
            for (int r = 0; r < size; ++r)
                for (int c = 0; c < size; ++c)
                    img(r, c) = volume.at(c0 + c, xl, r0 + r);
        }
        check_pixel_range(img, "sample_patches (normalize the volume first)");
        corpus.patches.push_back(std::move(img));
    }
    return corpus;
}

// ---- synthetic corpus -----------------------------------------------------

namespace {

constexpr double kPi = 3.14159265358979323846;

struct TexturePatch {
    PatchImage img;
    Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> gt;
};

// Smooth horizontal layering with random frequency/phase and a mild wave.
void paint_layers(PatchImage& img, std::mt19937_64& rng, double angle = 0.0) {
    int n = static_cast<int>(img.rows());
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    double cycles = 3.0 + 2.0 * uni(rng);
    double phase = 2.0 * kPi * uni(rng);
    double warp_amp = 1.5 * uni(rng);
    double warp_ph = 2.0 * kPi * uni(rng);
    double ca = std::cos(angle), sa = std::sin(angle);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            double axis = ca * r + sa * c;
            double cross = -sa * r + ca * c;
            double warp = warp_amp * std::sin(2.0 * kPi * cross / n + warp_ph);
            img(r, c) = static_cast<float>(
                0.5 + 0.42 * std::sin(2.0 * kPi * cycles * (axis + warp) / n + phase));
        }
}

// Band-limited random field: sum of random-direction sinusoids, squashed to a
// bright, rough texture.
void paint_chaotic(PatchImage& img, std::mt19937_64& rng) {
    int n = static_cast<int>(img.rows());
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    constexpr int kWaves = 24;
    double kx[kWaves], ky[kWaves], ph[kWaves];
    for (int w = 0; w < kWaves; ++w) {
        double theta = 2.0 * kPi * uni(rng);
        double freq = 4.0 + 6.0 * uni(rng);
        kx[w] = 2.0 * kPi * freq * std::cos(theta) / n;
        ky[w] = 2.0 * kPi * freq * std::sin(theta) / n;
        ph[w] = 2.0 * kPi * uni(rng);
    }
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            double s = 0.0;
            for (int w = 0; w < kWaves; ++w)
                s += std::sin(kx[w] * c + ky[w] * r + ph[w]);
            s /= std::sqrt(static_cast<double>(kWaves) / 2.0);  // ~unit variance
            img(r, c) = static_cast<float>(0.62 + 0.17 * std::tanh(s));
        }
}

TexturePatch make_layers(int n, std::mt19937_64& rng) {
    TexturePatch t;
    t.img.resize(n, n);
    paint_layers(t.img, rng);
    t.gt.setConstant(n, n, 1);
    return t;
}

TexturePatch make_chaotic(int n, std::mt19937_64& rng) {
    TexturePatch t;
    t.img.resize(n, n);
    paint_chaotic(t.img, rng);
    t.gt.setConstant(n, n, 2);
    return t;
}

// Layered background cut by a bright dipping fault band; layers are displaced
// across the band.  Ground truth marks the class-defining region: band pixels
// -> class 3, the layered fill stays unmarked (0).
TexturePatch make_fault(int n, std::mt19937_64& rng) {
    TexturePatch t;
    t.img.resize(n, n);
    t.gt.setConstant(n, n, 0);
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    double cycles = 3.0 + 2.0 * uni(rng);
    double phase = 2.0 * kPi * uni(rng);
    double slope = 0.5 + 0.6 * uni(rng);      // fault dip (rows per column)
    if (uni(rng) < 0.5) slope = -slope;
    double c_mid = n * (0.3 + 0.4 * uni(rng));  // column where band crosses mid-row
    double half_w = 2.2 + 1.3 * uni(rng);
    double throw_px = 4.0 + 5.0 * uni(rng);     // layer displacement across band

    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            // signed distance to the band's center line (scaled to pixels)
            double d = (r - n / 2.0 - slope * (c - c_mid)) / std::sqrt(1.0 + slope * slope);
            double rr = r + (d > 0 ? throw_px : 0.0);
            double layer = 0.5 + 0.42 * std::sin(2.0 * kPi * cycles * rr / n + phase);
            if (std::abs(d) <= half_w) {
                double edge = std::abs(d) / half_w;  // 0 center .. 1 edge
                t.img(r, c) = static_cast<float>(0.98 - 0.12 * edge * edge);
                t.gt(r, c) = 3;
            } else {
                t.img(r, c) = static_cast<float>(layer);
            }
        }
    return t;
}

// Bright-rimmed dome: flat mid-bright interior, layered exterior.  Ground
// truth marks the class-defining region: rim + interior -> class 4, the
// layered exterior stays unmarked (0).
TexturePatch make_dome(int n, std::mt19937_64& rng) {
    TexturePatch t;
    t.img.resize(n, n);
    t.gt.setConstant(n, n, 0);
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    paint_layers(t.img, rng);
    double cr = n * (0.38 + 0.24 * uni(rng));
    double cc = n * (0.38 + 0.24 * uni(rng));
    double radius = n * (0.26 + 0.10 * uni(rng));
    double rim_w = 2.0 + 0.08 * n * uni(rng) * 0.2 + 1.0;

    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            double d = std::hypot(r - cr, c - cc);
            if (d <= radius - rim_w) {
                t.img(r, c) = 0.56f;
                t.gt(r, c) = 4;
            } else if (d <= radius + rim_w) {
                double edge = std::abs(d - radius) / rim_w;
                t.img(r, c) = static_cast<float>(0.99 - 0.10 * edge * edge);
                t.gt(r, c) = 4;
            }
        }
    return t;
}

TexturePatch make_vlayers(int n, std::mt19937_64& rng) {
    TexturePatch t;
    t.img.resize(n, n);
    paint_layers(t.img, rng, kPi / 2.0);
    t.gt.setConstant(n, n, 5);
    return t;
}

TexturePatch make_diagonal(int n, std::mt19937_64& rng) {
    TexturePatch t;
    t.img.resize(n, n);
    paint_layers(t.img, rng, kPi / 4.0);
    t.gt.setConstant(n, n, 6);
    return t;
}

// Bright Gaussian blobs on a dark background.
TexturePatch make_blobs(int n, std::mt19937_64& rng) {
    TexturePatch t;
    t.img.setConstant(n, n, 0.18f);
    t.gt.setConstant(n, n, 7);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    int blobs = 4 + static_cast<int>(3.0 * uni(rng));
    for (int b = 0; b < blobs; ++b) {
        double cr = n * uni(rng), cc = n * uni(rng);
        double sig = n * (0.05 + 0.05 * uni(rng));
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) {
                double d2 = ((r - cr) * (r - cr) + (c - cc) * (c - cc)) / (2.0 * sig * sig);
                double v = t.img(r, c) + 0.8 * std::exp(-d2);
                t.img(r, c) = static_cast<float>(std::min(v, 0.99));
            }
    }
    return t;
}

// Sparse bright speckles on a mid-gray background.
TexturePatch make_speckle(int n, std::mt19937_64& rng) {
    TexturePatch t;
    t.img.setConstant(n, n, 0.35f);
    t.gt.setConstant(n, n, 8);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    int dots = n * n / 40;
    for (int d = 0; d < dots; ++d) {
        int r = std::uniform_int_distribution<int>(0, n - 1)(rng);
        int c = std::uniform_int_distribution<int>(0, n - 1)(rng);
        for (int dr = -1; dr <= 1; ++dr)
            for (int dc = -1; dc <= 1; ++dc) {
                int rr = r + dr, cc = c + dc;
                if (rr < 0 || rr >= n || cc < 0 || cc >= n) continue;
                float v = (dr == 0 && dc == 0) ? 0.95f : 0.7f;
                t.img(rr, cc) = std::max(t.img(rr, cc), v);
            }
    }
    return t;
}

}  // namespace

std::pair<PatchCorpus, LabelField> generate_synthetic_corpus(int n_classes,
                                                             int per_class,
                                                             int size,
                                                             std::uint64_t seed) {
    if (n_classes < 2 || n_classes > 8)
        throw ConfigError("generate_synthetic_corpus: n_classes must be in 2..8");
    if (per_class < 1)
        throw ConfigError("generate_synthetic_corpus: per_class must be >= 1");
    if (size < 16)
        throw ConfigError("generate_synthetic_corpus: size must be >= 16");

    using Maker = TexturePatch (*)(int, std::mt19937_64&);
    static const Maker makers[8] = {make_layers, make_chaotic, make_fault,
                                    make_dome,  make_vlayers, make_diagonal,
                                    make_blobs, make_speckle};
    static const char* names[8] = {"layers", "chaotic", "fault",  "dome",
                                   "vlayers", "diagonal", "blobs", "speckle"};

    PatchCorpus corpus;
    corpus.width = size;
    corpus.height = size;
    corpus.n_classes = n_classes;
    corpus.class_names.assign(names, names + n_classes);

    int total = n_classes * per_class;
    LabelField gt;
    gt.n_classes = n_classes;
    gt.Y.resize(static_cast<Eigen::Index>(size) * size, total);
    gt.C = Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(size) * size, total);

    for (int cls = 1; cls <= n_classes; ++cls) {
        for (int j = 0; j < per_class; ++j) {
            int idx = (cls - 1) * per_class + j;
            auto rng = make_rng(seed, static_cast<std::uint64_t>(idx));
            TexturePatch t = makers[cls - 1](size, rng);

            // mild global illumination tilt + sensor noise, then clamp
            std::uniform_real_distribution<double> uni(-1.0, 1.0);
            double tilt_r = 0.04 * uni(rng), tilt_c = 0.04 * uni(rng);
            std::normal_distribution<double> noise(0.0, 0.012);
            for (int r = 0; r < size; ++r)
                for (int c = 0; c < size; ++c) {
                    double v = t.img(r, c) + tilt_r * (static_cast<double>(r) / size - 0.5) +
                               tilt_c * (static_cast<double>(c) / size - 0.5) + noise(rng);
                    t.img(r, c) = static_cast<float>(std::clamp(v, 0.0, 1.0));
                }

            corpus.patches.push_back(std::move(t.img));
            corpus.class_labels.push_back(static_cast<std::uint16_t>(cls));
            for (int r = 0; r < size; ++r)
                for (int c = 0; c < size; ++c)
                    gt.Y(static_cast<Eigen::Index>(r) * size + c, idx) = t.gt(r, c);
        }
    }
    corpus.validate();
    gt.validate();
    return {std::move(corpus), std::move(gt)};
}

// ---- packed container IO --------------------------------------------------

void save_corpus(const PatchCorpus& corpus, const std::string& path) {
    corpus.validate();
    std::string out;
    out.reserve(20 + corpus.patches.size() * (2 + 4ull * corpus.width * corpus.height));
    out += "SLC1";
    put_u32(out, static_cast<std::uint32_t>(corpus.patches.size()));
    put_u32(out, static_cast<std::uint32_t>(corpus.width));
    put_u32(out, static_cast<std::uint32_t>(corpus.height));
    put_u32(out, static_cast<std::uint32_t>(corpus.n_classes));
    if (corpus.n_classes > 0)
        for (std::uint16_t l : corpus.class_labels) put_u16(out, l);
    for (const auto& img : corpus.patches)
        for (int r = 0; r < img.rows(); ++r)
            for (int c = 0; c < img.cols(); ++c) put_f32(out, img(r, c));
    write_file(path, out);
}

PatchCorpus load_corpus(const std::string& path) {
    ByteReader r = read_file(path);
    check_magic(r, "SLC1");
    std::uint32_t count = r.u32("patch count");
    std::uint32_t width = r.u32("width");
    std::uint32_t height = r.u32("height");
    std::uint32_t n_classes = r.u32("class count");
    if (width == 0 || height == 0)
        throw DataError(path + ": zero patch dimensions in header");

    PatchCorpus corpus;
    corpus.width = static_cast<int>(width);
    corpus.height = static_cast<int>(height);
    corpus.n_classes = static_cast<int>(n_classes);
    if (n_classes > 0) {
        corpus.class_labels.resize(count);
        for (std::uint32_t i = 0; i < count; ++i)
            corpus.class_labels[i] = r.u16("class label");
        for (std::uint32_t c = 1; c <= n_classes; ++c)
            corpus.class_names.push_back("class_" + std::to_string(c));
    }
    corpus.patches.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        PatchImage img(height, width);
        for (std::uint32_t rr = 0; rr < height; ++rr)
            for (std::uint32_t cc = 0; cc < width; ++cc)
                img(rr, cc) = r.f32("pixel data");
        corpus.patches.push_back(std::move(img));
    }
    if (r.pos != r.data.size())
        throw DataError(path + ": " + std::to_string(r.data.size() - r.pos) +
                        " trailing bytes after payload");
    corpus.validate();
    return corpus;
}

void save_label_field(const LabelField& field, int width, int height,
                      const std::string& path) {
    field.validate();
    if (static_cast<Eigen::Index>(width) * height != field.Y.rows())
        throw DataError("save_label_field: width*height does not match label rows");
    std::string out;
    out += "SLM1";
    put_u32(out, static_cast<std::uint32_t>(field.Y.cols()));
    put_u32(out, static_cast<std::uint32_t>(width));
    put_u32(out, static_cast<std::uint32_t>(height));
    put_u32(out, static_cast<std::uint32_t>(field.n_classes));
    for (Eigen::Index n = 0; n < field.Y.cols(); ++n)
        for (Eigen::Index i = 0; i < field.Y.rows(); ++i)
            out.push_back(static_cast<char>(field.Y(i, n)));
    write_file(path, out);
}

LabelField load_label_field(const std::string& path, int* width, int* height) {
    ByteReader r = read_file(path);
    check_magic(r, "SLM1");
    std::uint32_t count = r.u32("image count");
    std::uint32_t w = r.u32("width");
    std::uint32_t h = r.u32("height");
    std::uint32_t n_classes = r.u32("class count");
    LabelField field;
    field.n_classes = static_cast<int>(n_classes);
    field.Y.resize(static_cast<Eigen::Index>(w) * h, count);
    for (std::uint32_t n = 0; n < count; ++n)
        for (std::uint32_t i = 0; i < static_cast<std::uint32_t>(w) * h; ++i)
            field.Y(i, n) = r.u8("label data");
    if (r.pos != r.data.size())
        throw DataError(path + ": " + std::to_string(r.data.size() - r.pos) +
                        " trailing bytes after payload");
    field.C = Eigen::MatrixXd::Ones(field.Y.rows(), field.Y.cols());
    field.validate();
    if (width) *width = static_cast<int>(w);
    if (height) *height = static_cast<int>(h);
    return field;
}

void save_float_stack(const std::string& magic, const std::vector<Eigen::MatrixXf>& planes,
                      const std::string& path) {
    if (magic.size() != 4) throw ConfigError("save_float_stack: magic must be 4 bytes");
    if (planes.empty()) throw DataError("save_float_stack: no planes to write");
    Eigen::Index rows = planes[0].rows(), cols = planes[0].cols();
    for (const auto& p : planes)
        if (p.rows() != rows || p.cols() != cols)
            throw DataError("save_float_stack: inconsistent plane dimensions");
    std::string out;
    out += magic;
    put_u32(out, static_cast<std::uint32_t>(planes.size()));
    put_u32(out, static_cast<std::uint32_t>(cols));
    put_u32(out, static_cast<std::uint32_t>(rows));
    put_u32(out, 0);
    for (const auto& p : planes)
        for (Eigen::Index r = 0; r < rows; ++r)
            for (Eigen::Index c = 0; c < cols; ++c) put_f32(out, p(r, c));
    write_file(path, out);
}

std::vector<Eigen::MatrixXf> load_float_stack(const std::string& magic,
                                              const std::string& path) {
    ByteReader r = read_file(path);
    check_magic(r, magic);
    std::uint32_t count = r.u32("plane count");
    std::uint32_t cols = r.u32("width");
    std::uint32_t rows = r.u32("height");
    r.u32("reserved");
    std::vector<Eigen::MatrixXf> planes;
    planes.reserve(count);
    for (std::uint32_t n = 0; n < count; ++n) {
        Eigen::MatrixXf p(rows, cols);
        for (std::uint32_t rr = 0; rr < rows; ++rr)
            for (std::uint32_t cc = 0; cc < cols; ++cc)
                p(rr, cc) = r.f32("float data");
        planes.push_back(std::move(p));
    }
    if (r.pos != r.data.size())
        throw DataError(path + ": " + std::to_string(r.data.size() - r.pos) +
                        " trailing bytes after payload");
    return planes;
}

}  // namespace seislabel
