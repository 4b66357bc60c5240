#include "qpatch/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "qpatch/binio.hpp"
#include "qpatch/errors.hpp"
#include "qpatch/rng.hpp"

namespace qpatch::data {

namespace {

constexpr std::uint32_t kIdxImageMagic = 0x00000803;
constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

std::ifstream open_binary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FormatError("cannot open " + path.string());
    }
    return in;
}

}  // namespace

LabeledDataset load_idx(const std::filesystem::path& image_path,
                        const std::filesystem::path& label_path) {
    std::ifstream images = open_binary(image_path);
    const std::uint32_t image_magic = binio::get_be_u32(images, image_path.string());
    if (image_magic != kIdxImageMagic) {
        throw FormatError("bad IDX image magic in " + image_path.string());
    }
    const std::uint32_t n_images = binio::get_be_u32(images, image_path.string());
    const std::uint32_t rows = binio::get_be_u32(images, image_path.string());
    const std::uint32_t cols = binio::get_be_u32(images, image_path.string());

    std::ifstream labels = open_binary(label_path);
    const std::uint32_t label_magic = binio::get_be_u32(labels, label_path.string());
    if (label_magic != kIdxLabelMagic) {
        throw FormatError("bad IDX label magic in " + label_path.string());
    }
    const std::uint32_t n_labels = binio::get_be_u32(labels, label_path.string());
    if (n_images != n_labels) {
        throw FormatError("IDX count mismatch: " + image_path.string() + " has " +
                          std::to_string(n_images) + " images, " + label_path.string() +
                          " has " + std::to_string(n_labels) + " labels");
    }

    LabeledDataset ds;
    ds.provenance = "idx:" + image_path.string();
    ds.images.reserve(n_images);
    ds.labels.reserve(n_images);
    std::vector<unsigned char> buf(static_cast<std::size_t>(rows) * cols);
    int max_label = 0;
    for (std::uint32_t i = 0; i < n_images; ++i) {
        images.read(reinterpret_cast<char*>(buf.data()),
                    static_cast<std::streamsize>(buf.size()));
        if (!images) {
            throw FormatError("truncated image payload in " + image_path.string());
        }
        ImageTensor img(static_cast<int>(rows), static_cast<int>(cols), 1);
        for (std::size_t p = 0; p < buf.size(); ++p) {
            img.values[p] = static_cast<double>(buf[p]) / 255.0;
        }
        ds.images.push_back(std::move(img));

        char label_byte;
        labels.read(&label_byte, 1);
        if (!labels) {
            throw FormatError("truncated label payload in " + label_path.string());
        }
        const int label = static_cast<unsigned char>(label_byte);
        max_label = std::max(max_label, label);
        ds.labels.push_back(label);
    }
    ds.class_names.resize(static_cast<std::size_t>(max_label) + 1);
    for (std::size_t c = 0; c < ds.class_names.size(); ++c) {
        ds.class_names[c] = std::to_string(c);
    }
    return ds;
}

void write_idx(const std::filesystem::path& image_path,
               const std::filesystem::path& label_path,
               const LabeledDataset& ds) {
    if (ds.images.empty()) {
        throw UsageError("write_idx: empty dataset");
    }
    const int rows = ds.images[0].height;
    const int cols = ds.images[0].width;
    std::ofstream images(image_path, std::ios::binary | std::ios::trunc);
    std::ofstream labels(label_path, std::ios::binary | std::ios::trunc);
    if (!images || !labels) {
        throw FormatError("cannot open IDX outputs for writing");
    }
    auto put_be = [](std::ofstream& out, std::uint32_t v) {
        char bytes[4];
        for (int i = 0; i < 4; ++i) bytes[i] = static_cast<char>((v >> (8 * (3 - i))) & 0xff);
        out.write(bytes, 4);
    };
    put_be(images, kIdxImageMagic);
    put_be(images, static_cast<std::uint32_t>(ds.images.size()));
    put_be(images, static_cast<std::uint32_t>(rows));
    put_be(images, static_cast<std::uint32_t>(cols));
    put_be(labels, kIdxLabelMagic);
    put_be(labels, static_cast<std::uint32_t>(ds.labels.size()));
    for (std::size_t i = 0; i < ds.images.size(); ++i) {
        const ImageTensor& img = ds.images[i];
        if (img.height != rows || img.width != cols || img.channels != 1) {
            throw UsageError("write_idx: images must share a single-channel shape");
        }
        for (double v : img.values) {
            const double clamped = std::clamp(v, 0.0, 1.0);
            const char byte = static_cast<char>(std::lround(clamped * 255.0));
            images.write(&byte, 1);
        }
        const char label_byte = static_cast<char>(ds.labels[i]);
        labels.write(&label_byte, 1);
    }
    if (!images || !labels) {
        throw FormatError("IDX write failed");
    }
}

namespace {

void draw_hline(ImageTensor& img, int y, int x0, int x1, int thickness, double value) {
    for (int t = 0; t < thickness; ++t) {
        const int row = y + t;
        if (row < 0 || row >= img.height) continue;
        for (int x = std::max(0, x0); x <= std::min(img.width - 1, x1); ++x) {
            img.at(0, row, x) = value;
        }
    }
}

void draw_vline(ImageTensor& img, int x, int y0, int y1, int thickness, double value) {
    for (int t = 0; t < thickness; ++t) {
        const int col = x + t;
        if (col < 0 || col >= img.width) continue;
        for (int y = std::max(0, y0); y <= std::min(img.height - 1, y1); ++y) {
            img.at(0, y, col) = value;
        }
    }
}

void add_noise_and_clip(ImageTensor& img, rng::Engine& gen, double amplitude) {
    for (double& v : img.values) {
        v = std::clamp(v + amplitude * rng::unit_double(gen), 0.0, 1.0);
    }
}

}  // namespace

LabeledDataset gen_plus_minus(int n, std::uint64_t seed) {
    if (n < 4) {
        throw UsageError("gen_plus_minus: need at least 4 samples");
    }
    constexpr int kSize = 16;
    LabeledDataset ds;
    ds.provenance = "plus-minus";
    ds.seed = seed;
    ds.class_names = {"plus", "minus", "vertical", "horizontal"};
    rng::Engine gen(seed);
    for (int i = 0; i < n; ++i) {
        const int cls = i % 4;
        ImageTensor img(kSize, kSize, 1);
        const int cy = 5 + static_cast<int>(rng::bounded(gen, 5));  // [5, 9]
        const int cx = 5 + static_cast<int>(rng::bounded(gen, 5));
        const double ink = 0.9;
        switch (cls) {
            case 0:  // plus: crossing strokes
                draw_hline(img, cy, cx - 4, cx + 5, 2, ink);
                draw_vline(img, cx, cy - 4, cy + 5, 2, ink);
                break;
            case 1:  // minus: short centered dash
                draw_hline(img, cy, cx - 3, cx + 2, 2, ink);
                break;
            case 2:  // vertical: full-height bar
                draw_vline(img, cx, 1, kSize - 2, 2, ink);
                break;
            default:  // horizontal: full-width bar
                draw_hline(img, cy, 1, kSize - 2, 2, ink);
                break;
        }
        add_noise_and_clip(img, gen, 0.1);
        ds.images.push_back(std::move(img));
        ds.labels.push_back(cls);
    }
    return ds;
}

LabeledDataset gen_synth_digits(int n, std::uint64_t seed) {
    if (n < 2) {
        throw UsageError("gen_synth_digits: need at least 2 samples");
    }
    constexpr int kSize = 28;
    LabeledDataset ds;
    ds.provenance = "synth-digits";
    ds.seed = seed;
    ds.class_names = {"0", "1"};
    rng::Engine gen(seed);
    for (int i = 0; i < n; ++i) {
        const int cls = i % 2;
        ImageTensor img(kSize, kSize, 1);
        // Jitter ranges mimic size-normalized, centered handwriting: shapes
        // of one class stay close together in pixel space.
        const double cy = 13.5 + rng::range_double(gen, -0.75, 0.75);
        const double cx = 13.5 + rng::range_double(gen, -0.75, 0.75);
        const double ink = rng::range_double(gen, 0.8, 1.0);
        if (cls == 0) {
            // Ring: elliptic annulus around the jittered center.
            const double ry = rng::range_double(gen, 7.8, 8.2);
            const double rx = rng::range_double(gen, 5.8, 6.2);
            const double band = rng::range_double(gen, 0.26, 0.30);
            for (int y = 0; y < kSize; ++y) {
                for (int x = 0; x < kSize; ++x) {
                    const double dy = (y - cy) / ry;
                    const double dx = (x - cx) / rx;
                    const double d = std::sqrt(dy * dy + dx * dx);
                    if (std::abs(d - 1.0) < band) {
                        img.at(0, y, x) = ink;
                    }
                }
            }
        } else {
            // Stroke: near-vertical bar with a slight slant.
            const double slant = rng::range_double(gen, -0.05, 0.05);
            const int half = 9 + static_cast<int>(rng::bounded(gen, 2));
            const int width = 3;
            for (int y = static_cast<int>(cy) - half; y <= static_cast<int>(cy) + half; ++y) {
                if (y < 0 || y >= kSize) continue;
                const int x0 = static_cast<int>(std::lround(cx + slant * (y - cy)));
                for (int w = 0; w < width; ++w) {
                    const int x = x0 + w;
                    if (x >= 0 && x < kSize) img.at(0, y, x) = ink;
                }
            }
        }
        add_noise_and_clip(img, gen, 0.02);
        ds.images.push_back(std::move(img));
        ds.labels.push_back(cls);
    }
    return ds;
}

LabeledDataset subset_binary(const LabeledDataset& ds, int class_a, int class_b,
                             int per_class) {
    if (class_a == class_b) {
        throw UsageError("subset_binary: classes must differ");
    }
    std::vector<std::size_t> picked;
    int count_a = 0;
    int count_b = 0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (ds.labels[i] == class_a && count_a < per_class) {
            picked.push_back(i);
            ++count_a;
        } else if (ds.labels[i] == class_b && count_b < per_class) {
            picked.push_back(i);
            ++count_b;
        }
    }
    if (count_a < per_class || count_b < per_class) {
        throw UsageError("subset_binary: need " + std::to_string(per_class) +
                         " per class, found " + std::to_string(count_a) + " of class " +
                         std::to_string(class_a) + " and " + std::to_string(count_b) +
                         " of class " + std::to_string(class_b));
    }
    LabeledDataset out;
    out.provenance = ds.provenance + "|binary(" + std::to_string(class_a) + "," +
                     std::to_string(class_b) + ")";
    out.seed = ds.seed;
    auto name_of = [&ds](int cls) {
        return cls >= 0 && static_cast<std::size_t>(cls) < ds.class_names.size()
                   ? ds.class_names[static_cast<std::size_t>(cls)]
                   : std::to_string(cls);
    };
    out.class_names = {name_of(class_a), name_of(class_b)};
    for (std::size_t idx : picked) {
        out.images.push_back(ds.images[idx]);
        out.labels.push_back(ds.labels[idx] == class_a ? 0 : 1);
    }
    return out;
}

ImageTensor downsample(const ImageTensor& image, int factor) {
    if (factor <= 0) {
        throw UsageError("downsample: factor must be positive");
    }
    if (factor == 1) return image;
    const int out_h = (image.height + factor - 1) / factor;
    const int out_w = (image.width + factor - 1) / factor;
    ImageTensor out(out_h, out_w, image.channels);
    const double inv = 1.0 / (static_cast<double>(factor) * factor);
    for (int c = 0; c < image.channels; ++c) {
        for (int y = 0; y < out_h; ++y) {
            for (int x = 0; x < out_w; ++x) {
                double acc = 0.0;
                for (int dy = 0; dy < factor; ++dy) {
                    for (int dx = 0; dx < factor; ++dx) {
                        // Edge padding: clamp reads to the last row/column.
                        const int sy = std::min(image.height - 1, y * factor + dy);
                        const int sx = std::min(image.width - 1, x * factor + dx);
                        acc += image.at(c, sy, sx);
                    }
                }
                out.at(c, y, x) = acc * inv;
            }
        }
    }
    return out;
}

LabeledDataset load_cifar(const std::filesystem::path& batch_path, int target_size) {
    constexpr std::size_t kRecord = 3073;  // label byte + 3 * 32 * 32
    constexpr int kSide = 32;
    std::ifstream in = open_binary(batch_path);
    in.seekg(0, std::ios::end);
    const std::streamoff file_size = in.tellg();
    in.seekg(0, std::ios::beg);
    if (file_size <= 0 || static_cast<std::size_t>(file_size) % kRecord != 0) {
        throw FormatError("CIFAR batch size " + std::to_string(file_size) +
                          " is not a multiple of 3073 bytes: " + batch_path.string());
    }
    const std::size_t n_records = static_cast<std::size_t>(file_size) / kRecord;
    LabeledDataset ds;
    ds.provenance = "cifar:" + batch_path.string();
    ds.class_names = {"airplane", "automobile", "bird", "cat", "deer",
                      "dog", "frog", "horse", "ship", "truck"};
    std::vector<unsigned char> record(kRecord);
    for (std::size_t i = 0; i < n_records; ++i) {
        in.read(reinterpret_cast<char*>(record.data()),
                static_cast<std::streamsize>(kRecord));
        if (!in) {
            throw FormatError("truncated CIFAR record in " + batch_path.string());
        }
        const int label = record[0];
        if (label >= 10) {
            throw FormatError("CIFAR label " + std::to_string(label) + " out of range in " +
                              batch_path.string());
        }
        ImageTensor rgb(kSide, kSide, 3);
        for (int c = 0; c < 3; ++c) {
            for (int p = 0; p < kSide * kSide; ++p) {
                rgb.values[static_cast<std::size_t>(c) * kSide * kSide +
                           static_cast<std::size_t>(p)] =
                    static_cast<double>(record[1 + static_cast<std::size_t>(c) * 1024 +
                                               static_cast<std::size_t>(p)]) /
                    255.0;
            }
        }
        ImageTensor lum = to_luminance(rgb);
        while (std::max(lum.height, lum.width) > target_size) {
            lum = downsample(lum, 2);
        }
        ds.images.push_back(std::move(lum));
        ds.labels.push_back(label);
    }
    return ds;
}

}  // namespace qpatch::data
