#include "qpatch/quanvolution.hpp"

#include <fstream>
#include <string>

#include "qpatch/binio.hpp"
#include "qpatch/errors.hpp"

namespace qpatch {

ImageTensor to_luminance(const ImageTensor& image) {
    if (image.channels == 1) return image;
    if (image.channels != 3) {
        throw UsageError("luminance conversion expects 1 or 3 channels, got " +
                         std::to_string(image.channels));
    }
    ImageTensor out(image.height, image.width, 1);
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < image.width; ++x) {
            out.at(0, y, x) = 0.299 * image.at(0, y, x) + 0.587 * image.at(1, y, x) +
                              0.114 * image.at(2, y, x);
        }
    }
    return out;
}

namespace quanv {

namespace {

constexpr std::uint16_t kCacheVersion = 1;
constexpr char kCacheMagic[4] = {'Q', 'P', 'C', 'H'};

double pixel_or_zero(const ImageTensor& image, int y, int x) {
    if (y >= image.height || x >= image.width) return 0.0;
    return image.at(0, y, x);
}

}  // namespace

std::vector<Patch> extract_patches(const ImageTensor& image) {
    if (image.empty()) {
        throw UsageError("extract_patches: empty image");
    }
    const ImageTensor lum = to_luminance(image);
    const int out_h = (lum.height + 1) / 2;
    const int out_w = (lum.width + 1) / 2;
    std::vector<Patch> patches;
    patches.reserve(static_cast<std::size_t>(out_h) * static_cast<std::size_t>(out_w));
    for (int r = 0; r < out_h; ++r) {
        for (int c = 0; c < out_w; ++c) {
            Patch patch;
            patch.row = r;
            patch.col = c;
            patch.pixels = {pixel_or_zero(lum, 2 * r, 2 * c),
                            pixel_or_zero(lum, 2 * r, 2 * c + 1),
                            pixel_or_zero(lum, 2 * r + 1, 2 * c),
                            pixel_or_zero(lum, 2 * r + 1, 2 * c + 1)};
            patches.push_back(patch);
        }
    }
    return patches;
}

ChannelStack quanv_transform(const ImageTensor& image, const circuits::RqcSpec& rqc) {
    if (rqc.n_qubits != kPatchQubits) {
        throw ConfigError("quanv_transform: patch circuit needs " +
                          std::to_string(kPatchQubits) + " qubits, spec has " +
                          std::to_string(rqc.n_qubits));
    }
    const std::vector<Patch> patches = extract_patches(image);
    const ImageTensor lum = to_luminance(image);
    const int out_h = (lum.height + 1) / 2;
    const int out_w = (lum.width + 1) / 2;

    const double unit_weights[kPatchQubits] = {1.0, 1.0, 1.0, 1.0};
    circuits::CircuitIR circuit = circuits::angle_embedding(kPatchQubits, unit_weights);
    circuit.append(circuits::build_rqc(rqc));

    ChannelStack stack;
    stack.rqc_seed = rqc.seed;
    stack.rqc_depth = rqc.depth;
    stack.original = ImageTensor(out_h, out_w, 1);
    for (auto& channel : stack.quantum) channel = ImageTensor(out_h, out_w, 1);

    const qsim::StateVector ground(kPatchQubits);
    for (const Patch& patch : patches) {
        const qsim::StateVector state =
            circuits::execute(circuit, patch.pixels, {}, ground);
        for (int q = 0; q < kPatchQubits; ++q) {
            stack.quantum[static_cast<std::size_t>(q)].at(0, patch.row, patch.col) =
                state.expectation_z(q);
        }
        // Pooled original shares the patch's zero padding so both views
        // cover the same grid.
        stack.original.at(0, patch.row, patch.col) =
            0.25 * (patch.pixels[0] + patch.pixels[1] + patch.pixels[2] + patch.pixels[3]);
    }
    return stack;
}

std::size_t flat_feature_count(const ChannelStack& stack, bool include_original) {
    const std::size_t plane = stack.original.plane_size();
    return plane * (include_original ? 1 + kPatchQubits : kPatchQubits);
}

std::vector<double> flatten_features(const ChannelStack& stack, bool include_original) {
    std::vector<double> features;
    features.reserve(flat_feature_count(stack, include_original));
    if (include_original) {
        features.insert(features.end(), stack.original.values.begin(),
                        stack.original.values.end());
    }
    for (const ImageTensor& channel : stack.quantum) {
        for (double z : channel.values) {
            features.push_back(0.5 * (z + 1.0));
        }
    }
    return features;
}

void write_cache(const std::filesystem::path& path, std::span<const ChannelStack> stacks) {
    if (stacks.empty()) {
        throw UsageError("write_cache: no stacks to write");
    }
    const int h = stacks[0].original.height;
    const int w = stacks[0].original.width;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw FormatError("cannot open cache for writing: " + path.string());
    }
    out.write(kCacheMagic, 4);
    binio::put_u16(out, kCacheVersion);
    binio::put_u32(out, static_cast<std::uint32_t>(stacks.size()));
    binio::put_u32(out, static_cast<std::uint32_t>(h));
    binio::put_u32(out, static_cast<std::uint32_t>(w));
    binio::put_u32(out, 1 + kPatchQubits);
    for (const ChannelStack& stack : stacks) {
        if (stack.original.height != h || stack.original.width != w) {
            throw UsageError("write_cache: stacks have mixed resolutions");
        }
        for (double v : stack.original.values) {
            binio::put_f32(out, static_cast<float>(v));
        }
        for (const ImageTensor& channel : stack.quantum) {
            for (double v : channel.values) {
                binio::put_f32(out, static_cast<float>(v));
            }
        }
    }
    binio::put_u64(out, stacks[0].rqc_seed);
    binio::put_u16(out, static_cast<std::uint16_t>(stacks[0].rqc_depth));
    if (!out) {
        throw FormatError("write failed: " + path.string());
    }
}

std::vector<ChannelStack> read_cache(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FormatError("cannot open cache: " + path.string());
    }
    char magic[4];
    in.read(magic, 4);
    binio::need(in, "cache magic");
    if (std::memcmp(magic, kCacheMagic, 4) != 0) {
        throw FormatError("bad cache magic in " + path.string());
    }
    const std::uint16_t version = binio::get_u16(in, "cache version");
    if (version != kCacheVersion) {
        throw FormatError("unsupported cache version " + std::to_string(version) +
                          " in " + path.string());
    }
    const std::uint32_t n_images = binio::get_u32(in, "image count");
    const std::uint32_t h = binio::get_u32(in, "height");
    const std::uint32_t w = binio::get_u32(in, "width");
    const std::uint32_t channels = binio::get_u32(in, "channel count");
    if (channels != 1 + kPatchQubits) {
        throw FormatError("cache channel count " + std::to_string(channels) +
                          " unsupported in " + path.string());
    }
    std::vector<ChannelStack> stacks(n_images);
    for (ChannelStack& stack : stacks) {
        stack.original = ImageTensor(static_cast<int>(h), static_cast<int>(w), 1);
        for (double& v : stack.original.values) {
            v = binio::get_f32(in, "original channel in " + path.string());
        }
        for (ImageTensor& channel : stack.quantum) {
            channel = ImageTensor(static_cast<int>(h), static_cast<int>(w), 1);
            for (double& v : channel.values) {
                v = binio::get_f32(in, "quantum channel in " + path.string());
            }
        }
    }
    const std::uint64_t seed = binio::get_u64(in, "rqc seed");
    const std::uint16_t depth = binio::get_u16(in, "rqc depth");
    for (ChannelStack& stack : stacks) {
        stack.rqc_seed = seed;
        stack.rqc_depth = depth;
    }
    return stacks;
}

}  // namespace quanv
}  // namespace qpatch
