#ifndef QPATCH_QUANVOLUTION_HPP
#define QPATCH_QUANVOLUTION_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "qpatch/circuit.hpp"
#include "qpatch/image.hpp"

namespace qpatch::quanv {

inline constexpr int kPatchQubits = 4;  // 2x2 window, one qubit per pixel

// One non-overlapping 2x2 window in row-major patch order. `row`/`col`
// locate it on the output grid.
struct Patch {
    std::array<double, 4> pixels{};  // (y,x), (y,x+1), (y+1,x), (y+1,x+1)
    int row = 0;
    int col = 0;
};

// Row-major 2x2/stride-2 windows over the luminance image, zero-padded on
// the bottom/right when a dimension is odd.
std::vector<Patch> extract_patches(const ImageTensor& image);

// Original image pooled to the patch grid plus the four Z-expectation
// channels produced by the patch circuit.
struct ChannelStack {
    ImageTensor original;                          // 2x2 mean-pooled, 1 channel
    std::array<ImageTensor, kPatchQubits> quantum; // values in [-1, 1]
    std::uint64_t rqc_seed = 0;
    int rqc_depth = 0;
};

// Runs angle embedding + the seeded RQC on every patch and reads one
// Z-expectation per qubit into the four output channels.
ChannelStack quanv_transform(const ImageTensor& image, const circuits::RqcSpec& rqc);

// [pooled original || four quantum channels], row-major per channel, with
// expectations affinely mapped to [0,1] via (z+1)/2.
std::vector<double> flatten_features(const ChannelStack& stack, bool include_original);

std::size_t flat_feature_count(const ChannelStack& stack, bool include_original);

// Quanv cache ("QPCH"): little-endian binary holding every stack of a run
// plus the generating RqcSpec. Bit-exact across platforms.
void write_cache(const std::filesystem::path& path, std::span<const ChannelStack> stacks);
std::vector<ChannelStack> read_cache(const std::filesystem::path& path);

}  // namespace qpatch::quanv

#endif  // QPATCH_QUANVOLUTION_HPP
