#ifndef QPATCH_DATASET_HPP
#define QPATCH_DATASET_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "qpatch/image.hpp"

namespace qpatch::data {

struct LabeledDataset {
    std::vector<ImageTensor> images;
    std::vector<int> labels;
    std::vector<std::string> class_names;
    std::string provenance;
    std::uint64_t seed = 0;

    std::size_t size() const { return images.size(); }
};

// IDX (big-endian) pair as used by the MNIST distribution: u8 pixels scaled
// to [0,1], image/label counts cross-checked.
LabeledDataset load_idx(const std::filesystem::path& image_path,
                        const std::filesystem::path& label_path);

// Writes a dataset back out as an IDX pair (u8 pixels). Round-trips through
// load_idx at 1/255 quantization; used for fixtures and synthetic sets.
void write_idx(const std::filesystem::path& image_path,
               const std::filesystem::path& label_path,
               const LabeledDataset& ds);

// Synthetic 16x16 stroke dataset over four balanced classes
// {plus, minus, vertical, horizontal} with seeded offsets and additive
// uniform noise of amplitude 0.1.
LabeledDataset gen_plus_minus(int n, std::uint64_t seed);

// Synthetic 28x28 two-class digit surrogate (rings vs strokes) with seeded
// jitter; stands in for handwritten 0/1 when no IDX files are available.
LabeledDataset gen_synth_digits(int n, std::uint64_t seed);

// Keeps `per_class` samples of each of the two classes, relabeled {0,1},
// original index order preserved.
LabeledDataset subset_binary(const LabeledDataset& ds, int class_a, int class_b,
                             int per_class);

// Block mean pooling by `factor`; dimensions that do not divide are
// edge-padded first.
ImageTensor downsample(const ImageTensor& image, int factor);

// CIFAR-style binary batch (3073-byte records), reduced to luminance and
// downsampled until max(H, W) <= target_size.
LabeledDataset load_cifar(const std::filesystem::path& batch_path, int target_size = 16);

}  // namespace qpatch::data

#endif  // QPATCH_DATASET_HPP
