#ifndef QPATCH_IMAGE_HPP
#define QPATCH_IMAGE_HPP

#include <cstddef>
#include <vector>

namespace qpatch {

// Channel-major pixel grid. Image loaders normalize values into [0,1];
// quanvolution channels reuse the type with values in [-1,1].
struct ImageTensor {
    int height = 0;
    int width = 0;
    int channels = 1;
    std::vector<double> values;  // [c][y][x], row-major within a channel

    ImageTensor() = default;
    ImageTensor(int h, int w, int c = 1)
        : height(h), width(w), channels(c),
          values(static_cast<std::size_t>(h) * static_cast<std::size_t>(w) *
                     static_cast<std::size_t>(c),
                 0.0) {}

    std::size_t plane_size() const {
        return static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
    }

    double& at(int c, int y, int x) {
        return values[static_cast<std::size_t>(c) * plane_size() +
                      static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                      static_cast<std::size_t>(x)];
    }
    double at(int c, int y, int x) const {
        return values[static_cast<std::size_t>(c) * plane_size() +
                      static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                      static_cast<std::size_t>(x)];
    }

    bool empty() const { return values.empty(); }
};

// Fixed-weight luminance reduction (0.299 / 0.587 / 0.114); identity for
// single-channel images.
ImageTensor to_luminance(const ImageTensor& image);

}  // namespace qpatch

#endif  // QPATCH_IMAGE_HPP
