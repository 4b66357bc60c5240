#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "qpatch/dataset.hpp"
#include "qpatch/errors.hpp"

using namespace qpatch;
using data::LabeledDataset;

namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
    return fs::temp_directory_path() / ("qpatch_data_" + name);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(static_cast<bool>(in));
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const fs::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

int bright_column_extent(const ImageTensor& img) {
    int lo = img.width;
    int hi = -1;
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            if (img.at(0, y, x) > 0.5) {
                lo = std::min(lo, x);
                hi = std::max(hi, x);
            }
        }
    }
    return hi >= lo ? hi - lo + 1 : 0;
}

}  // namespace

TEST_CASE("IDX pair round-trips at 1/255 quantization") {
    const LabeledDataset ds = data::gen_plus_minus(8, 3);
    const fs::path img_path = temp_file("rt-images.idx");
    const fs::path lbl_path = temp_file("rt-labels.idx");
    data::write_idx(img_path, lbl_path, ds);

    const LabeledDataset loaded = data::load_idx(img_path, lbl_path);
    REQUIRE(loaded.size() == ds.size());
    CHECK(loaded.labels == ds.labels);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        REQUIRE(loaded.images[i].height == 16);
        REQUIRE(loaded.images[i].width == 16);
        for (std::size_t p = 0; p < ds.images[i].values.size(); ++p) {
            const double v = std::clamp(ds.images[i].values[p], 0.0, 1.0);
            const double quantized = std::lround(v * 255.0) / 255.0;
            CHECK(loaded.images[i].values[p] == quantized);
        }
    }
    fs::remove(img_path);
    fs::remove(lbl_path);
}

TEST_CASE("load_idx rejects damaged pairs") {
    const LabeledDataset ds = data::gen_plus_minus(4, 1);
    const fs::path img_path = temp_file("bad-images.idx");
    const fs::path lbl_path = temp_file("bad-labels.idx");
    data::write_idx(img_path, lbl_path, ds);
    const std::string img_bytes = slurp(img_path);
    const std::string lbl_bytes = slurp(lbl_path);

    SUBCASE("missing files") {
        CHECK_THROWS_AS(data::load_idx(temp_file("nope.idx"), lbl_path), FormatError);
        CHECK_THROWS_AS(data::load_idx(img_path, temp_file("nope.idx")), FormatError);
    }
    SUBCASE("bad image magic") {
        std::string bytes = img_bytes;
        bytes[3] = 0x04;
        spit(img_path, bytes);
        CHECK_THROWS_AS(data::load_idx(img_path, lbl_path), FormatError);
    }
    SUBCASE("bad label magic") {
        std::string bytes = lbl_bytes;
        bytes[3] = 0x877 & 0xff;
        spit(lbl_path, bytes);
        CHECK_THROWS_AS(data::load_idx(img_path, lbl_path), FormatError);
    }
    SUBCASE("count mismatch") {
        std::string bytes = lbl_bytes;
        bytes[7] = static_cast<char>(bytes[7] + 1);
        spit(lbl_path, bytes);
        CHECK_THROWS_AS(data::load_idx(img_path, lbl_path), FormatError);
    }
    SUBCASE("truncated image payload") {
        spit(img_path, img_bytes.substr(0, img_bytes.size() - 10));
        CHECK_THROWS_AS(data::load_idx(img_path, lbl_path), FormatError);
    }
    SUBCASE("truncated label payload") {
        spit(lbl_path, lbl_bytes.substr(0, lbl_bytes.size() - 1));
        CHECK_THROWS_AS(data::load_idx(img_path, lbl_path), FormatError);
    }
    fs::remove(img_path);
    fs::remove(lbl_path);
}

TEST_CASE("write_idx input validation") {
    CHECK_THROWS_AS(
        data::write_idx(temp_file("e.idx"), temp_file("e2.idx"), LabeledDataset{}),
        UsageError);

    LabeledDataset mixed = data::gen_plus_minus(4, 1);
    mixed.images[2] = ImageTensor(8, 8, 1);
    CHECK_THROWS_AS(
        data::write_idx(temp_file("m.idx"), temp_file("m2.idx"), mixed), UsageError);
}

TEST_CASE("gen_plus_minus produces balanced seeded strokes") {
    const LabeledDataset ds = data::gen_plus_minus(12, 7);
    REQUIRE(ds.size() == 12);
    REQUIRE(ds.class_names.size() == 4);
    CHECK(ds.class_names[0] == "plus");
    CHECK(ds.class_names[1] == "minus");

    int counts[4] = {0, 0, 0, 0};
    for (std::size_t i = 0; i < ds.size(); ++i) {
        CHECK(ds.labels[i] == static_cast<int>(i % 4));
        ++counts[ds.labels[i]];
        CHECK(ds.images[i].height == 16);
        CHECK(ds.images[i].width == 16);
        for (double v : ds.images[i].values) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
    for (int c : counts) CHECK(c == 3);

    const LabeledDataset again = data::gen_plus_minus(12, 7);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        CHECK(ds.images[i].values == again.images[i].values);
    }
    const LabeledDataset other = data::gen_plus_minus(12, 8);
    CHECK(ds.images[0].values != other.images[0].values);

    CHECK_THROWS_AS(data::gen_plus_minus(3, 0), UsageError);
}

TEST_CASE("gen_synth_digits draws separable rings and strokes") {
    const LabeledDataset ds = data::gen_synth_digits(20, 11);
    REQUIRE(ds.size() == 20);
    double extent_ring = 0.0;
    double extent_bar = 0.0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        CHECK(ds.labels[i] == static_cast<int>(i % 2));
        CHECK(ds.images[i].height == 28);
        CHECK(ds.images[i].width == 28);
        for (double v : ds.images[i].values) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
        const int extent = bright_column_extent(ds.images[i]);
        CHECK(extent > 0);
        (ds.labels[i] == 0 ? extent_ring : extent_bar) += extent;
    }
    // Rings span most of the frame horizontally; bars are a few columns.
    CHECK(extent_ring / 10.0 > 2.0 * (extent_bar / 10.0));

    const LabeledDataset again = data::gen_synth_digits(20, 11);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        CHECK(ds.images[i].values == again.images[i].values);
    }

    CHECK_THROWS_AS(data::gen_synth_digits(1, 0), UsageError);
}

TEST_CASE("subset_binary keeps order and relabels to {0,1}") {
    LabeledDataset ds;
    ds.class_names = {"a", "b", "c"};
    ds.labels = {2, 0, 1, 2, 0, 2};
    for (int label : ds.labels) {
        ImageTensor img(2, 2, 1);
        img.at(0, 0, 0) = label;
        ds.images.push_back(img);
    }

    const LabeledDataset out = data::subset_binary(ds, 2, 0, 2);
    REQUIRE(out.size() == 4);
    CHECK(out.labels == std::vector<int>{0, 1, 0, 1});
    CHECK(out.images[0].at(0, 0, 0) == 2.0);
    CHECK(out.images[1].at(0, 0, 0) == 0.0);
    CHECK(out.images[2].at(0, 0, 0) == 2.0);
    CHECK(out.images[3].at(0, 0, 0) == 0.0);
    CHECK(out.class_names == std::vector<std::string>{"c", "a"});

    CHECK_THROWS_AS(data::subset_binary(ds, 1, 1, 1), UsageError);
    CHECK_THROWS_WITH_AS(data::subset_binary(ds, 2, 1, 2),
                         doctest::Contains("found"), UsageError);
}

TEST_CASE("downsample pools blocks and pads edges") {
    ImageTensor img(4, 4, 1);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x) img.at(0, y, x) = y * 4 + x;

    SUBCASE("factor 1 is identity") {
        CHECK(data::downsample(img, 1).values == img.values);
    }
    SUBCASE("factor 2 takes exact block means") {
        const ImageTensor out = data::downsample(img, 2);
        REQUIRE(out.height == 2);
        REQUIRE(out.width == 2);
        CHECK(out.at(0, 0, 0) == (0 + 1 + 4 + 5) / 4.0);
        CHECK(out.at(0, 0, 1) == (2 + 3 + 6 + 7) / 4.0);
        CHECK(out.at(0, 1, 0) == (8 + 9 + 12 + 13) / 4.0);
        CHECK(out.at(0, 1, 1) == (10 + 11 + 14 + 15) / 4.0);
    }
    SUBCASE("odd dimensions clamp to the edge") {
        ImageTensor odd(3, 3, 1);
        for (int y = 0; y < 3; ++y)
            for (int x = 0; x < 3; ++x) odd.at(0, y, x) = y * 3 + x;
        const ImageTensor out = data::downsample(odd, 2);
        REQUIRE(out.height == 2);
        REQUIRE(out.width == 2);
        CHECK(out.at(0, 0, 0) == (0 + 1 + 3 + 4) / 4.0);
        CHECK(out.at(0, 0, 1) == (2 + 2 + 5 + 5) / 4.0);
        CHECK(out.at(0, 1, 0) == (6 + 7 + 6 + 7) / 4.0);
        CHECK(out.at(0, 1, 1) == (8 + 8 + 8 + 8) / 4.0);
    }
    SUBCASE("channels are pooled independently") {
        ImageTensor two(2, 2, 2);
        for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y) {
                two.at(0, y, x) = 1.0;
                two.at(1, y, x) = 3.0;
            }
        const ImageTensor out = data::downsample(two, 2);
        CHECK(out.at(0, 0, 0) == 1.0);
        CHECK(out.at(1, 0, 0) == 3.0);
    }
    SUBCASE("invalid factor") {
        CHECK_THROWS_AS(data::downsample(img, 0), UsageError);
        CHECK_THROWS_AS(data::downsample(img, -2), UsageError);
    }
}

TEST_CASE("load_cifar reads 3073-byte records into luminance") {
    const fs::path path = temp_file("batch.bin");
    std::string bytes(2 * 3073, '\0');
    bytes[0] = 3;  // cat, all-red plane
    for (int p = 0; p < 1024; ++p) bytes[1 + p] = static_cast<char>(255);
    bytes[3073] = 5;  // dog, all-green plane
    for (int p = 0; p < 1024; ++p) bytes[3073 + 1 + 1024 + p] = static_cast<char>(255);
    spit(path, bytes);

    const LabeledDataset ds = data::load_cifar(path, 16);
    REQUIRE(ds.size() == 2);
    CHECK(ds.labels == std::vector<int>{3, 5});
    CHECK(ds.class_names[3] == "cat");
    for (const ImageTensor& img : ds.images) {
        CHECK(img.height == 16);
        CHECK(img.width == 16);
        CHECK(img.channels == 1);
    }
    for (double v : ds.images[0].values) CHECK(v == doctest::Approx(0.299).epsilon(1e-12));
    for (double v : ds.images[1].values) CHECK(v == doctest::Approx(0.587).epsilon(1e-12));

    SUBCASE("size must be a record multiple") {
        spit(path, bytes.substr(0, 3072));
        CHECK_THROWS_AS(data::load_cifar(path, 16), FormatError);
    }
    SUBCASE("labels above 9 are rejected") {
        std::string bad = bytes;
        bad[0] = 11;
        spit(path, bad);
        CHECK_THROWS_AS(data::load_cifar(path, 16), FormatError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(data::load_cifar(temp_file("missing.bin"), 16), FormatError);
    }
    fs::remove(path);
}
