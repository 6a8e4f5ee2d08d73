#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "msg/latent.hpp"
#include "msg/rng.hpp"
#include "msg/tensor_io.hpp"

using msg::LatentShape;
using msg::SeededRng;
using msg::VideoLatent;

namespace {

std::filesystem::path temp_dir() {
    auto dir = std::filesystem::temp_directory_path() / "msg_io_tests";
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("gaussian_like determinism and seed separation") {
    LatentShape shape{2, 4, 4, 1};
    SeededRng a(7), b(7), c(8);
    VideoLatent va = msg::gaussian_like(a, shape);
    VideoLatent vb = msg::gaussian_like(b, shape);
    VideoLatent vc = msg::gaussian_like(c, shape);
    CHECK(va.values() == vb.values());
    CHECK(va.values() != vc.values());
}

TEST_CASE("gaussian_like sample moments at 1e5 draws") {
    SeededRng rng(1234);
    LatentShape shape{10, 100, 100, 1};  // 1e5 values
    VideoLatent v = msg::gaussian_like(rng, shape);
    double mean = 0.0;
    for (float x : v.values()) mean += x;
    mean /= v.size();
    double var = 0.0;
    for (float x : v.values()) var += (x - mean) * (x - mean);
    var /= v.size();
    CHECK(std::abs(mean) < 0.02);
    CHECK(var > 0.98);
    CHECK(var < 1.02);
}

TEST_CASE("zero-sized shapes are rejected") {
    SeededRng rng(1);
    CHECK_THROWS_AS(msg::gaussian_like(rng, LatentShape{0, 4, 4, 1}), std::invalid_argument);
    CHECK_THROWS_AS(VideoLatent(LatentShape{1, 0, 1, 1}), std::invalid_argument);
}

TEST_CASE("arithmetic helper identities") {
    SeededRng rng(99);
    LatentShape shape{3, 5, 4, 2};
    VideoLatent a = msg::gaussian_like(rng, shape);
    VideoLatent b = msg::gaussian_like(rng, shape);

    CHECK(msg::dot(a, a) == doctest::Approx(msg::l2_norm(a) * msg::l2_norm(a)));
    VideoLatent zero = msg::scale(a, 0.0f);
    for (float v : zero.values()) CHECK(v == 0.0f);
    VideoLatent sum = msg::add(a, b);
    VideoLatent diff = msg::sub(sum, b);
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(diff.data()[i] == doctest::Approx(a.data()[i]).epsilon(1e-6));
    VideoLatent via_axpy = msg::axpy(a, 2.5f, b);
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(via_axpy.data()[i] == a.data()[i] + 2.5f * b.data()[i]);
}

TEST_CASE("tensor save/load round-trip is bit exact") {
    auto path = temp_dir() / "roundtrip.msgt";
    SeededRng rng(5);
    VideoLatent v = msg::gaussian_like(rng, LatentShape{4, 8, 8, 1});
    msg::save_tensor(path, v);
    VideoLatent loaded = msg::load_tensor(path);
    CHECK(loaded.shape() == v.shape());
    CHECK(std::memcmp(loaded.data(), v.data(), v.size() * sizeof(float)) == 0);
}

TEST_CASE("truncated tensor file raises a parse error") {
    auto path = temp_dir() / "truncated.msgt";
    SeededRng rng(5);
    VideoLatent v = msg::gaussian_like(rng, LatentShape{4, 8, 8, 1});
    msg::save_tensor(path, v);
    auto size = std::filesystem::file_size(path);
    std::filesystem::resize_file(path, size / 2);
    CHECK_THROWS_AS(msg::load_tensor(path), msg::ParseError);
}

TEST_CASE("header/payload mismatch raises a parse error") {
    auto path = temp_dir() / "mismatch.msgt";
    SeededRng rng(5);
    VideoLatent v = msg::gaussian_like(rng, LatentShape{2, 4, 4, 1});
    auto bytes = msg::encode_tensor(msg::to_blob(v));
    bytes.push_back(0);  // one stray byte
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()), bytes.size());
    out.close();
    CHECK_THROWS_AS(msg::load_tensor(path), msg::ParseError);
}

TEST_CASE("bad magic raises a parse error") {
    auto path = temp_dir() / "magic.msgt";
    std::ofstream out(path, std::ios::binary);
    out << "NOPE1234567890";
    out.close();
    CHECK_THROWS_AS(msg::load_tensor(path), msg::ParseError);
}

TEST_CASE("archive round-trip preserves order, payloads, and meta") {
    auto path = temp_dir() / "bundle.msga";
    SeededRng rng(17);
    msg::TensorArchive archive;
    archive.entries.emplace_back("z_35", msg::to_blob(msg::gaussian_like(rng, {2, 4, 4, 1})));
    archive.entries.emplace_back("s_35", msg::to_blob(msg::gaussian_like(rng, {2, 4, 4, 1})));
    msg::TensorBlob bias;
    bias.dims = {3};
    bias.data = {1.0f, -2.0f, 0.5f};
    archive.entries.emplace_back("bias", bias);
    archive.meta = "{\"steps\":[35]}";
    msg::save_archive(path, archive);

    msg::TensorArchive loaded = msg::load_archive(path);
    REQUIRE(loaded.entries.size() == 3);
    CHECK(loaded.entries[0].first == "z_35");
    CHECK(loaded.entries[1].first == "s_35");
    CHECK(loaded.entries[2].first == "bias");
    CHECK(loaded.entries[0].second.data == archive.entries[0].second.data);
    CHECK(loaded.entries[2].second.dims == std::vector<std::uint32_t>{3});
    CHECK(loaded.meta == archive.meta);
    CHECK(loaded.find("s_35") != nullptr);
    CHECK(loaded.find("missing") == nullptr);
}

TEST_CASE("pgm export maps the clip range to [0, 255]") {
    auto dir = temp_dir();
    VideoLatent v(LatentShape{2, 3, 4, 1}, 0.0f);
    v.at(0, 0, 0) = -1.0f;  // global min -> 0
    v.at(1, 2, 3) = 3.0f;   // global max -> 255
    msg::export_frames(dir / "clip", v);

    auto read_pgm = [](const std::filesystem::path& p) {
        std::ifstream in(p, std::ios::binary);
        REQUIRE(in.good());
        std::string magic;
        int w, h, maxval;
        in >> magic >> w >> h >> maxval;
        REQUIRE(magic == "P5");
        REQUIRE(maxval == 255);
        in.get();
        std::vector<unsigned char> pixels(static_cast<std::size_t>(w) * h);
        in.read(reinterpret_cast<char*>(pixels.data()), pixels.size());
        return pixels;
    };
    auto frame0 = read_pgm(dir / "clip_0000.pgm");
    auto frame1 = read_pgm(dir / "clip_0001.pgm");
    CHECK(frame0[0] == 0);
    // zero maps to (0 - (-1)) / 4 * 255 = 63.75 -> 64
    CHECK(frame0[1] == 64);
    CHECK(frame1[11] == 255);

    // constant clip -> mid gray
    VideoLatent flat(LatentShape{1, 2, 2, 1}, 2.5f);
    msg::export_frames(dir / "flat", flat);
    auto gray = read_pgm(dir / "flat_0000.pgm");
    for (auto px : gray) CHECK(px == 128);

    VideoLatent two_channel(LatentShape{1, 2, 2, 2}, 0.0f);
    CHECK_THROWS_AS(msg::export_frames(dir / "bad", two_channel), std::invalid_argument);
}

TEST_CASE("derive_seed separates task streams") {
    CHECK(msg::derive_seed(42, 0) != msg::derive_seed(42, 1));
    CHECK(msg::derive_seed(42, 0) != msg::derive_seed(43, 0));
    SeededRng parent(42);
    SeededRng child0 = parent.child(0);
    SeededRng child1 = parent.child(1);
    CHECK(child0.seed() != child1.seed());
}
