#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "msg/latent.hpp"

namespace msg {

// Raised on malformed .msgt / archive bytes. IO failures (missing file,
// short write) use std::runtime_error.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Rank-agnostic tensor used by the file formats; VideoLatent is the rank-4
// view of it.
struct TensorBlob {
    std::vector<std::uint32_t> dims;
    std::vector<float> data;

    std::size_t size() const {
        std::size_t n = 1;
        for (auto d : dims) n *= d;
        return dims.empty() ? 0 : n;
    }
};

TensorBlob to_blob(const VideoLatent& v);
VideoLatent to_latent(const TensorBlob& b);

// .msgt: magic "MSGT", version u8=1, rank u8, dims u32 LE, payload f32 LE.
void save_tensor(const std::filesystem::path& path, const TensorBlob& t);
void save_tensor(const std::filesystem::path& path, const VideoLatent& v);
TensorBlob load_tensor_blob(const std::filesystem::path& path);
VideoLatent load_tensor(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_tensor(const TensorBlob& t);
TensorBlob decode_tensor(const std::uint8_t* bytes, std::size_t len);

// Archive of ordered named tensors plus a JSON manifest string:
// magic "MSGA", version u8=1, u32 entry count, entries as
// (u32 name_len, name, u64 blob_len, .msgt blob), then u32 meta_len, meta.
struct TensorArchive {
    std::vector<std::pair<std::string, TensorBlob>> entries;
    std::string meta;  // JSON text, format owned by the caller

    const TensorBlob* find(const std::string& name) const;
};

void save_archive(const std::filesystem::path& path, const TensorArchive& a);
TensorArchive load_archive(const std::filesystem::path& path);

// One 8-bit grayscale PGM (P5) per frame, named <prefix>_0000.pgm etc.
// Values are mapped affinely from the clip's [min, max] onto [0, 255];
// constant clips map to 128. Requires channels == 1.
void export_frames(const std::filesystem::path& path_prefix, const VideoLatent& v);

}  // namespace msg
