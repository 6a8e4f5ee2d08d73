#include "msg/tensor_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

namespace msg {

namespace {

constexpr std::uint8_t kTensorVersion = 1;
constexpr std::uint8_t kArchiveVersion = 1;
constexpr std::size_t kMaxRank = 8;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xFF));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i)
        out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

class Reader {
public:
    Reader(const std::uint8_t* bytes, std::size_t len) : p_(bytes), end_(bytes + len) {}

    std::size_t remaining() const { return static_cast<std::size_t>(end_ - p_); }

    const std::uint8_t* take(std::size_t n, const char* what) {
        if (remaining() < n)
            throw ParseError(std::string("truncated input while reading ") + what);
        const std::uint8_t* q = p_;
        p_ += n;
        return q;
    }

    std::uint8_t u8(const char* what) { return *take(1, what); }

    std::uint32_t u32(const char* what) {
        const std::uint8_t* q = take(4, what);
        return static_cast<std::uint32_t>(q[0]) | (static_cast<std::uint32_t>(q[1]) << 8) |
               (static_cast<std::uint32_t>(q[2]) << 16) |
               (static_cast<std::uint32_t>(q[3]) << 24);
    }

    std::uint64_t u64(const char* what) {
        std::uint64_t v = 0;
        const std::uint8_t* q = take(8, what);
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(q[i]) << (8 * i);
        return v;
    }

private:
    const std::uint8_t* p_;
    const std::uint8_t* end_;
};

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return bytes;
}

void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("short write to " + path.string());
}

static_assert(sizeof(float) == 4 && std::numeric_limits<float>::is_iec559,
              "payload format assumes 32-bit IEEE-754 floats");

}  // namespace

TensorBlob to_blob(const VideoLatent& v) {
    TensorBlob b;
    b.dims = {static_cast<std::uint32_t>(v.frames()), static_cast<std::uint32_t>(v.height()),
              static_cast<std::uint32_t>(v.width()), static_cast<std::uint32_t>(v.channels())};
    b.data = v.values();
    return b;
}

VideoLatent to_latent(const TensorBlob& b) {
    if (b.dims.size() != 4)
        throw ParseError("tensor has rank " + std::to_string(b.dims.size()) +
                         ", expected rank 4 for a clip");
    LatentShape shape{static_cast<int>(b.dims[0]), static_cast<int>(b.dims[1]),
                      static_cast<int>(b.dims[2]), static_cast<int>(b.dims[3])};
    VideoLatent v(shape);
    v.values() = b.data;
    return v;
}

std::vector<std::uint8_t> encode_tensor(const TensorBlob& t) {
    if (t.dims.empty() || t.dims.size() > kMaxRank)
        throw std::invalid_argument("encode_tensor: rank must be in [1, 8]");
    if (t.size() != t.data.size())
        throw std::invalid_argument("encode_tensor: dims do not match payload length");
    std::vector<std::uint8_t> out;
    out.reserve(6 + 4 * t.dims.size() + 4 * t.data.size());
    out.insert(out.end(), {'M', 'S', 'G', 'T'});
    out.push_back(kTensorVersion);
    out.push_back(static_cast<std::uint8_t>(t.dims.size()));
    for (auto d : t.dims) put_u32(out, d);
    std::size_t off = out.size();
    out.resize(off + 4 * t.data.size());
    std::memcpy(out.data() + off, t.data.data(), 4 * t.data.size());
    return out;
}

TensorBlob decode_tensor(const std::uint8_t* bytes, std::size_t len) {
    Reader r(bytes, len);
    const std::uint8_t* magic = r.take(4, "magic");
    if (std::memcmp(magic, "MSGT", 4) != 0) throw ParseError("bad magic, expected MSGT");
    std::uint8_t version = r.u8("version");
    if (version != kTensorVersion)
        throw ParseError("unsupported tensor version " + std::to_string(version));
    std::uint8_t rank = r.u8("rank");
    if (rank == 0 || rank > kMaxRank)
        throw ParseError("rank " + std::to_string(rank) + " out of [1, 8]");
    TensorBlob t;
    std::size_t n = 1;
    for (int i = 0; i < rank; ++i) {
        std::uint32_t d = r.u32("dims");
        if (d == 0) throw ParseError("zero dimension in header");
        t.dims.push_back(d);
        n *= d;
    }
    if (r.remaining() != 4 * n)
        throw ParseError("payload length " + std::to_string(r.remaining()) +
                         " does not match header (" + std::to_string(4 * n) + " bytes)");
    t.data.resize(n);
    std::memcpy(t.data.data(), r.take(4 * n, "payload"), 4 * n);
    return t;
}

void save_tensor(const std::filesystem::path& path, const TensorBlob& t) {
    write_file(path, encode_tensor(t));
}

void save_tensor(const std::filesystem::path& path, const VideoLatent& v) {
    save_tensor(path, to_blob(v));
}

TensorBlob load_tensor_blob(const std::filesystem::path& path) {
    auto bytes = read_file(path);
    try {
        return decode_tensor(bytes.data(), bytes.size());
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

VideoLatent load_tensor(const std::filesystem::path& path) {
    return to_latent(load_tensor_blob(path));
}

const TensorBlob* TensorArchive::find(const std::string& name) const {
    for (const auto& [n, t] : entries)
        if (n == name) return &t;
    return nullptr;
}

void save_archive(const std::filesystem::path& path, const TensorArchive& a) {
    std::vector<std::uint8_t> out;
    out.insert(out.end(), {'M', 'S', 'G', 'A'});
    out.push_back(kArchiveVersion);
    put_u32(out, static_cast<std::uint32_t>(a.entries.size()));
    for (const auto& [name, tensor] : a.entries) {
        put_u32(out, static_cast<std::uint32_t>(name.size()));
        out.insert(out.end(), name.begin(), name.end());
        auto blob = encode_tensor(tensor);
        put_u64(out, blob.size());
        out.insert(out.end(), blob.begin(), blob.end());
    }
    put_u32(out, static_cast<std::uint32_t>(a.meta.size()));
    out.insert(out.end(), a.meta.begin(), a.meta.end());
    write_file(path, out);
}

TensorArchive load_archive(const std::filesystem::path& path) {
    auto bytes = read_file(path);
    Reader r(bytes.data(), bytes.size());
    const std::uint8_t* magic = r.take(4, "magic");
    if (std::memcmp(magic, "MSGA", 4) != 0)
        throw ParseError(path.string() + ": bad magic, expected MSGA");
    std::uint8_t version = r.u8("version");
    if (version != kArchiveVersion)
        throw ParseError(path.string() + ": unsupported archive version " +
                         std::to_string(version));
    TensorArchive a;
    std::uint32_t count = r.u32("entry count");
    for (std::uint32_t i = 0; i < count; ++i) {
        std::uint32_t name_len = r.u32("name length");
        const std::uint8_t* name_bytes = r.take(name_len, "entry name");
        std::string name(reinterpret_cast<const char*>(name_bytes), name_len);
        std::uint64_t blob_len = r.u64("entry length");
        const std::uint8_t* blob = r.take(blob_len, "entry payload");
        a.entries.emplace_back(std::move(name), decode_tensor(blob, blob_len));
    }
    std::uint32_t meta_len = r.u32("meta length");
    const std::uint8_t* meta = r.take(meta_len, "meta");
    a.meta.assign(reinterpret_cast<const char*>(meta), meta_len);
    return a;
}

void export_frames(const std::filesystem::path& path_prefix, const VideoLatent& v) {
    if (v.channels() != 1)
        throw std::invalid_argument("export_frames: requires channels == 1");
    float lo = v.data()[0], hi = v.data()[0];
    for (std::size_t i = 1; i < v.size(); ++i) {
        lo = std::min(lo, v.data()[i]);
        hi = std::max(hi, v.data()[i]);
    }
    const bool constant = !(hi > lo);
    const double scale = constant ? 0.0 : 255.0 / (static_cast<double>(hi) - lo);
    const std::size_t per_frame = static_cast<std::size_t>(v.height()) * v.width();
    for (int f = 0; f < v.frames(); ++f) {
        char suffix[16];
        std::snprintf(suffix, sizeof(suffix), "_%04d.pgm", f);
        std::filesystem::path path = path_prefix;
        path += suffix;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
        out << "P5\n" << v.width() << " " << v.height() << "\n255\n";
        std::vector<std::uint8_t> row(per_frame);
        for (int r = 0; r < v.height(); ++r) {
            for (int c = 0; c < v.width(); ++c) {
                double g = constant ? 128.0
                                    : (static_cast<double>(v.at(f, r, c)) - lo) * scale;
                g = std::clamp(g, 0.0, 255.0);
                row[static_cast<std::size_t>(r) * v.width() + c] =
                    static_cast<std::uint8_t>(std::lround(g));
            }
        }
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(row.size()));
        if (!out) throw std::runtime_error("short write to " + path.string());
    }
}

}  // namespace msg
