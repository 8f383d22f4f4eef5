#include "isonorm/batch.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace isonorm {

namespace {

constexpr std::array<char, 8> kMagic = {'I', 'S', 'O', 'N', 'B', 'A', 'T', '1'};

void put_u64(std::ostream& os, std::uint64_t v)
{
    std::array<unsigned char, 8> buf;
    for (int i = 0; i < 8; ++i) buf[static_cast<size_t>(i)] = (v >> (8 * i)) & 0xff;
    os.write(reinterpret_cast<const char*>(buf.data()), 8);
}

std::uint64_t get_u64(std::istream& is)
{
    std::array<unsigned char, 8> buf;
    is.read(reinterpret_cast<char*>(buf.data()), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[static_cast<size_t>(i)]) << (8 * i);
    return v;
}

std::uint64_t double_bits(double d)
{
    std::uint64_t v;
    std::memcpy(&v, &d, sizeof(v));
    return v;
}

double bits_double(std::uint64_t v)
{
    double d;
    std::memcpy(&d, &v, sizeof(d));
    return d;
}

} // namespace

const char* to_string(SampleMethod m)
{
    switch (m) {
    case SampleMethod::direct: return "direct";
    case SampleMethod::rejection: return "rejection";
    case SampleMethod::hit_and_run: return "hit_and_run";
    }
    return "unknown";
}

void save_batch(const SampleBatch& batch, const std::string& path)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("save_batch: cannot open " + path);
    os.write(kMagic.data(), kMagic.size());
    put_u64(os, static_cast<std::uint64_t>(batch.dim()));
    put_u64(os, static_cast<std::uint64_t>(batch.count()));
    put_u64(os, static_cast<std::uint64_t>(batch.method));
    put_u64(os, batch.stream.seed);
    put_u64(os, batch.stream.stream_id);
    for (std::int64_t r = 0; r < batch.count(); ++r)
        for (int c = 0; c < batch.dim(); ++c) put_u64(os, double_bits(batch.points(r, c)));
    if (!os) throw std::runtime_error("save_batch: write failed for " + path);
    os.close();

    nlohmann::ordered_json meta;
    meta["format"] = "isonorm_batch";
    meta["version"] = 1;
    meta["dim"] = batch.dim();
    meta["count"] = batch.count();
    meta["method"] = to_string(batch.method);
    meta["burn_in"] = batch.burn_in;
    meta["thinning"] = batch.thinning;
    meta["seed"] = batch.stream.seed;
    meta["stream_id"] = batch.stream.stream_id;
    meta["source"] = batch.source;
    meta["acceptance_rate"] = batch.acceptance_rate;
    std::ofstream ms(path + ".meta.json");
    if (!ms) throw std::runtime_error("save_batch: cannot open sidecar for " + path);
    ms << meta.dump(2) << "\n";
}

SampleBatch load_batch(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_batch: cannot open " + path);
    std::array<char, 8> magic;
    is.read(magic.data(), magic.size());
    if (!is || magic != kMagic) throw std::runtime_error("load_batch: bad magic in " + path);

    SampleBatch batch;
    auto dim = get_u64(is);
    auto count = get_u64(is);
    auto method = get_u64(is);
    batch.stream.seed = get_u64(is);
    batch.stream.stream_id = get_u64(is);
    if (!is || dim == 0 || count == 0 || method > 2)
        throw std::runtime_error("load_batch: corrupt header in " + path);
    batch.method = static_cast<SampleMethod>(method);
    batch.points.resize(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(dim));
    for (std::int64_t r = 0; r < batch.points.rows(); ++r)
        for (int c = 0; c < batch.points.cols(); ++c) batch.points(r, c) = bits_double(get_u64(is));
    if (!is) throw std::runtime_error("load_batch: truncated payload in " + path);

    std::ifstream ms(path + ".meta.json");
    if (ms) {
        nlohmann::json meta = nlohmann::json::parse(ms, nullptr, true, true);
        batch.source = meta.value("source", std::string());
        batch.burn_in = meta.value("burn_in", std::int64_t{0});
        batch.thinning = meta.value("thinning", std::int64_t{0});
        batch.acceptance_rate = meta.value("acceptance_rate", 1.0);
    }
    return batch;
}

} // namespace isonorm
