#include "risopt/nn/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <vector>

#include "risopt/errors.hpp"

namespace risopt::nn {

namespace {

constexpr char kMagic[8] = {'R', 'I', 'S', 'C', 'K', 'P', 'T', '1'};

template <typename T>
void write_pod(std::ofstream& out, T value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in, const std::string& path) {
    T value;
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) {
        throw IoError("truncated checkpoint file: " + path);
    }
    return value;
}

}  // namespace

void save_tensors(const std::string& path, const TensorMap& tensors) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot open checkpoint file for writing: " + tmp);
        }
        out.write(kMagic, sizeof(kMagic));
        write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(tensors.size()));
        for (const auto& [name, tensor] : tensors) {
            write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
            out.write(name.data(), static_cast<std::streamsize>(name.size()));
            write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(tensor.rows()));
            write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(tensor.cols()));
            for (Eigen::Index r = 0; r < tensor.rows(); ++r) {
                for (Eigen::Index c = 0; c < tensor.cols(); ++c) {
                    write_pod<double>(out, tensor(r, c));
                }
            }
        }
        out.flush();
        if (!out) {
            throw IoError("failed to write checkpoint file: " + tmp);
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        throw IoError("cannot move " + tmp + " to " + path + ": " + ec.message());
    }
}

TensorMap load_tensors(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open checkpoint file: " + path);
    }
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw IoError("not a checkpoint file: " + path);
    }
    const auto count = read_pod<std::uint32_t>(in, path);
    TensorMap tensors;
    for (std::uint32_t t = 0; t < count; ++t) {
        const auto name_len = read_pod<std::uint32_t>(in, path);
        std::string name(name_len, '\0');
        in.read(name.data(), name_len);
        if (!in) {
            throw IoError("truncated checkpoint file: " + path);
        }
        const auto rows = read_pod<std::uint64_t>(in, path);
        const auto cols = read_pod<std::uint64_t>(in, path);
        if (rows > (1ULL << 32) || cols > (1ULL << 32)) {
            throw IoError("corrupt tensor header in checkpoint file: " + path);
        }
        Eigen::MatrixXd tensor(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        for (Eigen::Index r = 0; r < tensor.rows(); ++r) {
            for (Eigen::Index c = 0; c < tensor.cols(); ++c) {
                tensor(r, c) = read_pod<double>(in, path);
            }
        }
        if (!tensors.emplace(std::move(name), std::move(tensor)).second) {
            throw IoError("duplicate tensor name in checkpoint file: " + path);
        }
    }
    return tensors;
}

}  // namespace risopt::nn
