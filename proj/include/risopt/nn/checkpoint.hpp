#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>

namespace risopt::nn {

using TensorMap = std::map<std::string, Eigen::MatrixXd>;

// Binary container for named double tensors. Layout, little endian:
//   8-byte magic "RISCKPT1", u32 tensor count, then per tensor
//   u32 name length, name bytes, u64 rows, u64 cols, rows*cols doubles
//   in row-major order. Entries are written in name order.
void save_tensors(const std::string& path, const TensorMap& tensors);

TensorMap load_tensors(const std::string& path);

}  // namespace risopt::nn
