#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace cvconv {

// Element role of a quantized tensor. Activations are unsigned 8-bit
// (post-ReLU data), weights signed 8-bit, accumulators signed 32-bit.
enum class Role { Activation, Weight, Accumulator };

struct RoleRange {
  int32_t lo;
  int32_t hi;
};

constexpr RoleRange role_range(Role r) {
  switch (r) {
    case Role::Activation:  return {0, 255};
    case Role::Weight:      return {-128, 127};
    case Role::Accumulator: return {INT32_MIN, INT32_MAX};
  }
  return {0, 0};
}

const char* role_name(Role r);

// Shaped integer tensor, NHWC order for 4-D data. Flat storage is int32
// regardless of role; the role pins the legal value range.
class QTensor {
 public:
  QTensor() : role_(Role::Activation) {}
  QTensor(std::vector<int> shape, std::vector<int32_t> data, Role role);

  static QTensor zeros(std::vector<int> shape, Role role);

  const std::vector<int>& shape() const { return shape_; }
  const std::vector<int32_t>& data() const { return data_; }
  std::vector<int32_t>& data() { return data_; }
  Role role() const { return role_; }

  int64_t size() const { return int64_t(data_.size()); }
  int dim(int i) const { return shape_.at(size_t(i)); }
  int rank() const { return int(shape_.size()); }

  int32_t at(int64_t flat) const { return data_[size_t(flat)]; }
  int32_t& at(int64_t flat) { return data_[size_t(flat)]; }

  // Throws std::out_of_range naming the first offending index if any element
  // falls outside the role's range.
  void validate() const;

  static int64_t shape_elems(const std::vector<int>& shape);

 private:
  std::vector<int> shape_;
  std::vector<int32_t> data_;
  Role role_;
};

}  // namespace cvconv
