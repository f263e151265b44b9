#include "cvconv/qtensor.hpp"

namespace cvconv {

const char* role_name(Role r) {
  switch (r) {
    case Role::Activation:  return "activation";
    case Role::Weight:      return "weight";
    case Role::Accumulator: return "accumulator";
  }
  return "?";
}

int64_t QTensor::shape_elems(const std::vector<int>& shape) {
  int64_t n = 1;
  for (int d : shape) {
    if (d <= 0) throw std::invalid_argument("qtensor: non-positive shape dimension");
    n *= d;
  }
  return n;
}

QTensor::QTensor(std::vector<int> shape, std::vector<int32_t> data, Role role)
    : shape_(std::move(shape)), data_(std::move(data)), role_(role) {
  if (shape_elems(shape_) != int64_t(data_.size())) {
    throw std::invalid_argument("qtensor: shape product " +
                                std::to_string(shape_elems(shape_)) +
                                " does not match element count " +
                                std::to_string(data_.size()));
  }
  validate();
}

QTensor QTensor::zeros(std::vector<int> shape, Role role) {
  int64_t n = shape_elems(shape);
  QTensor t;
  t.shape_ = std::move(shape);
  t.data_.assign(size_t(n), 0);
  t.role_ = role;
  return t;
}

void QTensor::validate() const {
  const RoleRange r = role_range(role_);
  for (size_t i = 0; i < data_.size(); ++i) {
    if (data_[i] < r.lo || data_[i] > r.hi) {
      throw std::out_of_range("qtensor: element [" + std::to_string(i) + "] = " +
                              std::to_string(data_[i]) + " outside " +
                              role_name(role_) + " range [" + std::to_string(r.lo) +
                              "," + std::to_string(r.hi) + "]");
    }
  }
}

}  // namespace cvconv
