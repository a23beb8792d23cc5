#pragma once

#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace autocrop {

// Dense row-major n-d array of doubles, with an optional gradient buffer of
// the same shape. The carrier for all network computation.
class Tensor {
public:
    Tensor() = default;

    explicit Tensor(std::vector<std::size_t> shape, double fill = 0.0)
        : shape_(std::move(shape)), data_(numel_of(shape_), fill) {}

    Tensor(std::vector<std::size_t> shape, std::vector<double> data)
        : shape_(std::move(shape)), data_(std::move(data)) {
        if (data_.size() != numel_of(shape_)) {
            throw std::invalid_argument("Tensor: data length " + std::to_string(data_.size()) +
                                        " does not match shape (numel " +
                                        std::to_string(numel_of(shape_)) + ")");
        }
    }

    static std::size_t numel_of(const std::vector<std::size_t>& shape) {
        std::size_t n = 1;
        for (std::size_t e : shape) {
            if (e == 0) throw std::invalid_argument("Tensor: zero extent in shape");
            n *= e;
        }
        return n;
    }

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t extent(std::size_t axis) const { return shape_.at(axis); }
    std::size_t numel() const { return data_.size(); }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::vector<double>& values() { return data_; }
    const std::vector<double>& values() const { return data_; }

    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    bool has_grad() const { return !grad_.empty(); }
    std::vector<double>& grad() {
        if (grad_.empty()) grad_.assign(data_.size(), 0.0);
        return grad_;
    }
    const std::vector<double>& grad() const { return grad_; }
    void zero_grad() {
        if (!grad_.empty()) grad_.assign(data_.size(), 0.0);
    }
    void drop_grad() { grad_.clear(); }

    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

    std::string shape_str() const {
        std::string s = "[";
        for (std::size_t i = 0; i < shape_.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(shape_[i]);
        }
        return s + "]";
    }

private:
    std::vector<std::size_t> shape_;
    std::vector<double> data_;
    std::vector<double> grad_;  // empty until requested
};

void check_finite(const Tensor& t, const std::string& context);

}  // namespace autocrop
