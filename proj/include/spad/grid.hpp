#ifndef SPAD_GRID_HPP_
#define SPAD_GRID_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace spad {

// Row-major 2-D container shared by images, flux maps and event collections.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(std::size_t height, std::size_t width, const T& fill = T{})
      : height_(height), width_(width), values_(height * width, fill) {}
  Grid(std::size_t height, std::size_t width, std::vector<T> values)
      : height_(height), width_(width), values_(std::move(values)) {
    if (values_.size() != height_ * width_) {
      throw std::invalid_argument("grid payload has " +
                                  std::to_string(values_.size()) +
                                  " entries, expected " +
                                  std::to_string(height_ * width_));
    }
  }

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  T& operator()(std::size_t row, std::size_t col) {
    return values_[row * width_ + col];
  }
  const T& operator()(std::size_t row, std::size_t col) const {
    return values_[row * width_ + col];
  }
  T& operator[](std::size_t i) { return values_[i]; }
  const T& operator[](std::size_t i) const { return values_[i]; }

  std::vector<T>& values() { return values_; }
  const std::vector<T>& values() const { return values_; }

  auto begin() { return values_.begin(); }
  auto end() { return values_.end(); }
  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

  template <typename U>
  bool same_shape(const Grid<U>& other) const {
    return height_ == other.height() && width_ == other.width();
  }

  bool operator==(const Grid&) const = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<T> values_;
};

// Normalized-domain image (grayscale in [0,1] on input, [-1,1] inside the
// reconstruction loop).
using Image = Grid<double>;

template <typename A, typename B>
void require_same_shape(const Grid<A>& a, const Grid<B>& b, const char* what) {
  if (!a.same_shape(b)) {
    throw std::invalid_argument(std::string(what) + ": shape mismatch (" +
                                std::to_string(a.height()) + "x" +
                                std::to_string(a.width()) + " vs " +
                                std::to_string(b.height()) + "x" +
                                std::to_string(b.width()) + ")");
  }
}

}  // namespace spad

#endif  // SPAD_GRID_HPP_
