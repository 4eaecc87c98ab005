#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace revmask {

// Dense row-major frames x channels matrix.
class Grid {
 public:
  Grid() = default;
  Grid(std::size_t frames, std::size_t channels, double fill = 0.0)
      : frames_(frames), channels_(channels), data_(frames * channels, fill) {}

  std::size_t frames() const noexcept { return frames_; }
  std::size_t channels() const noexcept { return channels_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t frame, std::size_t channel) {
    return data_[frame * channels_ + channel];
  }
  double operator()(std::size_t frame, std::size_t channel) const {
    return data_[frame * channels_ + channel];
  }

  std::span<double> row(std::size_t frame) {
    return {data_.data() + frame * channels_, channels_};
  }
  std::span<const double> row(std::size_t frame) const {
    return {data_.data() + frame * channels_, channels_};
  }

  std::span<double> flat() noexcept { return data_; }
  std::span<const double> flat() const noexcept { return data_; }

  bool same_shape(const Grid& other) const noexcept {
    return frames_ == other.frames_ && channels_ == other.channels_;
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t frames_ = 0;
  std::size_t channels_ = 0;
  std::vector<double> data_;
};

}  // namespace revmask
