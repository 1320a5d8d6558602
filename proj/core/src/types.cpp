#include "crj/types.hpp"

#include <algorithm>
#include <string>

#include "crj/error.hpp"

namespace crj {

Trace::Trace(std::vector<double> times, std::vector<double> intensities, double length)
    : times_{std::move(times)}, intensities_{std::move(intensities)}, length_{length} {
  if (times_.size() != intensities_.size()) {
    throw Error{"trace: times and intensities differ in length"};
  }
  if (times_.size() < 2) {
    throw Error{"trace: at least two frames are required"};
  }
  if (!(times_.front() > 0.0)) {
    throw Error{"trace: first frame midpoint must be positive"};
  }
  for (std::size_t i = 1; i < times_.size(); ++i) {
    if (!(times_[i] > times_[i - 1])) {
      throw Error{"trace: times must be strictly increasing (frame " + std::to_string(i) + ")"};
    }
  }
  if (!(length_ >= times_.back())) {
    throw Error{"trace: length must not precede the final frame"};
  }
  for (auto y : intensities_) {
    if (!std::isfinite(y)) {
      throw Error{"trace: non-finite intensity"};
    }
  }
}

auto Trace::uniform(std::vector<double> intensities, double bin_width) -> Trace {
  auto times = std::vector<double>(intensities.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    times[i] = (static_cast<double>(i) + 0.5) * bin_width;
  }
  auto length = static_cast<double>(intensities.size()) * bin_width;
  return Trace{std::move(times), std::move(intensities), length};
}

auto Trace::frame_interval() const -> double {
  auto diffs = std::vector<double>(times_.size() - 1);
  for (std::size_t i = 1; i < times_.size(); ++i) {
    diffs[i - 1] = times_[i] - times_[i - 1];
  }
  auto mid = diffs.begin() + static_cast<std::ptrdiff_t>(diffs.size() / 2);
  std::nth_element(diffs.begin(), mid, diffs.end());
  return *mid;
}

auto Trace::first_frame_at_or_after(double t) const -> std::size_t {
  return static_cast<std::size_t>(std::lower_bound(times_.begin(), times_.end(), t) - times_.begin());
}

}  // namespace crj
