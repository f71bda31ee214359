/*
Copyright 2026 The Howl Lab Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS-IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#ifndef HOWL_DSP_DELAY_LINE_HPP_
#define HOWL_DSP_DELAY_LINE_HPP_

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

namespace howl {

// Integer-sample delay: out[n] = in[n - delay], zero before stream start.
class DelayLine {
 public:
  explicit DelayLine(std::size_t delay) : buffer_(delay, 0.0) {}

  std::size_t delay() const { return buffer_.size(); }

  // |in| and |out| may alias.
  void Process(std::span<const double> in, std::span<double> out) {
    if (buffer_.empty()) {
      for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i];
      return;
    }
    for (std::size_t i = 0; i < in.size(); ++i) {
      const double v = in[i];
      out[i] = buffer_[pos_];
      buffer_[pos_] = v;
      if (++pos_ == buffer_.size()) pos_ = 0;
    }
  }

  void Reset() {
    std::fill(buffer_.begin(), buffer_.end(), 0.0);
    pos_ = 0;
  }

 private:
  std::vector<double> buffer_;
  std::size_t pos_ = 0;
};

}  // namespace howl

#endif  // HOWL_DSP_DELAY_LINE_HPP_
