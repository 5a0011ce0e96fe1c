// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace remat {

/// Dense (t, m) table with t in [0, t_max] and m in [0, m_max].
///
/// Storage is m-major so that a DP sweep over t for fixed m is contiguous.
template <class T>
class Grid {
public:
    Grid() = default;
    Grid(int t_max, int m_max, T fill = T{})
        : t_max_(t_max), m_max_(m_max),
          data_(static_cast<std::size_t>(t_max + 1) * static_cast<std::size_t>(m_max + 1), fill) {}

    int t_max() const noexcept { return t_max_; }
    int m_max() const noexcept { return m_max_; }
    bool empty() const noexcept { return data_.empty(); }

    bool contains(int t, int m) const noexcept {
        return t >= 0 && t <= t_max_ && m >= 0 && m <= m_max_;
    }

    T& operator()(int t, int m) { return data_[index(t, m)]; }
    const T& operator()(int t, int m) const { return data_[index(t, m)]; }

    T& at(int t, int m) {
        if (!contains(t, m)) throw std::out_of_range("Grid index out of range");
        return (*this)(t, m);
    }
    const T& at(int t, int m) const {
        if (!contains(t, m)) throw std::out_of_range("Grid index out of range");
        return (*this)(t, m);
    }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    std::size_t index(int t, int m) const noexcept {
        return static_cast<std::size_t>(m) * static_cast<std::size_t>(t_max_ + 1) +
               static_cast<std::size_t>(t);
    }

    int t_max_ = -1;
    int m_max_ = -1;
    std::vector<T> data_;
};

}  // namespace remat
