#pragma once

#include <cstddef>
#include <numeric>
#include <utility>
#include <vector>

namespace mihkit::clustering {

/// Disjoint sets over 0..n-1 with path halving and union by size.
class UnionFind {
public:
    explicit UnionFind(std::size_t n = 0) { grow(n); }

    void grow(std::size_t n) {
        const std::size_t old = parent_.size();
        if (n <= old) return;
        parent_.resize(n);
        size_.resize(n, 1);
        std::iota(parent_.begin() + static_cast<std::ptrdiff_t>(old), parent_.end(), old);
    }

    std::size_t size() const noexcept { return parent_.size(); }

    std::size_t find(std::size_t x) noexcept {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    /// Returns false when a and b were already joined.
    bool unite(std::size_t a, std::size_t b) noexcept {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (size_[a] < size_[b]) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
        return true;
    }

private:
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> size_;
};

}  // namespace mihkit::clustering
