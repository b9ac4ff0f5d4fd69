#include "xppn/tour.hpp"

#include <algorithm>
#include <stdexcept>

namespace xppn {

Tour::Tour(std::vector<int> order) : order_(std::move(order)) {
    const int n = static_cast<int>(order_.size());
    if (n == 0) return;
    std::vector<char> seen(n, 0);
    for (int v : order_) {
        if (v < 0 || v >= n || seen[v]) throw std::invalid_argument("tour is not a permutation");
        seen[v] = 1;
    }
    auto smallest = std::min_element(order_.begin(), order_.end());
    std::rotate(order_.begin(), smallest, order_.end());
    if (n >= 3 && order_[1] > order_[n - 1])
        std::reverse(order_.begin() + 1, order_.end());
}

std::vector<std::pair<int, int>> Tour::edges() const {
    std::vector<std::pair<int, int>> out;
    const int n = size();
    if (n <= 1) return out;
    out.reserve(n);
    for (int k = 0; k < n; ++k) out.emplace_back(order_[k], order_[(k + 1) % n]);
    return out;
}

Tour Tour::identity(int n) {
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    return Tour(std::move(order));
}

} // namespace xppn
