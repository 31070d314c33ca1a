#include "mammo/labeling.hpp"

#include <vector>

namespace mammo {

ComponentLabels connected_components(const Mask& mask) {
    const int rows = static_cast<int>(mask.rows());
    const int cols = static_cast<int>(mask.cols());
    ComponentLabels out;
    out.labels = LabelArray::Zero(rows, cols);

    static constexpr int dr[8] = {-1, -1, -1, 0, 0, 1, 1, 1};
    static constexpr int dc[8] = {-1, 0, 1, -1, 1, -1, 0, 1};

    std::vector<std::pair<int, int>> stack;
    int next = 0;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            if (mask(r, c) == 0 || out.labels(r, c) != 0) continue;
            ++next;
            out.labels(r, c) = next;
            stack.clear();
            stack.emplace_back(r, c);
            while (!stack.empty()) {
                const auto [pr, pc] = stack.back();
                stack.pop_back();
                for (int k = 0; k < 8; ++k) {
                    const int nr = pr + dr[k];
                    const int nc = pc + dc[k];
                    if (nr < 0 || nr >= rows || nc < 0 || nc >= cols) continue;
                    if (mask(nr, nc) == 0 || out.labels(nr, nc) != 0) continue;
                    out.labels(nr, nc) = next;
                    stack.emplace_back(nr, nc);
                }
            }
        }
    }
    out.count = next;
    return out;
}

}  // namespace mammo
