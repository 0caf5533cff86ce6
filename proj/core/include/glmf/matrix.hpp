#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <vector>

namespace glmf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;
using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

struct Cell {
    Index row = 0;
    Index col = 0;
    friend bool operator==(const Cell& a, const Cell& b) {
        return a.row == b.row && a.col == b.col;
    }
    friend bool operator<(const Cell& a, const Cell& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    }
};

using CellList = std::vector<Cell>;

// Cells with the given mask value, in row-major order.
inline CellList cells_where(const Mask& mask, bool value) {
    CellList out;
    for (Index i = 0; i < mask.rows(); ++i)
        for (Index j = 0; j < mask.cols(); ++j)
            if (mask(i, j) == value) out.push_back({i, j});
    return out;
}

inline Matrix clip(const Matrix& m, double lo, double hi) {
    return m.unaryExpr([lo, hi](double v) { return std::clamp(v, lo, hi); });
}

}  // namespace glmf
