#include "actopo/matrix.hpp"

#include <stdexcept>
#include <utility>

namespace actopo {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
  : rows_{rows}
  , cols_{cols}
  , data_{std::move(data)} {
    if (data_.size() != rows * cols) {
        throw std::invalid_argument("Matrix: data size does not match rows * cols");
    }
}

}  // namespace actopo
