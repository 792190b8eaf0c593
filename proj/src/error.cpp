#include "actopo/error.hpp"

namespace actopo {

std::string ingest_location(const std::string& path, std::size_t row, const std::string& column) {
    std::string out = path + ": row " + std::to_string(row);
    if (!column.empty()) {
        out += ", column '" + column + "'";
    }
    return out;
}

}  // namespace actopo
