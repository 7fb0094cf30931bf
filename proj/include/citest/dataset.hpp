#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace citest {

enum class XYKind { categorical, continuous };

/// Observations (X_i, Y_i, Z_i).
///
/// Categorical x/y hold 0-based category codes stored as doubles; continuous
/// x/y hold reals in [0,1]. z is stored row-major with dz entries per row.
struct TripleDataset {
    XYKind kind = XYKind::categorical;
    std::size_t ell1 = 0;  ///< category counts, categorical kind only
    std::size_t ell2 = 0;
    int dz = 1;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> z;

    std::size_t size() const noexcept { return x.size(); }
    std::span<const double> z_row(std::size_t i) const {
        return {z.data() + i * static_cast<std::size_t>(dz), static_cast<std::size_t>(dz)};
    }

    /// First n rows.
    TripleDataset head(std::size_t n) const;
    /// Rows [from, to).
    TripleDataset slice(std::size_t from, std::size_t to) const;
    void push_back(double xv, double yv, std::span<const double> zv);
};

/// Throws DimensionError/DataError on inconsistent lengths or invalid values.
void validate(const TripleDataset& data);

}  // namespace citest
