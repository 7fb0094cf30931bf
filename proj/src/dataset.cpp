#include "citest/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "citest/error.hpp"

namespace citest {

TripleDataset TripleDataset::slice(std::size_t from, std::size_t to) const {
    if (from > to || to > size()) throw DimensionError("slice out of range");
    TripleDataset out;
    out.kind = kind;
    out.ell1 = ell1;
    out.ell2 = ell2;
    out.dz = dz;
    const auto f = static_cast<long>(from), t = static_cast<long>(to);
    out.x.assign(x.begin() + f, x.begin() + t);
    out.y.assign(y.begin() + f, y.begin() + t);
    out.z.assign(z.begin() + f * dz, z.begin() + t * dz);
    return out;
}

TripleDataset TripleDataset::head(std::size_t n) const { return slice(0, std::min(n, size())); }

void TripleDataset::push_back(double xv, double yv, std::span<const double> zv) {
    if (zv.size() != static_cast<std::size_t>(dz))
        throw DimensionError("z has " + std::to_string(zv.size()) + " coordinates, expected " +
                             std::to_string(dz));
    x.push_back(xv);
    y.push_back(yv);
    z.insert(z.end(), zv.begin(), zv.end());
}

void validate(const TripleDataset& data) {
    if (data.dz < 1) throw DimensionError("d_Z must be positive");
    if (data.y.size() != data.x.size() ||
        data.z.size() != data.x.size() * static_cast<std::size_t>(data.dz))
        throw DimensionError("x, y and z columns have inconsistent lengths");
    const bool categorical = data.kind == XYKind::categorical;
    if (categorical && (data.ell1 == 0 || data.ell2 == 0))
        throw DimensionError("categorical data needs positive support sizes");
    auto check = [&](double v, std::size_t row, int column, std::size_t ell) {
        if (categorical) {
            if (v != std::floor(v) || v < 0 || v >= static_cast<double>(ell))
                throw DataError("category out of range", static_cast<long>(row) + 1, column + 1);
        } else if (!(v >= 0.0 && v <= 1.0)) {
            throw DataError("continuous value outside [0,1]", static_cast<long>(row) + 1, column + 1);
        }
    };
    for (std::size_t i = 0; i < data.size(); ++i) {
        check(data.x[i], i, 0, data.ell1);  // positions reported 1-based
        check(data.y[i], i, 1, data.ell2);
        for (int k = 0; k < data.dz; ++k)
            if (!std::isfinite(data.z[i * static_cast<std::size_t>(data.dz) + static_cast<std::size_t>(k)]))
                throw DataError("z is not finite", static_cast<long>(i) + 1, 3 + k);
    }
}

}  // namespace citest
