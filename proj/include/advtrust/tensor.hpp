#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "advtrust/errors.hpp"

namespace advtrust {

/// Dense row-major float tensor. The shape is a list of positive extents and
/// data.size() always equals the product of the extents.
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<float> data;

    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> s) : shape(std::move(s)) {
        data.assign(numel_of(shape), 0.0f);
    }
    Tensor(std::vector<std::size_t> s, std::vector<float> d) : shape(std::move(s)), data(std::move(d)) {
        if (data.size() != numel_of(shape))
            throw ShapeError("data length " + std::to_string(data.size()) +
                             " does not match shape product " + std::to_string(numel_of(shape)));
    }

    static std::size_t numel_of(const std::vector<std::size_t>& s) {
        if (s.empty()) return 0;
        std::size_t n = 1;
        for (std::size_t e : s) {
            if (e == 0) throw ShapeError("zero extent");
            n *= e;
        }
        return n;
    }

    std::size_t numel() const { return data.size(); }
    std::size_t rank() const { return shape.size(); }

    float& at(std::size_t i) { return data[i]; }
    float at(std::size_t i) const { return data[i]; }

    bool same_shape(const Tensor& o) const { return shape == o.shape; }
};

inline std::string shape_str(const std::vector<std::size_t>& s) {
    std::string r = "(";
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) r += ",";
        r += std::to_string(s[i]);
    }
    return r + ")";
}

inline bool all_finite(const Tensor& t) {
    for (float v : t.data)
        if (!std::isfinite(v)) return false;
    return true;
}

inline void require_finite(const Tensor& t, const char* what) {
    if (!all_finite(t)) throw NumericError(std::string(what) + " contains non-finite values");
}

inline double l2_norm(const Tensor& t) {
    double s = 0.0;
    for (float v : t.data) s += static_cast<double>(v) * static_cast<double>(v);
    return std::sqrt(s);
}

inline double linf_norm(const Tensor& t) {
    double m = 0.0;
    for (float v : t.data) m = std::max(m, static_cast<double>(std::fabs(v)));
    return m;
}

/// Euclidean norm of (a - b) accumulated in double.
inline double l2_distance(const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b)) throw ShapeError("l2_distance shape mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.numel(); ++i) {
        double d = static_cast<double>(a.data[i]) - static_cast<double>(b.data[i]);
        s += d * d;
    }
    return std::sqrt(s);
}

inline double linf_distance(const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b)) throw ShapeError("linf_distance shape mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.numel(); ++i)
        m = std::max(m, std::fabs(static_cast<double>(a.data[i]) - static_cast<double>(b.data[i])));
    return m;
}

}  // namespace advtrust
