#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace commforge {

struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ContractError : std::logic_error {
    using std::logic_error::logic_error;
};

/// Dense row-major matrix of doubles. Row vectors are 1 x n.
struct Tensor2 {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Tensor2() = default;
    Tensor2(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {
        if (r < 0 || c < 0) throw ShapeError("Tensor2: negative shape");
    }
    Tensor2(int r, int c, std::vector<double> values) : rows(r), cols(c), data(std::move(values)) {
        if (data.size() != static_cast<std::size_t>(r) * c)
            throw ShapeError("Tensor2: data length " + std::to_string(data.size()) +
                             " != " + std::to_string(r) + "x" + std::to_string(c));
    }

    static Tensor2 zeros(int r, int c) { return Tensor2(r, c); }
    static Tensor2 full(int r, int c, double v) {
        Tensor2 t(r, c);
        std::fill(t.data.begin(), t.data.end(), v);
        return t;
    }
    static Tensor2 identity(int n) {
        Tensor2 t(n, n);
        for (int i = 0; i < n; ++i) t.at(i, i) = 1.0;
        return t;
    }

    double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
    double* row(int r) { return data.data() + static_cast<std::size_t>(r) * cols; }
    const double* row(int r) const { return data.data() + static_cast<std::size_t>(r) * cols; }

    std::size_t size() const { return data.size(); }
    bool same_shape(const Tensor2& o) const { return rows == o.rows && cols == o.cols; }

    void fill(double v) { std::fill(data.begin(), data.end(), v); }

    Tensor2& operator+=(const Tensor2& o) {
        require_same_shape(o, "operator+=");
        for (std::size_t i = 0; i < data.size(); ++i) data[i] += o.data[i];
        return *this;
    }
    Tensor2& operator*=(double s) {
        for (double& v : data) v *= s;
        return *this;
    }

    void require_same_shape(const Tensor2& o, const char* op) const {
        if (!same_shape(o))
            throw ShapeError(std::string(op) + ": shape mismatch (" + std::to_string(rows) + "x" +
                             std::to_string(cols) + " vs " + std::to_string(o.rows) + "x" +
                             std::to_string(o.cols) + ")");
    }

    bool all_finite() const;
};

bool operator==(const Tensor2& a, const Tensor2& b);

/// C = A * B (or += when accumulate).
void matmul(const Tensor2& a, const Tensor2& b, Tensor2& c, bool accumulate = false);
/// C = A^T * B.
void matmul_tn(const Tensor2& a, const Tensor2& b, Tensor2& c, bool accumulate = false);
/// C = A * B^T.
void matmul_nt(const Tensor2& a, const Tensor2& b, Tensor2& c, bool accumulate = false);

Tensor2 matmul(const Tensor2& a, const Tensor2& b);

/// Throws NumericError if any entry is NaN or infinite.
void require_finite(const Tensor2& t, const char* what);

}  // namespace commforge
