#include "commforge/tensor.hpp"

#include <cmath>

namespace commforge {

bool Tensor2::all_finite() const {
    for (const double v : data)
        if (!std::isfinite(v)) return false;
    return true;
}

bool operator==(const Tensor2& a, const Tensor2& b) {
    return a.rows == b.rows && a.cols == b.cols && a.data == b.data;
}

void matmul(const Tensor2& a, const Tensor2& b, Tensor2& c, bool accumulate) {
    if (a.cols != b.rows)
        throw ShapeError("matmul: inner dims " + std::to_string(a.cols) + " vs " +
                         std::to_string(b.rows));
    if (c.rows != a.rows || c.cols != b.cols) c = Tensor2(a.rows, b.cols);
    else if (!accumulate) c.fill(0.0);
    const int m = a.rows, k = a.cols, n = b.cols;
    for (int i = 0; i < m; ++i) {
        double* ci = c.row(i);
        const double* ai = a.row(i);
        for (int p = 0; p < k; ++p) {
            const double av = ai[p];
            if (av == 0.0) continue;
            const double* bp = b.row(p);
            for (int j = 0; j < n; ++j) ci[j] += av * bp[j];
        }
    }
}

void matmul_tn(const Tensor2& a, const Tensor2& b, Tensor2& c, bool accumulate) {
    if (a.rows != b.rows)
        throw ShapeError("matmul_tn: outer dims " + std::to_string(a.rows) + " vs " +
                         std::to_string(b.rows));
    if (c.rows != a.cols || c.cols != b.cols) c = Tensor2(a.cols, b.cols);
    else if (!accumulate) c.fill(0.0);
    const int m = a.cols, k = a.rows, n = b.cols;
    for (int p = 0; p < k; ++p) {
        const double* ap = a.row(p);
        const double* bp = b.row(p);
        for (int i = 0; i < m; ++i) {
            const double av = ap[i];
            if (av == 0.0) continue;
            double* ci = c.row(i);
            for (int j = 0; j < n; ++j) ci[j] += av * bp[j];
        }
    }
}

void matmul_nt(const Tensor2& a, const Tensor2& b, Tensor2& c, bool accumulate) {
    if (a.cols != b.cols)
        throw ShapeError("matmul_nt: inner dims " + std::to_string(a.cols) + " vs " +
                         std::to_string(b.cols));
    if (c.rows != a.rows || c.cols != b.rows) c = Tensor2(a.rows, b.rows);
    else if (!accumulate) c.fill(0.0);
    const int m = a.rows, k = a.cols, n = b.rows;
    for (int i = 0; i < m; ++i) {
        const double* ai = a.row(i);
        double* ci = c.row(i);
        for (int j = 0; j < n; ++j) {
            const double* bj = b.row(j);
            double acc = 0.0;
            for (int p = 0; p < k; ++p) acc += ai[p] * bj[p];
            ci[j] += acc;
        }
    }
}

Tensor2 matmul(const Tensor2& a, const Tensor2& b) {
    Tensor2 c;
    matmul(a, b, c);
    return c;
}

void require_finite(const Tensor2& t, const char* what) {
    if (!t.all_finite()) throw NumericError(std::string(what) + ": non-finite values");
}

}  // namespace commforge
